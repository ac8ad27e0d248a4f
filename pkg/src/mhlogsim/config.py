"""Flat key=value config files and the resolved run configuration.

Format: one ``key = value`` per line, ``#`` comments and blank lines
ignored. Unknown keys are errors, as are values that fail to parse; missing
keys take the documented defaults. ``recovery.deadline`` accepts ``auto``
(the default), which recalibrates the deadline from the current rates, or
an explicit number, which pins it across sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

from .model import (
    CostParams,
    SimParams,
    ValidationError,
    default_recovery_deadline,
    validate_params,
)
from .strategies import StrategyKind
from .topology import NetworkTree, build_topology


class ConfigError(ValueError):
    """A config file failed to parse; the message carries the location."""


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_deadline(text: str) -> float | str:
    if text.lower() == "auto":
        return "auto"
    return float(text)


# key -> (parser, default)
CONFIG_KEYS: dict[str, tuple] = {
    "sim.lambda_f": (float, 0.001),
    "sim.lambda_w": (float, 0.5),
    "sim.mu": (float, 0.01),
    "sim.T_c": (float, 100.0),
    "sim.cache_capacity": (int, 16),
    "sim.horizon": (float, 20000.0),
    "sim.seed": (int, 12345),
    "sim.replications": (int, 20),
    "cost.r": (float, 0.1),
    "cost.C_c": (float, 5.0),
    "cost.C_1": (float, 1.0),
    "cost.C_m": (float, 0.5),
    "cost.alpha": (float, 1.0),
    "cost.rho": (float, 1.0),
    "cost.T_load_ckpt": (float, 10.0),
    "cost.T_load_log": (float, 1.0),
    "cost.C_p": (float, 3.0),
    "topology.msc": (int, 1),
    "topology.bsc_per_msc": (int, 3),
    "topology.bs_per_bsc": (int, 3),
    "topology.adjacency": (str, "ring"),
    "topology.inter_msc_hops": (int, 4),
    "strategy": (str, "proposed"),
    "recovery.deadline": (_parse_deadline, "auto"),
    "recovery.p_same_region": (float, 0.8),
    "frcr.erratum_bound": (_parse_bool, False),
}


@dataclass(frozen=True)
class TopologySpec:
    msc: int
    bsc_per_msc: int
    bs_per_bsc: int
    adjacency: str
    inter_msc_hops: int


@dataclass(frozen=True)
class Config:
    """Fully resolved configuration for the harness."""

    sim: SimParams
    cost: CostParams
    topology: TopologySpec
    strategy: StrategyKind
    p_same_region: float
    frcr_erratum_bound: bool
    deadline_is_auto: bool
    raw: tuple[tuple[str, str], ...]  # every effective key=value, sorted

    def build_tree(self) -> NetworkTree:
        t = self.topology
        return build_topology(
            t.msc, t.bsc_per_msc, t.bs_per_bsc, t.adjacency, t.inter_msc_hops
        )

    def with_overrides(self, overrides: dict[str, object]) -> "Config":
        """New Config with the given keys replaced and everything
        revalidated; an auto deadline is recalibrated for the new rates."""
        values = dict(self.raw_values())
        for key, value in overrides.items():
            if key not in CONFIG_KEYS:
                raise ConfigError(f"unknown config key: {key!r}")
            values[key] = value
        return _build_config(values)

    def raw_values(self) -> dict[str, object]:
        out: dict[str, object] = {}
        for key, text in self.raw:
            parser, _ = CONFIG_KEYS[key]
            out[key] = parser(text)
        return out


def _format_value(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _build_config(values: dict[str, object]) -> Config:
    merged = {key: default for key, (_, default) in CONFIG_KEYS.items()}
    merged.update(values)

    deadline = merged["recovery.deadline"]
    deadline_is_auto = deadline == "auto"

    sim = SimParams(
        lambda_f=float(merged["sim.lambda_f"]),
        lambda_w=float(merged["sim.lambda_w"]),
        mu=float(merged["sim.mu"]),
        t_c=float(merged["sim.T_c"]),
        cache_capacity=int(merged["sim.cache_capacity"]),
        recovery_deadline=1.0,  # placeholder until calibrated below
        sim_horizon=float(merged["sim.horizon"]),
        seed=int(merged["sim.seed"]),
        replications=int(merged["sim.replications"]),
    )
    cost = CostParams(
        r=float(merged["cost.r"]),
        c_c=float(merged["cost.C_c"]),
        c_1=float(merged["cost.C_1"]),
        c_m=float(merged["cost.C_m"]),
        alpha=float(merged["cost.alpha"]),
        rho=float(merged["cost.rho"]),
        t_load_ckpt=float(merged["cost.T_load_ckpt"]),
        t_load_log=float(merged["cost.T_load_log"]),
        c_p=float(merged["cost.C_p"]),
    )
    if deadline_is_auto:
        sim = replace(sim, recovery_deadline=default_recovery_deadline(sim, cost))
    else:
        sim = replace(sim, recovery_deadline=float(deadline))

    validate_params(sim, cost)

    strategy_text = str(merged["strategy"])
    try:
        strategy = StrategyKind(strategy_text)
    except ValueError:
        raise ValidationError(
            [f"strategy must be one of lazy|pessimistic|proposed, got {strategy_text!r}"]
        ) from None

    adjacency = str(merged["topology.adjacency"])
    if adjacency not in ("ring", "grid"):
        raise ValidationError([f"topology.adjacency must be ring or grid, got {adjacency!r}"])

    p_same = float(merged["recovery.p_same_region"])
    if not 0.0 <= p_same <= 1.0:
        raise ValidationError(["recovery.p_same_region must be in [0, 1]"])

    topo = TopologySpec(
        msc=int(merged["topology.msc"]),
        bsc_per_msc=int(merged["topology.bsc_per_msc"]),
        bs_per_bsc=int(merged["topology.bs_per_bsc"]),
        adjacency=adjacency,
        inter_msc_hops=int(merged["topology.inter_msc_hops"]),
    )
    if topo.msc < 1 or topo.bsc_per_msc < 1 or topo.bs_per_bsc < 1:
        raise ValidationError(["topology counts must all be >= 1"])
    if topo.msc * topo.bsc_per_msc * topo.bs_per_bsc < 2:
        raise ValidationError(["topology must contain at least 2 cells"])

    raw = tuple(
        sorted((key, _format_value(merged[key])) for key in CONFIG_KEYS)
    )
    return Config(
        sim=sim,
        cost=cost,
        topology=topo,
        strategy=strategy,
        p_same_region=p_same,
        frcr_erratum_bound=bool(merged["frcr.erratum_bound"]),
        deadline_is_auto=deadline_is_auto,
        raw=raw,
    )


def default_config() -> Config:
    return _build_config({})


def parse_config(path: str | Path) -> Config:
    """Parse and validate a config file; raises ConfigError with the line
    number on malformed input and ValidationError on invariant violations."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {stripped!r}")
        key, _, value_text = stripped.partition("=")
        key = key.strip()
        value_text = value_text.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        parser, _ = CONFIG_KEYS[key]
        try:
            values[key] = parser(value_text)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return _build_config(values)
