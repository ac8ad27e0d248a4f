import math
import random

import numpy as np
import pytest

from mhlogsim.config import default_config
from mhlogsim.engine import (
    Event,
    EventKind,
    EventQueue,
    SimConfig,
    estimate_transition_probs,
    fraction_multi_failure_intervals,
    measure_mean_pending_log,
    replicate,
    run_simulation,
    sample_exponential,
    simulate_interval_costs,
    split_seed,
)
from mhlogsim.model import CostParams, SimParams
from mhlogsim import analytic


class FakeRng:
    """Returns a scripted uniform value so draws can be pinned."""

    def __init__(self, value):
        self.value = value

    def random(self):
        return self.value


def sim_config(**overrides) -> SimConfig:
    cfg = default_config().with_overrides(overrides)
    return SimConfig(cfg.sim, cfg.cost, cfg.build_tree(), cfg.p_same_region)


class TestSampleExponential:
    def test_u_equal_one_gives_zero(self):
        assert sample_exponential(2.0, FakeRng(0.0)) == 0.0

    def test_analytic_inversion(self):
        rng = FakeRng(1.0 - math.exp(-1.0))
        assert sample_exponential(1.0, rng) == pytest.approx(1.0)

    def test_rejects_nonpositive_rate(self):
        with pytest.raises(ValueError):
            sample_exponential(0.0, FakeRng(0.5))

    def test_sample_mean_matches_rate(self):
        rng = np.random.Generator(np.random.PCG64(11))
        n = 100_000
        mean = sum(sample_exponential(0.01, rng) for _ in range(n)) / n
        assert abs(mean - 100.0) / 100.0 < 0.02


class TestEventQueue:
    def test_priority_order_for_simultaneous_events(self):
        expected = [
            EventKind.CHECKPOINT,
            EventKind.HANDOFF,
            EventKind.WRITE,
            EventKind.FAILURE,
        ]
        kinds = list(expected)
        rng = random.Random(4)
        for _ in range(20):
            rng.shuffle(kinds)
            q = EventQueue()
            for k in kinds:
                q.push(Event(5.0, k))
            assert [q.pop().kind for _ in range(4)] == expected

    def test_insertion_order_breaks_ties_within_kind(self):
        q = EventQueue()
        a, b = Event(1.0, EventKind.WRITE), Event(1.0, EventKind.WRITE)
        q.push(a)
        q.push(b)
        assert q.pop() is a
        assert q.pop() is b

    def test_time_order_dominates(self):
        q = EventQueue()
        q.push(Event(2.0, EventKind.CHECKPOINT))
        q.push(Event(1.0, EventKind.FAILURE))
        assert q.pop().kind is EventKind.FAILURE


def test_split_seed_documented_formula():
    master = 0xDEADBEEF
    mult = 0x9E3779B97F4A7C15
    assert split_seed(master, 0) == (master ^ (mult & 0xFFFFFFFFFFFFFFFF))
    assert split_seed(master, 2) == (master ^ ((mult * 3) & 0xFFFFFFFFFFFFFFFF))


class TestRunSimulation:
    def test_identical_inputs_identical_stats(self):
        cfg = sim_config()
        for kind in ("lazy", "pessimistic", "proposed"):
            assert run_simulation(cfg, kind, 7) == run_simulation(cfg, kind, 7)

    def test_no_failures_before_horizon(self):
        # A vanishing failure rate puts the first failure far past the
        # horizon; with nothing to recover the probability reports 1.
        cfg = sim_config(**{"sim.lambda_f": 1e-12, "sim.horizon": 2000.0})
        stats = run_simulation(cfg, "proposed", 3)
        assert stats.failure_count == 0
        assert stats.recovery_probability == 1.0
        assert stats.total_recovery_cost == 0.0

    def test_write_free_pessimistic_moves_only_checkpoints(self):
        cfg = sim_config(**{
            "sim.lambda_w": 0.0,
            "sim.lambda_f": 1e-12,
            "sim.horizon": 5000.0,
            "topology.msc": 1,
            "topology.bsc_per_msc": 1,
            "topology.bs_per_bsc": 3,
        })
        stats = run_simulation(cfg, "pessimistic", 9)
        # single region: every move is 2 wired hops, so each handoff costs
        # exactly the checkpoint transfer plus the acknowledgement
        cp = CostParams()
        expected = stats.handoff_count * (cp.c_c * cp.rho * 2 + cp.c_m)
        assert stats.total_handoff_cost == pytest.approx(expected, rel=1e-12)
        assert stats.write_count == 0

    def test_proposed_recovers_cheaper_than_lazy_on_same_seed(self):
        cfg = sim_config()
        prop = run_simulation(cfg, "proposed", 21)
        lazy = run_simulation(cfg, "lazy", 21)
        assert prop.failure_count == lazy.failure_count > 0
        assert prop.total_recovery_cost < lazy.total_recovery_cost

    def test_same_seed_same_timeline_across_strategies(self):
        cfg = sim_config()
        runs = {k: run_simulation(cfg, k, 5) for k in ("lazy", "pessimistic", "proposed")}
        counts = {
            (r.handoff_count, r.write_count, r.failure_count, r.checkpoint_count)
            for r in runs.values()
        }
        assert len(counts) == 1

    def test_totals_equal_fold_of_event_deltas(self):
        cfg = sim_config(**{"sim.horizon": 5000.0})
        for kind in ("lazy", "pessimistic", "proposed"):
            trace = []
            stats = run_simulation(cfg, kind, 13, trace=trace)
            by_kind = {"CHECKPOINT": 0.0, "HANDOFF": 0.0, "WRITE": 0.0, "FAILURE": 0.0}
            for _, name, delta in trace:
                by_kind[name] += delta.total
            assert stats.total_checkpoint_cost == pytest.approx(by_kind["CHECKPOINT"])
            assert stats.total_handoff_cost == pytest.approx(by_kind["HANDOFF"])
            assert stats.total_logging_cost == pytest.approx(by_kind["WRITE"])
            assert stats.total_recovery_cost == pytest.approx(by_kind["FAILURE"])
            total = sum(by_kind.values())
            assert stats.mean_cost_per_handoff_interval == pytest.approx(
                total / max(1, stats.handoff_count)
            )

    def test_recovery_probability_in_unit_interval(self):
        cfg = sim_config(**{"sim.lambda_f": 0.01})
        stats = run_simulation(cfg, "lazy", 2)
        assert 0.0 <= stats.recovery_probability <= 1.0
        assert stats.recovery_success_count <= stats.failure_count

    def test_bsc_peak_memory_tracked(self):
        cfg = sim_config()
        stats = run_simulation(cfg, "proposed", 17)
        assert stats.bsc_peak_entries
        assert all(v > 0 for v in stats.bsc_peak_entries.values())


class TestEstimateTransitionProbs:
    def test_symmetric_competing_clocks(self):
        sp = SimParams(lambda_f=0.01, mu=0.01)
        p01, p02 = estimate_transition_probs(sp, 1, 100_000)
        assert abs(p02 - 0.5) < 0.01
        assert p01 + p02 == pytest.approx(1.0)

    def test_one_to_three_rate_ratio(self):
        sp = SimParams(lambda_f=1.0, mu=3.0)
        _, p02 = estimate_transition_probs(sp, 2, 100_000)
        assert abs(p02 - 0.25) < 0.01

    def test_rare_failures_limit(self):
        sp = SimParams(lambda_f=1e-7, mu=0.01)
        p01, _ = estimate_transition_probs(sp, 3, 100_000)
        assert p01 > 0.999


def test_multi_failure_intervals_rare_in_model_regime():
    frac = fraction_multi_failure_intervals(0.001, 0.01, 5, 100_000)
    assert frac < 0.01


def test_mean_pending_log_matches_half_k_minus_one():
    # k_expected = 20 -> the log a write walks in on averages 9.5 entries
    emp = measure_mean_pending_log(0.2, 100.0, 10_000, seed=8)
    assert abs(emp - 9.5) / 9.5 < 0.05


def test_interval_costs_without_failures_equal_handoff_cost():
    sp = SimParams(lambda_f=0.0)
    cp = CostParams()
    from mhlogsim.model import derive_quantities

    d = derive_quantities(sp)
    expected = analytic.total_handoff_cost(d.k_expected, d.eta, cp)
    assert simulate_interval_costs(sp, cp, 4, 1000) == expected


class TestReplicate:
    def test_single_rep_has_zero_width_interval(self):
        cfg = sim_config(**{"sim.horizon": 2000.0})
        _, summary = replicate(cfg, "lazy", 99, 1)
        mean, lo, hi = summary["total_handoff_cost"]
        assert lo == mean == hi

    def test_rerun_is_identical(self):
        cfg = sim_config(**{"sim.horizon": 2000.0})
        runs1, s1 = replicate(cfg, "proposed", 123, 5)
        runs2, s2 = replicate(cfg, "proposed", 123, 5)
        assert runs1 == runs2
        assert s1 == s2

    def test_recovery_probability_interval_is_tight_at_desk_scale(self):
        cfg = sim_config()
        _, summary = replicate(cfg, "proposed", 42, 30)
        mean, lo, hi = summary["recovery_probability"]
        assert (hi - lo) / 2 < 0.05

    def test_replications_use_distinct_streams(self):
        cfg = sim_config(**{"sim.horizon": 2000.0})
        runs, _ = replicate(cfg, "lazy", 7, 4)
        assert len({r.total_handoff_cost for r in runs}) > 1
