import pytest

from mhlogsim.config import ConfigError, default_config, parse_config
from mhlogsim.model import ValidationError, default_recovery_deadline
from mhlogsim.strategies import StrategyKind


def write(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text, encoding="utf-8")
    return path


class TestParseConfig:
    def test_empty_file_gives_defaults(self, tmp_path):
        cfg = parse_config(write(tmp_path, ""))
        assert cfg == default_config()
        assert cfg.sim.lambda_f == 0.001
        assert cfg.strategy is StrategyKind.PROPOSED
        assert cfg.deadline_is_auto

    def test_comments_and_blanks_ignored(self, tmp_path):
        cfg = parse_config(write(tmp_path, "# comment\n\nsim.mu = 0.05\n"))
        assert cfg.sim.mu == 0.05

    def test_overrides_apply_rest_default(self, tmp_path):
        cfg = parse_config(write(tmp_path, "strategy = proposed\nsim.mu = 0.05\n"))
        assert cfg.strategy is StrategyKind.PROPOSED
        assert cfg.sim.mu == 0.05
        assert cfg.sim.lambda_w == 0.5

    def test_negative_rate_is_validation_error(self, tmp_path):
        with pytest.raises(ValidationError, match="mu must be > 0"):
            parse_config(write(tmp_path, "sim.mu = -1\n"))

    def test_unknown_key_reports_line(self, tmp_path):
        with pytest.raises(ConfigError, match=r":2: unknown key"):
            parse_config(write(tmp_path, "sim.mu = 0.01\nsim.nope = 3\n"))

    def test_type_mismatch_reports_line(self, tmp_path):
        with pytest.raises(ConfigError, match=r":1: bad value"):
            parse_config(write(tmp_path, "sim.cache_capacity = many\n"))

    def test_missing_equals_reports_line(self, tmp_path):
        with pytest.raises(ConfigError, match=r":1: expected"):
            parse_config(write(tmp_path, "just some words\n"))

    def test_bad_strategy_rejected(self, tmp_path):
        with pytest.raises(ValidationError, match="strategy"):
            parse_config(write(tmp_path, "strategy = eager\n"))

    def test_erratum_flag_parses(self, tmp_path):
        cfg = parse_config(write(tmp_path, "frcr.erratum_bound = true\n"))
        assert cfg.frcr_erratum_bound


class TestDeadlineCalibration:
    def test_auto_deadline_tracks_rates(self, tmp_path):
        cfg = parse_config(write(tmp_path, "sim.lambda_w = 0.2\n"))
        assert cfg.sim.recovery_deadline == pytest.approx(
            default_recovery_deadline(cfg.sim, cfg.cost)
        )

    def test_explicit_deadline_is_pinned(self, tmp_path):
        cfg = parse_config(write(tmp_path, "recovery.deadline = 55.5\n"))
        assert not cfg.deadline_is_auto
        assert cfg.sim.recovery_deadline == 55.5
        bumped = cfg.with_overrides({"sim.lambda_w": 0.25})
        assert bumped.sim.recovery_deadline == 55.5

    def test_auto_deadline_recalibrates_on_override(self):
        cfg = default_config()
        bumped = cfg.with_overrides({"sim.lambda_w": 0.25})
        assert bumped.sim.recovery_deadline == pytest.approx(
            default_recovery_deadline(bumped.sim, bumped.cost)
        )
        assert bumped.sim.recovery_deadline != cfg.sim.recovery_deadline


class TestWithOverrides:
    def test_unknown_override_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown config key"):
            default_config().with_overrides({"sim.bogus": 1})

    def test_override_roundtrips_raw_values(self):
        cfg = default_config().with_overrides({"sim.mu": 0.05, "sim.cache_capacity": 4})
        again = cfg.with_overrides({})
        assert again == cfg

    def test_topology_spec_buildable(self):
        cfg = default_config()
        tree = cfg.build_tree()
        assert tree.n_cells == 9
        assert tree.adjacency_kind == "ring"
