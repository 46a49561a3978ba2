"""
test_config.py — Unit tests for run configuration (config.py)

Tests cover:
  - parse_config: validation errors become ConfigError with readable locations
  - per-game sender counts and sweep axis limits
  - DISCLOSURE_* environment overrides and their precedence
  - SweepAxis.parse for --axis flags
  - ModelSpec.build for every model kind
  - load_config on missing and malformed files

Run with:  pytest test_config.py -v
"""

import json

import numpy as np
import pytest

from config import ModelSpec, RunConfig, SolverOptions, SweepAxis, env_overrides, load_config, parse_config
from errors import ConfigError
from signal_models import ContinuousSignalModel, DiscreteSignalModel


# ── Helpers ────────────────────────────────────────────────────────────────

def uniform_config(**extra):
    data = {"model": {"kind": "uniform"}, "senders": [{"p": 0.8}]}
    data.update(extra)
    return data


# ── parse_config ───────────────────────────────────────────────────────────

class TestParseConfig:

    def test_minimal_config_defaults(self):
        config = parse_config(uniform_config(), environ={})
        assert config.game == "single"
        assert config.c == 0.0
        assert config.solver == SolverOptions()
        assert config.out == "results"

    def test_unknown_field_rejected(self):
        with pytest.raises(ConfigError, match="colour"):
            parse_config(uniform_config(colour="blue"), environ={})

    def test_error_names_source(self):
        with pytest.raises(ConfigError, match="run.json"):
            parse_config({"senders": [{"p": 0.8}]}, source="run.json", environ={})

    def test_sender_probability_range(self):
        with pytest.raises(ConfigError, match="senders"):
            parse_config(uniform_config(senders=[{"p": 1.5}]), environ={})

    def test_unknown_bias_rejected(self):
        with pytest.raises(ConfigError):
            parse_config(uniform_config(senders=[{"p": 0.8, "bias": "sideways"}]), environ={})

    def test_solver_bounds(self):
        with pytest.raises(ConfigError, match="grid_resolution"):
            parse_config(uniform_config(solver={"grid_resolution": 5000}), environ={})

    @pytest.mark.parametrize("knob", ["quad_cells", "action_grid"])
    def test_solver_has_no_inert_knobs(self, knob):
        with pytest.raises(ConfigError, match=knob):
            parse_config(uniform_config(solver={knob: 64}), environ={})
        assert knob not in SolverOptions().describe()

    def test_model_kind_requires_fields(self):
        with pytest.raises(ConfigError, match="requires rho"):
            parse_config({"model": {"kind": "beta"}, "senders": [{"p": 0.8}]}, environ={})
        with pytest.raises(ConfigError, match="gamma"):
            parse_config({"model": {"kind": "four_signal", "delta": 0.7}, "senders": [{"p": 0.8}]}, environ={})

    def test_table_errors_point_at_row(self):
        data = {"model": {"kind": "discrete", "table": [[0.0, 0.5, 0.0], [1.0, "x", 1.0]]},
                "senders": [{"p": 0.8}]}
        with pytest.raises(ConfigError, match="model.table row 1"):
            parse_config(data, environ={})

    def test_lambda_range(self):
        with pytest.raises(ConfigError):
            parse_config(uniform_config(game="uncertain_bias", lam=1.2), environ={})


# ── Sender counts ──────────────────────────────────────────────────────────

class TestSenderCounts:

    @pytest.mark.parametrize("game", ["two", "sequential", "correlated"])
    def test_two_sender_games(self, game):
        with pytest.raises(ConfigError, match="exactly 2"):
            parse_config(uniform_config(game=game), environ={})
        two = uniform_config(game=game, senders=[{"p": 0.8}, {"p": 0.6}])
        assert len(parse_config(two, environ={}).senders) == 2

    def test_single_game_takes_one_sender(self):
        with pytest.raises(ConfigError, match="exactly 1"):
            parse_config(uniform_config(senders=[{"p": 0.8}, {"p": 0.6}]), environ={})

    def test_many_needs_two(self):
        with pytest.raises(ConfigError, match="at least two"):
            parse_config(uniform_config(game="many"), environ={})
        three = uniform_config(game="many", senders=[{"p": 0.5}] * 3)
        assert len(parse_config(three, environ={}).senders) == 3

    def test_at_most_two_axes(self):
        axes = [{"name": n, "start": 0.1, "stop": 0.9, "num": 3} for n in ("p1", "c", "rho")]
        with pytest.raises(ConfigError, match="one or two axes"):
            parse_config(uniform_config(axes=axes), environ={})

    def test_sender_specs_with_overrides(self):
        config = parse_config(uniform_config(game="two", senders=[{"p": 0.8}, {"p": 0.6, "bias": "down"}]),
                              environ={})
        specs = config.sender_specs({1: 0.3})
        assert (specs[0].p, specs[0].bias) == (0.8, "up")
        assert (specs[1].p, specs[1].bias) == (0.3, "down")


# ── Environment overrides ──────────────────────────────────────────────────

class TestEnvOverrides:

    def test_reads_prefixed_variables(self):
        env = {"DISCLOSURE_SEED": "7", "DISCLOSURE_TOLERANCE": "1e-4", "DISCLOSURE_OUT": "/tmp/x", "SEED": "9"}
        assert env_overrides(env) == {"seed": 7, "tolerance": 1e-4, "out": "/tmp/x"}

    def test_empty_values_ignored(self):
        assert env_overrides({"DISCLOSURE_THREADS": ""}) == {}

    def test_bad_cast_is_config_error(self):
        with pytest.raises(ConfigError, match="DISCLOSURE_THREADS"):
            env_overrides({"DISCLOSURE_THREADS": "many"})

    def test_env_beats_file(self):
        config = parse_config(uniform_config(solver={"seed": 1}, out="file_out"),
                              environ={"DISCLOSURE_SEED": "42", "DISCLOSURE_OUT": "env_out"})
        assert config.solver.seed == 42
        assert config.out == "env_out"

    def test_env_values_are_validated(self):
        with pytest.raises(ConfigError, match="environment"):
            parse_config(uniform_config(), environ={"DISCLOSURE_TOLERANCE": "-1"})

    def test_flags_beat_env(self):
        config = parse_config(uniform_config(), environ={"DISCLOSURE_SEED": "42"})
        assert config.with_overrides(seed=5).solver.seed == 5

    def test_none_keeps_value(self):
        config = parse_config(uniform_config(solver={"threads": 3}), environ={})
        kept = config.with_overrides(seed=None, threads=None, out=None)
        assert kept.solver.threads == 3
        assert kept.out == config.out


# ── Sweep axes ─────────────────────────────────────────────────────────────

class TestSweepAxis:

    def test_parse(self):
        axis = SweepAxis.parse("c=-0.1:0.1:5")
        assert axis.name == "c"
        assert np.allclose(axis.values(), [-0.1, -0.05, 0.0, 0.05, 0.1])

    def test_unknown_parameter(self):
        with pytest.raises(ConfigError, match="unsupported sweep parameter"):
            SweepAxis.parse("gamma=0.1:0.9:3")

    @pytest.mark.parametrize("text", ["p1", "p1=0.1:0.9", "p1=a:b:3", "p1=0.1:0.9:0"])
    def test_malformed(self, text):
        with pytest.raises(ConfigError):
            SweepAxis.parse(text)

    def test_with_overrides_replaces_axes(self):
        config = parse_config(uniform_config(), environ={})
        swept = config.with_overrides(axes=[SweepAxis.parse("p1=0.2:0.8:4")])
        assert [a.name for a in swept.axes] == ["p1"]
        assert config.with_overrides(axes=[]).axes == []


# ── ModelSpec.build ────────────────────────────────────────────────────────

class TestModelSpec:

    def test_uniform(self):
        model = ModelSpec(kind="uniform").build()
        assert isinstance(model, ContinuousSignalModel)
        assert model.prior == pytest.approx(0.5)

    def test_beta_and_normal(self):
        for kind in ("beta", "normal"):
            model = ModelSpec(kind=kind, rho=2.0).build()
            assert model.lower_moments(1.0)[1] == pytest.approx(0.5, abs=1e-8)

    def test_rho_override(self):
        spec = ModelSpec(kind="beta", rho=2.0)
        assert spec.build(rho=1.0).lower_moments(0.4)[0] == pytest.approx(0.4, abs=1e-10)

    def test_four_signal(self):
        model = ModelSpec(kind="four_signal", gamma=0.7, delta=0.7).build()
        assert isinstance(model, DiscreteSignalModel)
        assert np.allclose(model.values, [0.0, 0.3, 0.7, 1.0])

    def test_discrete_table(self):
        spec = ModelSpec(kind="discrete", table=[(0.0, 0.5, 0.0), (0.5, 0.5, 0.5), (1.0, 0.0, 0.5)])
        model = spec.build()
        assert np.allclose(model.values, [0.0, 0.5, 1.0])

    def test_curve_samples_are_checked(self):
        with pytest.raises(ConfigError, match="at least four"):
            ModelSpec(kind="curve", curve=[(0.0, 0.5), (0.5, 0.3), (1.0, 0.5)]).build()


# ── load_config ────────────────────────────────────────────────────────────

class TestLoadConfig:

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "absent.json", environ={})

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{\"model\": ")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(path, environ={})

    def test_top_level_must_be_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="JSON object"):
            load_config(path, environ={})

    def test_round_trip_from_file(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps(uniform_config(c=0.05)))
        config = load_config(path, environ={})
        assert isinstance(config, RunConfig)
        assert config.c == pytest.approx(0.05)
