"""Tests for config loading and conversion into engine objects."""

from pathlib import Path

import numpy as np
import pytest

from rcbo import get_output_dir
from rcbo.config import (
    ConfigError,
    domain_from_settings,
    flatten,
    load_config,
    objective_from_settings,
    parse_vector,
    solver_from_settings,
)
from rcbo.domain import Ball, Box, HeartRegion
from rcbo.dynamics import Scheme

SOLVER_SETTINGS = {
    "scheme": "penalty",
    "alpha": 1e4,
    "beta": "const:1",
    "sigma": "const:4",
    "h": 0.1,
    "steps": 10,
    "particles": 50,
    "seed": 0,
}


class TestLoadConfig:
    """Tests for load_config."""

    def test_load_from_string(self):
        result = load_config('objective = "ackley"\nalpha = 1e4\n')
        assert result == {"objective": "ackley", "alpha": 1e4}

    def test_load_from_file_path(self, ackley_config_file):
        result = load_config(ackley_config_file)
        assert result["domain.kind"] == "ball"
        assert result["domain.radius"] == 3.0
        assert result["seed"] == 7

    def test_table_and_dotted_keys_agree(self):
        table = load_config('[domain]\nkind = "box"\nlower = [0, 0]\n')
        dotted = load_config('domain.kind = "box"\ndomain.lower = [0, 0]\n')
        assert table == dotted

    def test_file_not_found(self):
        with pytest.raises(ConfigError) as exc:
            load_config(Path("/nonexistent/path/rcbo.toml"))
        assert "not found" in str(exc.value)

    def test_unknown_key_suggests_match(self):
        with pytest.raises(ConfigError, match="did you mean 'particles'"):
            load_config("particle = 10\n")

    def test_unknown_key_without_close_match(self):
        with pytest.raises(ConfigError) as exc:
            load_config("colour = 'red'\n")
        assert "unknown config key 'colour'" in str(exc.value)
        assert "did you mean" not in str(exc.value)

    def test_syntax_error_shows_caret(self):
        """Syntax errors point at the offending line."""
        with pytest.raises(ConfigError) as exc:
            load_config("alpha = 1\nbeta = \n")
        msg = str(exc.value)
        assert "line 2" in msg
        assert "beta = " in msg
        assert "^" in msg

    def test_wrong_argument_type(self):
        with pytest.raises(TypeError):
            load_config(42)  # type: ignore[arg-type]

    def test_flatten_nested(self):
        assert flatten({"a": 1, "b": {"c": 2, "d": {"e": 3}}}) == {
            "a": 1,
            "b.c": 2,
            "b.d.e": 3,
        }


class TestParseVector:
    """Tests for the point parser shared by config and flags."""

    def test_comma_string(self):
        np.testing.assert_array_equal(parse_vector("1, 2.5,-3", "x"), [1.0, 2.5, -3.0])

    def test_list_and_scalar(self):
        np.testing.assert_array_equal(parse_vector([0, 1], "x"), [0.0, 1.0])
        np.testing.assert_array_equal(parse_vector(4, "x"), [4.0])

    @pytest.mark.parametrize("value", ["", "1,a", "nan", [[1, 2]]])
    def test_invalid(self, value):
        with pytest.raises(ConfigError, match="center"):
            parse_vector(value, "center")


class TestDomainFromSettings:
    """Tests for building the feasible domain."""

    def test_ball_with_center(self):
        dom = domain_from_settings(
            {"domain.kind": "ball", "domain.center": [1.0, 1.0], "domain.radius": 2.0}
        )
        assert isinstance(dom, Ball)
        np.testing.assert_array_equal(dom.center, [1.0, 1.0])

    def test_ball_center_defaults_to_origin(self):
        dom = domain_from_settings({"domain.kind": "ball", "domain.radius": 5.0}, dimension=4)
        assert dom.dimension == 4
        np.testing.assert_array_equal(dom.center, np.zeros(4))

    def test_ball_needs_center_or_dimension(self):
        with pytest.raises(ConfigError, match="domain.center"):
            domain_from_settings({"domain.kind": "ball", "domain.radius": 1.0})

    def test_box(self):
        dom = domain_from_settings(
            {"domain.kind": "box", "domain.lower": "0,-1,0", "domain.upper": "1,1,1"}
        )
        assert isinstance(dom, Box)
        assert dom.dimension == 3

    def test_box_length_mismatch(self):
        with pytest.raises(ConfigError, match="same length"):
            domain_from_settings(
                {"domain.kind": "box", "domain.lower": "0,0", "domain.upper": "1,1,1"}
            )

    def test_heart(self):
        assert isinstance(domain_from_settings({"domain.kind": "levelset-heart"}), HeartRegion)

    def test_unknown_kind(self):
        with pytest.raises(ConfigError, match="domain.kind must be one of"):
            domain_from_settings({"domain.kind": "torus"})

    def test_missing_kind(self):
        with pytest.raises(ConfigError, match="Missing required setting: domain.kind"):
            domain_from_settings({})

    def test_invalid_radius(self):
        with pytest.raises(ConfigError, match="radius"):
            domain_from_settings(
                {"domain.kind": "ball", "domain.center": "0,0", "domain.radius": -1.0}
            )

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigError, match="does not match"):
            domain_from_settings(
                {"domain.kind": "ball", "domain.center": "0,0", "domain.radius": 1.0},
                dimension=3,
            )


class TestObjectiveFromSettings:
    """Tests for resolving the objective and its dimension."""

    def test_fixed_dimension(self):
        obj = objective_from_settings({"objective": "ackley"})
        assert obj.dimension == 2

    def test_explicit_dimension(self):
        assert objective_from_settings({"objective": "rastrigin", "dimension": 20}).dimension == 20

    def test_dimension_from_domain_center(self):
        obj = objective_from_settings({"objective": "rastrigin", "domain.center": "0,0,0"})
        assert obj.dimension == 3

    def test_conflicting_dimension(self):
        with pytest.raises(ConfigError, match="2-dimensional"):
            objective_from_settings({"objective": "rosenbrock", "dimension": 5})

    def test_unknown_objective(self):
        with pytest.raises(ConfigError, match="objective must be one of"):
            objective_from_settings({"objective": "sphere"})

    def test_non_integer_dimension(self):
        with pytest.raises(ConfigError, match="integer"):
            objective_from_settings({"objective": "rastrigin", "dimension": 2.5})


class TestSolverFromSettings:
    """Tests for building the solver configuration."""

    def test_full_settings(self):
        cfg = solver_from_settings(SOLVER_SETTINGS)
        assert cfg.scheme is Scheme.PENALTY
        assert cfg.steps == 10
        assert cfg.beta(0.3) == 1.0
        assert cfg.repelling is None

    def test_missing_key(self):
        settings = {k: v for k, v in SOLVER_SETTINGS.items() if k != "h"}
        with pytest.raises(ConfigError, match="Missing required setting: h"):
            solver_from_settings(settings)

    def test_unknown_scheme(self):
        with pytest.raises(ConfigError, match="scheme must be one of"):
            solver_from_settings({**SOLVER_SETTINGS, "scheme": "implicit"})

    @pytest.mark.parametrize("value", ["on", True])
    def test_repelling_on_uses_default_schedule(self, value):
        cfg = solver_from_settings({**SOLVER_SETTINGS, "repelling": value})
        assert str(cfg.repelling) == "invsq:1.0"

    @pytest.mark.parametrize("value", ["off", "none", False])
    def test_repelling_off(self, value):
        assert solver_from_settings({**SOLVER_SETTINGS, "repelling": value}).repelling is None

    def test_repelling_schedule(self):
        cfg = solver_from_settings({**SOLVER_SETTINGS, "repelling": "const:0.5"})
        assert cfg.repelling is not None
        assert cfg.repelling(1.0) == 0.5

    def test_invalid_value_is_config_error(self):
        with pytest.raises(ConfigError, match="solver: .*particles"):
            solver_from_settings({**SOLVER_SETTINGS, "particles": 0})

    def test_boolean_is_not_a_number(self):
        with pytest.raises(ConfigError, match="alpha must be a number"):
            solver_from_settings({**SOLVER_SETTINGS, "alpha": True})

    def test_penalty_epsilon(self):
        cfg = solver_from_settings({**SOLVER_SETTINGS, "penalty_epsilon": 0.5})
        assert cfg.penalty_epsilon == 0.5


class TestOutputDir:
    """Tests for output directory resolution."""

    def test_explicit_path_wins(self, tmp_path):
        out = get_output_dir(tmp_path / "explicit")
        assert out == tmp_path / "explicit"
        assert out.is_dir()

    def test_env_override(self, tmp_path):
        out = get_output_dir()
        assert out == tmp_path / "rcbo-out"
        assert out.is_dir()

    def test_default(self, monkeypatch, tmp_path):
        monkeypatch.delenv("RCBO_OUT")
        monkeypatch.chdir(tmp_path)
        assert get_output_dir(create=False) == Path("rcbo-out")
        assert not (tmp_path / "rcbo-out").exists()

    def test_file_in_the_way(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(ConfigError, match="not a directory"):
            get_output_dir(blocker)
