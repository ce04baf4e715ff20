from pathlib import Path

import click
import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from rcbo.commands import ConflictingOptions, MissingRequired, RunSpec, cli, execute, parse_args
from rcbo.config import ConfigError
from rcbo.errors import NonFiniteError
from rcbo.experiment import InvariantReport, read_report

ACKLEY_ARGS = [
    "optimize",
    "--objective", "ackley",
    "--domain", "ball",
    "--radius", "3",
    "--center", "0,0",
    "--scheme", "projection",
    "-N", "100",
    "--alpha", "1e4",
    "--beta", "1",
    "--sigma", "4",
    "--h", "0.1",
    "--steps", "10",
    "--seed", "42",
]


@pytest.fixture
def runner():
    """Create a CliRunner for testing."""
    return CliRunner()


def _without(args: list[str], flag: str) -> list[str]:
    i = args.index(flag)
    return args[:i] + args[i + 2 :]


class TestParseArgs:
    """Command lines resolved into run specs without running them."""

    def test_optimize_example(self):
        spec = parse_args(ACKLEY_ARGS)
        assert spec.subcommand == "optimize"
        assert spec.settings["objective"] == "ackley"
        assert spec.settings["particles"] == 100
        assert spec.settings["domain.center"] == "0,0"
        assert spec.settings["seed"] == 42
        assert spec.workers == 1
        assert spec.options == {"trace": False}

    def test_bench_example(self):
        spec = parse_args(["bench", "--table", "ackley", "--runs", "1000", "--out", "out/"])
        assert spec.subcommand == "bench"
        assert spec.settings["runs"] == 1000
        assert spec.options == {"table": "ackley", "long": False}
        assert spec.out == Path("out")

    def test_bench_default_runs(self):
        assert parse_args(["bench", "-t", "heart"]).settings["runs"] == 1000

    def test_missing_objective(self):
        with pytest.raises(MissingRequired) as exc_info:
            parse_args(["optimize"])
        assert "missing required setting 'objective'" in str(exc_info.value.message)
        assert "--objective" in exc_info.value.message

    def test_unknown_flag(self):
        with pytest.raises(click.NoSuchOption):
            parse_args(ACKLEY_ARGS + ["--temperature", "3"])

    def test_no_subcommand(self):
        with pytest.raises(click.UsageError):
            parse_args([])

    def test_domain_flag_for_other_kind(self):
        args = _without(_without(ACKLEY_ARGS, "--radius"), "--center")
        args[args.index("ball")] = "box"
        with pytest.raises(ConflictingOptions, match="--domain box cannot be combined with --radius"):
            parse_args(args + ["--radius", "2"])

    def test_penalty_epsilon_with_projection(self):
        with pytest.raises(ConflictingOptions, match="--penalty-epsilon"):
            parse_args(ACKLEY_ARGS + ["--penalty-epsilon", "0.1"])

    def test_eps_needs_runs(self):
        with pytest.raises(ConflictingOptions, match="--eps"):
            parse_args(ACKLEY_ARGS + ["--eps", "0.2"])
        assert parse_args(ACKLEY_ARGS + ["--runs", "5", "--eps", "0.2"]).settings["eps"] == 0.2

    def test_debug_and_quiet(self):
        with pytest.raises(ConflictingOptions):
            parse_args(["--debug", "--quiet"] + ACKLEY_ARGS)

    def test_verbosity(self):
        assert parse_args(["-q"] + ACKLEY_ARGS).verbosity == -1
        assert parse_args(["-v"] + ACKLEY_ARGS).verbosity == 1
        assert parse_args(ACKLEY_ARGS).verbosity == 0

    def test_langevin_needs_preset(self):
        with pytest.raises(MissingRequired, match="--preset"):
            parse_args(["langevin"])

    def test_langevin_overrides(self):
        spec = parse_args(
            ["langevin", "-p", "flat", "--sigma", "1.5", "-N", "200", "--lower=-2"]
        )
        assert spec.settings["preset"] == "flat"
        assert spec.settings["sigma"] == 1.5
        assert spec.settings["particles"] == 200
        assert spec.settings["domain.lower"] == -2.0
        assert "domain.upper" not in spec.settings
        assert spec.workers == 1

    def test_langevin_preset_from_config(self, tmp_path):
        config = tmp_path / "langevin.toml"
        config.write_text('preset = "double-well"\nburn_in = 10\n')
        spec = parse_args(["langevin", "-c", str(config)])
        assert spec.settings["preset"] == "double-well"
        assert spec.settings["burn_in"] == 10

    def test_langevin_has_no_workers_flag(self):
        with pytest.raises(click.NoSuchOption):
            parse_args(["langevin", "-p", "quadratic", "-j", "4"])

    def test_invalid_chaos_sizes(self):
        with pytest.raises(click.BadParameter):
            parse_args(["chaos", "--n-list", "32,abc"])


class TestSettingsPrecedence:
    """Defaults, config file, environment and flags."""

    def test_flags_override_config(self, ackley_config_file):
        spec = parse_args(["optimize", "--config", str(ackley_config_file), "-N", "20"])
        assert spec.settings["particles"] == 20
        assert spec.settings["alpha"] == 1e4
        assert spec.settings["domain.radius"] == 3.0
        assert spec.config_path == ackley_config_file

    def test_config_seed_beats_env(self, ackley_config_file, monkeypatch):
        monkeypatch.setenv("RCBO_SEED", "99")
        assert parse_args(["optimize", "-c", str(ackley_config_file)]).settings["seed"] == 7

    def test_env_seed_is_fallback(self, monkeypatch):
        monkeypatch.setenv("RCBO_SEED", "99")
        args = _without(ACKLEY_ARGS, "--seed")
        assert parse_args(args).settings["seed"] == 99

    def test_flag_seed_beats_config(self, ackley_config_file, monkeypatch):
        monkeypatch.setenv("RCBO_SEED", "99")
        spec = parse_args(["optimize", "-c", str(ackley_config_file), "--seed", "3"])
        assert spec.settings["seed"] == 3

    def test_seed_defaults_to_zero(self):
        assert parse_args(_without(ACKLEY_ARGS, "--seed")).settings["seed"] == 0

    def test_decay_defaults(self):
        spec = parse_args(["decay", "--beta", "3"])
        assert spec.settings["beta"] == 3.0
        assert spec.settings["sigma"] == 1.0
        assert spec.settings["runs"] == 200
        assert spec.options == {"horizon": 1.0}


class TestOptimizeCommand:
    """End-to-end runs of the optimize command."""

    def test_prints_consensus_and_writes_trace(self, runner, tmp_path):
        result = runner.invoke(cli, ACKLEY_ARGS + ["--trace", "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert "consensus: " in result.output
        assert "value: " in result.output
        frame, header = read_report(tmp_path / "trace.csv")
        assert list(frame.columns) == ["step", "t", "x0", "x1"]
        assert len(frame) == 11
        assert header["objective"] == "ackley"
        assert header["seed"] == "42"

    def test_identical_argv_gives_identical_files(self, runner, tmp_path):
        outputs = []
        for name in ("a", "b"):
            out = tmp_path / name
            result = runner.invoke(cli, ACKLEY_ARGS + ["--trace", "--runs", "3", "-o", str(out)])
            assert result.exit_code == 0, result.output
            outputs.append(out)
        for filename in ("trace.csv", "report.csv"):
            assert (outputs[0] / filename).read_bytes() == (outputs[1] / filename).read_bytes()

    def test_success_rate(self, runner, tmp_path):
        result = runner.invoke(cli, ACKLEY_ARGS + ["--runs", "4", "-o", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert "success rate: " in result.output
        frame, header = read_report(tmp_path / "report.csv")
        assert frame["runs"].item() == 4
        assert header["eps"] == "0.10000000000000001"

    def test_from_config_file(self, runner, ackley_config_file, tmp_path):
        result = runner.invoke(cli, ["optimize", "-c", str(ackley_config_file), "-o", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert "consensus: " in result.output

    def test_dimension_mismatch_exits_1(self, runner, tmp_path):
        args = list(ACKLEY_ARGS)
        args[args.index("0,0")] = "0,0,0"
        result = runner.invoke(cli, args + ["-o", str(tmp_path)])
        assert result.exit_code == 1
        assert "does not match" in result.output

    def test_blow_up_exits_2(self, runner, tmp_path):
        args = list(ACKLEY_ARGS)
        args[args.index("projection")] = "penalty"
        args[args.index("--beta") + 1] = "1e308"
        args[args.index("--h") + 1] = "10"
        result = runner.invoke(cli, args + ["-o", str(tmp_path)])
        assert result.exit_code == 2
        assert "Error: non-finite particle state" in result.output

    def test_missing_setting_exits_1(self, runner):
        result = runner.invoke(cli, ["optimize", "--objective", "ackley"])
        assert result.exit_code == 1
        assert "missing required setting 'domain.kind'" in result.output

    def test_unknown_config_key_exits_1(self, runner, tmp_path):
        config = tmp_path / "bad.toml"
        config.write_text("particle = 10\n")
        result = runner.invoke(cli, ["optimize", "-c", str(config)])
        assert result.exit_code == 1
        assert "did you mean 'particles'" in result.output

    def test_conflict_exits_1(self, runner):
        result = runner.invoke(cli, ["-v", "-q", "optimize"])
        assert result.exit_code == 1
        assert "--debug cannot be combined with --quiet" in result.output

    def test_logs_resolved_config(self, runner, tmp_path, caplog):
        with caplog.at_level("INFO", logger="rcbo"):
            result = runner.invoke(cli, ACKLEY_ARGS + ["-o", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert any("alpha=10000.0" in r.message and "seed=42" in r.message for r in caplog.records)


class TestExecute:
    """Mapping of runner failures to exit codes."""

    @pytest.fixture
    def spec(self, tmp_path):
        return RunSpec("bench", {"runs": 1, "seed": 0}, tmp_path / "out", options={"table": "ackley"})

    def test_success(self, spec, mocker):
        runner = mocker.Mock(return_value=None)
        mocker.patch.dict("rcbo.commands.utils._runners", {"bench": runner})
        assert execute(spec) == 0
        runner.assert_called_once_with(spec)
        assert spec.out.is_dir()

    def test_numerical_error(self, spec, mocker):
        mocker.patch.dict(
            "rcbo.commands.utils._runners", {"bench": mocker.Mock(side_effect=NonFiniteError(3))}
        )
        assert execute(spec) == 2

    def test_config_error(self, spec, mocker):
        mocker.patch.dict(
            "rcbo.commands.utils._runners",
            {"bench": mocker.Mock(side_effect=ConfigError("bad table"))},
        )
        assert execute(spec) == 1

    def test_runner_exit_code(self, spec, mocker):
        mocker.patch.dict("rcbo.commands.utils._runners", {"bench": mocker.Mock(return_value=2)})
        assert execute(spec) == 2

    def test_invalid_spec(self, tmp_path):
        with pytest.raises(ValueError, match="subcommand"):
            RunSpec("train", {}, tmp_path)
        with pytest.raises(ValueError, match="workers"):
            RunSpec("bench", {}, tmp_path, workers=0)


class TestBenchCommand:
    """Table reproduction from the command line."""

    @pytest.fixture
    def fake_frame(self):
        return pd.DataFrame(
            {
                "panel": ["standard", "repelling"],
                "d": [2, 2],
                "N": [50, 50],
                "K": [100, 100],
                "rate": [0.89, 0.70],
                "reference_rate": [0.892, 0.979],
                "agrees": [True, False],
            }
        )

    def test_writes_report(self, runner, mocker, fake_frame, tmp_path, caplog):
        mocked = mocker.patch("rcbo.commands.bench.reproduce_table", return_value=fake_frame)
        result = runner.invoke(cli, ["bench", "-t", "rosenbrock", "-r", "100", "-o", str(tmp_path)])
        assert result.exit_code == 0, result.output
        mocked.assert_called_once_with("rosenbrock", 100, seed=0, workers=1, long=False)
        assert "rosenbrock: 1/2 cells agree" in result.output
        assert any("published 0.979" in r.message for r in caplog.records)
        frame, header = read_report(tmp_path / "report.csv")
        assert set(frame["panel"]) == {"standard", "repelling"}
        assert header == {"long": "False", "runs": "100", "seed": "0", "table": "rosenbrock"}

    def test_unknown_table_exits_1(self, runner, tmp_path):
        result = runner.invoke(cli, ["bench", "-t", "sphere", "-r", "1", "-o", str(tmp_path)])
        assert result.exit_code == 1
        assert "unknown table 'sphere'" in result.output

    def test_requires_table(self, runner):
        result = runner.invoke(cli, ["bench"])
        assert result.exit_code == 1
        assert "--table" in result.output


class TestDecayCommand:
    """Variance decay from the command line."""

    def test_violation_writes_curve_and_exits_2(self, runner, mocker, tmp_path):
        from rcbo.experiment import variance_decay_check

        def failing(*args, **kwargs):
            return variance_decay_check(*args, **{**kwargs, "bound_factor": 0.5})

        mocker.patch("rcbo.commands.decay.variance_decay_check", side_effect=failing)
        result = runner.invoke(
            cli, ["decay", "--sigma", "0", "--replicas", "1", "-N", "10", "-o", str(tmp_path)]
        )
        assert result.exit_code == 2
        assert (tmp_path / "decay_curve.csv").exists()

    def test_passing_check(self, runner, tmp_path):
        result = runner.invoke(
            cli, ["decay", "--sigma", "0", "--replicas", "2", "-N", "20", "-o", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        assert "variance decay bound holds at t = 0.25, 0.5, 1" in result.output
        frame, header = read_report(tmp_path / "decay_curve.csv")
        assert len(frame) == 101
        assert header["eta0"] == "4"

    def test_nonpositive_rate_exits_1(self, runner, tmp_path):
        result = runner.invoke(cli, ["decay", "--sigma", "2", "-o", str(tmp_path)])
        assert result.exit_code == 1
        assert "must be positive" in result.output


class TestExperimentCommands:
    """Chaos, Langevin and inversion commands."""

    def test_chaos_writes_report(self, runner, tmp_path):
        result = runner.invoke(
            cli,
            [
                "chaos", "--n-list", "4,8", "--n-ref", "32", "--replicas", "20",
                "-o", str(tmp_path),
            ],
        )
        assert result.exit_code == 0, result.output
        assert "slope: " in result.output
        frame, header = read_report(tmp_path / "report.csv")
        assert list(frame["N"]) == [4, 8]
        assert header["n_ref"] == "32"

    def test_chaos_precondition_exits_1(self, runner, tmp_path):
        result = runner.invoke(cli, ["chaos", "--n-list", "8,64", "--n-ref", "64", "-o", str(tmp_path)])
        assert result.exit_code == 1
        assert "n_ref / 4" in result.output

    def test_failed_langevin_check_exits_2(self, runner, mocker, tmp_path):
        report = InvariantReport(
            preset="quadratic",
            l1_distance=0.5,
            tolerance=0.1,
            bin_edges=np.linspace(-1.0, 1.0, 5),
            empirical_mass=np.full(4, 0.25),
            oracle_mass=np.array([0.1, 0.4, 0.4, 0.1]),
            w1_times=np.array([0.0, 0.5]),
            w1_values=np.array([0.3, 0.2]),
            oracle_iterations=1,
            samples=100,
        )
        mocker.patch("rcbo.commands.langevin.langevin_invariant_check", return_value=report)
        result = runner.invoke(cli, ["langevin", "-p", "quadratic", "-o", str(tmp_path)])
        assert result.exit_code == 2
        assert "L1 distance 0.5000" in result.output
        histogram, header = read_report(tmp_path / "histogram.csv")
        assert len(histogram) == 4
        assert header["preset"] == "quadratic"
        assert (tmp_path / "w1_decay.csv").exists()

    def test_langevin_overrides_reach_the_check(self, runner, mocker, tmp_path):
        report = InvariantReport(
            preset="quadratic",
            l1_distance=0.01,
            tolerance=0.1,
            bin_edges=np.linspace(-2.0, 1.0, 5),
            empirical_mass=np.full(4, 0.25),
            oracle_mass=np.full(4, 0.25),
            w1_times=np.array([0.0, 0.5]),
            w1_values=np.array([0.3, 0.2]),
            oracle_iterations=1,
            samples=100,
        )
        check = mocker.patch(
            "rcbo.commands.langevin.langevin_invariant_check", return_value=report
        )
        result = runner.invoke(
            cli,
            [
                "langevin", "-p", "quadratic", "--sigma", "1.5", "-N", "50",
                "--burn-in", "5", "--lower=-2", "-o", str(tmp_path),
            ],
        )
        assert result.exit_code == 0, result.output
        cfg, dom = check.call_args.args
        assert cfg.sigma_noise == 1.5
        assert cfg.particles == 50
        assert check.call_args.kwargs["burn_in"] == 5
        np.testing.assert_array_equal(dom.lower, [-2.0])
        _, header = read_report(tmp_path / "histogram.csv")
        assert header["particles"] == "50"

    def test_invert_writes_histograms(self, runner, tmp_path):
        result = runner.invoke(
            cli,
            ["invert", "-r", "2", "-N", "20", "-K", "3", "--alpha", "1e4", "-o", str(tmp_path)],
        )
        assert result.exit_code == 0, result.output
        assert "success rate: " in result.output
        for name in ("sigma", "m", "gamma"):
            frame, header = read_report(tmp_path / f"histogram_{name}.csv")
            assert len(frame) == 30
            assert header["objective"] == "merton"
