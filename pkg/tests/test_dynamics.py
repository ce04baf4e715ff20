"""Tests for the particle-system engine."""

import numpy as np
import pytest

from rcbo.domain import Ball, Box
from rcbo.dynamics import (
    Ensemble,
    LangevinConfig,
    NoiseStream,
    Schedule,
    ScheduleKind,
    Scheme,
    SolverConfig,
    cbo_step_penalty,
    cbo_step_projection,
    consensus,
    interaction_drift,
    iterate_cbo,
    repelling_force,
    repelling_forces,
    run_cbo,
    run_langevin,
)
from rcbo.errors import DimensionMismatch, NonFiniteError
from rcbo.objective import get_objective


def _frozen_cfg(scheme: Scheme) -> SolverConfig:
    """No drift, no noise: the step reduces to the boundary correction alone."""
    return SolverConfig(
        scheme=scheme, alpha=1.0, beta="0", sigma="0", h=0.25, steps=1, particles=4, seed=0
    )


class TestConsensus:
    """Weighted consensus point."""

    def test_alpha_zero_is_mean(self, rng):
        x = rng.normal(size=(20, 3))
        np.testing.assert_allclose(consensus(x, rng.random(20), 0.0), x.mean(axis=0))

    def test_large_alpha_selects_argmin(self, rng):
        x = rng.normal(size=(30, 2))
        f = rng.permutation(30).astype(float)
        np.testing.assert_allclose(consensus(x, f, 1e12), x[np.argmin(f)], atol=1e-9)

    def test_shift_invariance_is_bitwise(self, rng):
        x = rng.normal(size=(25, 4))
        f = rng.integers(0, 64, size=25) / 8.0
        assert np.array_equal(consensus(x, f, 3.0), consensus(x, f + 1024.0, 3.0))

    def test_underflowing_weights_are_zero(self):
        x = np.array([[1.0, 2.0], [5.0, 6.0]])
        np.testing.assert_array_equal(consensus(x, np.array([0.0, 1.0]), 1000.0), x[0])

    def test_stays_in_hull(self, rng):
        x = rng.normal(size=(50, 3))
        point = consensus(x, rng.random(50), 5.0)
        assert np.all(point >= x.min(axis=0)) and np.all(point <= x.max(axis=0))

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatch):
            consensus(np.zeros((3, 2)), np.zeros(4), 1.0)

    def test_non_finite_values(self):
        with pytest.raises(ValueError, match="finite"):
            consensus(np.zeros((2, 2)), np.array([0.0, np.nan]), 1.0)


class TestInteractions:
    """Repelling force and Langevin interaction drift."""

    def test_single_particle_matches_batch(self, rng):
        x = rng.normal(size=(6, 2))
        all_forces = repelling_forces(x, 0.7)
        np.testing.assert_allclose(repelling_force(x, 4, 0.7), all_forces[4])

    def test_zero_strength(self, rng):
        x = rng.normal(size=(5, 2))
        assert np.array_equal(repelling_forces(x, 0.0), np.zeros((5, 2)))

    def test_pair_repels(self):
        x = np.array([[0.0, 0.0], [1.0, 0.0]])
        forces = repelling_forces(x, 1.0)
        assert forces[0, 0] < 0 < forces[1, 0]
        np.testing.assert_allclose(forces[1, 0], 0.5 * np.exp(-0.5))

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            repelling_force(np.zeros((2, 2)), 2, 1.0)

    def test_quadratic_interaction_pulls_to_mean(self, rng):
        x = rng.normal(size=(8, 1))
        drift = interaction_drift(x, lambda z: z)
        np.testing.assert_allclose(drift, -(x - x.mean(axis=0)), atol=1e-14)


class TestSchedules:
    """Time-dependent coefficients."""

    def test_parse_kinds(self):
        assert Schedule.parse("linear:0:10")(0.5) == 5.0
        assert Schedule.parse("4")(123.0) == 4.0
        assert Schedule.parse(2.5).kind is ScheduleKind.CONSTANT
        assert Schedule.parse("invsq:1")(1.0) == 0.5
        assert Schedule.parse("expdecay:10:2.302585092994046")(1.0) == pytest.approx(1.0)

    def test_text_form(self):
        assert str(Schedule.parse("expdecay:10:2.5")) == "expdecay:10.0:2.5"
        assert Schedule.parse(str(Schedule.parse("linear:0:10"))) == Schedule.parse("linear:0:10")

    @pytest.mark.parametrize("text", ["cubic:1", "linear:1", "const:a", "fast"])
    def test_invalid(self, text):
        with pytest.raises(ValueError):
            Schedule.parse(text)

    def test_negative_schedule_rejected(self):
        with pytest.raises(ValueError, match="beta must be nonnegative"):
            SolverConfig(
                scheme="projection", alpha=1.0, beta="linear:1:-10", sigma="1",
                h=0.1, steps=10, particles=5, seed=0,
            )


class TestSolverConfig:
    """Validation and defaults."""

    def test_penalty_epsilon_defaults_to_h(self, ackley_cfg):
        assert ackley_cfg.penalty_epsilon == ackley_cfg.h

    def test_snapshot(self, ackley_cfg):
        snap = ackley_cfg.snapshot()
        assert snap["scheme"] == "projection"
        assert snap["beta"] == "const:1.0"
        assert snap["repelling"] == "off"

    @pytest.mark.parametrize(
        "field, value",
        [("alpha", -1.0), ("h", 0.0), ("steps", -1), ("particles", 0), ("seed", -3)],
    )
    def test_invalid_fields(self, field, value):
        kwargs = dict(
            scheme=Scheme.PENALTY, alpha=1.0, beta="1", sigma="1",
            h=0.1, steps=1, particles=2, seed=0,
        )
        kwargs[field] = value
        with pytest.raises(ValueError, match=field):
            SolverConfig(**kwargs)


class TestNoiseStream:
    """Counter-based random streams."""

    def test_same_key_same_numbers(self):
        a = NoiseStream(7, 3).normals(5, (4, 2))
        b = NoiseStream(7, 3).normals(5, (4, 2))
        assert np.array_equal(a, b)

    def test_keys_are_independent(self):
        base = NoiseStream(7, 3).normals(5, (4, 2))
        assert not np.array_equal(base, NoiseStream(7, 4).normals(5, (4, 2)))
        assert not np.array_equal(base, NoiseStream(7, 3).normals(6, (4, 2)))
        assert not np.array_equal(base, NoiseStream(8, 3).normals(5, (4, 2)))

    def test_row_prefix_is_stable(self):
        """Particle i reads row i whatever the ensemble size."""
        big = NoiseStream(1, 0).normals(2, (10, 3))
        small = NoiseStream(1, 0).normals(2, (4, 3))
        assert np.array_equal(big[:4], small)

    def test_child_seed(self):
        assert NoiseStream(1, 0).child_seed() == NoiseStream(1, 0).child_seed()
        assert NoiseStream(1, 0).child_seed() != NoiseStream(1, 1).child_seed()

    def test_negative_seed(self):
        with pytest.raises(ValueError):
            NoiseStream(-1)


class TestStepping:
    """One-step integrators."""

    def test_penalty_with_epsilon_h_equals_projection(self, unit_box):
        """With null coefficients both schemes map each particle to its projection."""
        obj = get_objective("quadratic", 2)
        ens = Ensemble(np.array([[1.5, -2.25], [0.5, 0.5], [-3.0, 0.75], [0.25, 4.0]]))
        noise = NoiseStream(0)
        penalty = cbo_step_penalty(ens, _frozen_cfg(Scheme.PENALTY), obj, unit_box, noise)
        projection = cbo_step_projection(
            ens, _frozen_cfg(Scheme.PROJECTION), obj, unit_box, noise
        )
        assert np.array_equal(penalty.positions, projection.positions)
        assert np.array_equal(projection.positions, unit_box.project(ens.positions))

    def test_penalty_corrects_pre_step_positions(self, unit_box):
        """Penalty uses π(Y_k); projection clips the predictor. With drift they differ."""
        obj = get_objective("constant", 2)
        ens = Ensemble(np.array([[1.5, 0.0], [-1.5, 0.0], [0.0, 1.5], [0.0, -1.5]]))
        kwargs = dict(alpha=1.0, beta="2", sigma="0", h=0.25, steps=1, particles=4, seed=0)
        noise = NoiseStream(0)
        penalty = cbo_step_penalty(
            ens, SolverConfig(scheme=Scheme.PENALTY, **kwargs), obj, unit_box, noise
        )
        projection = cbo_step_projection(
            ens, SolverConfig(scheme=Scheme.PROJECTION, **kwargs), obj, unit_box, noise
        )
        # consensus is the origin; the predictor halves every position
        np.testing.assert_allclose(
            penalty.positions, [[0.25, 0.0], [-0.25, 0.0], [0.0, 0.25], [0.0, -0.25]]
        )
        np.testing.assert_allclose(
            projection.positions, [[0.75, 0.0], [-0.75, 0.0], [0.0, 0.75], [0.0, -0.75]]
        )

    def test_penalty_lets_predictor_leave_domain(self, unit_box):
        obj = get_objective("constant", 2)
        ens = Ensemble(np.array([[0.9, 0.0], [-0.9, 0.0], [0.0, 0.9], [0.0, -0.9]]))
        kwargs = dict(alpha=1.0, beta="12", sigma="0", h=0.25, steps=1, particles=4, seed=0)
        penalty = cbo_step_penalty(
            ens, SolverConfig(scheme=Scheme.PENALTY, **kwargs), obj, unit_box, NoiseStream(0)
        )
        projection = cbo_step_projection(
            ens, SolverConfig(scheme=Scheme.PROJECTION, **kwargs), obj, unit_box, NoiseStream(0)
        )
        np.testing.assert_allclose(penalty.positions, -2.0 * ens.positions)
        assert not np.any(unit_box.contains(penalty.positions))
        np.testing.assert_allclose(projection.positions, unit_box.project(-2.0 * ens.positions))

    def test_noisy_ackley_schemes_differ(self, ackley_ball):
        obj = get_objective("ackley")
        kwargs = dict(alpha=1e4, beta="1", sigma="4", h=0.2, steps=5, particles=50, seed=3)
        penalty = run_cbo(SolverConfig(scheme=Scheme.PENALTY, **kwargs), obj, ackley_ball)
        projection = run_cbo(SolverConfig(scheme=Scheme.PROJECTION, **kwargs), obj, ackley_ball)
        gap = np.abs(penalty.ensemble.positions - projection.ensemble.positions).max()
        assert gap > 1e-6

    def test_scheme_mismatch(self, unit_box):
        obj = get_objective("quadratic", 2)
        ens = Ensemble(np.zeros((4, 2)))
        with pytest.raises(ValueError, match="scheme"):
            cbo_step_penalty(ens, _frozen_cfg(Scheme.PROJECTION), obj, unit_box, NoiseStream(0))

    def test_step_advances_time(self, unit_ball):
        obj = get_objective("quadratic", 2)
        cfg = _frozen_cfg(Scheme.PROJECTION)
        ens = cbo_step_projection(Ensemble(np.zeros((4, 2))), cfg, obj, unit_ball, NoiseStream(0))
        assert ens.step == 1
        assert ens.time == 0.25

    def test_blow_up_raises(self, unit_ball):
        cfg = SolverConfig(
            scheme="penalty", alpha=1.0, beta="1e308", sigma="0",
            h=10.0, steps=3, particles=20, seed=0,
        )
        with pytest.raises(NonFiniteError) as exc_info:
            run_cbo(cfg, get_objective("quadratic", 2), unit_ball)
        assert exc_info.value.step == 1


class TestRunner:
    """Run loops and reproducibility."""

    def test_ackley_projection_run(self, ackley_cfg, ackley_ball):
        result = run_cbo(ackley_cfg, get_objective("ackley"), ackley_ball, record_trace=True)
        assert result.trace is not None
        assert result.trace.shape == (ackley_cfg.steps + 1, 2)
        assert result.ensemble.time == pytest.approx(1.0)
        assert np.linalg.norm(result.consensus - [2.0, 2.0]) <= 0.1
        assert result.value == pytest.approx(float(get_objective("ackley")(result.consensus)))

    def test_reproducible(self, ackley_cfg, ackley_ball):
        obj = get_objective("ackley")
        a = run_cbo(ackley_cfg, obj, ackley_ball, replicate=3)
        b = run_cbo(ackley_cfg, obj, ackley_ball, replicate=3)
        c = run_cbo(ackley_cfg, obj, ackley_ball, replicate=4)
        assert np.array_equal(a.ensemble.positions, b.ensemble.positions)
        assert not np.array_equal(a.ensemble.positions, c.ensemble.positions)

    def test_iterate_yields_every_state(self, ackley_cfg, ackley_ball):
        states = list(iterate_cbo(ackley_cfg, get_objective("ackley"), ackley_ball))
        assert [ens.step for ens, _ in states] == list(range(ackley_cfg.steps + 1))
        for ens, _ in states:
            assert np.all(ackley_ball.contains(ens.positions))

    def test_dimension_mismatch(self, ackley_cfg):
        with pytest.raises(ValueError, match="does not match"):
            run_cbo(ackley_cfg, get_objective("ackley"), Ball(np.zeros(3), 1.0))

    def test_repelling_run_stays_feasible(self, ackley_ball):
        cfg = SolverConfig(
            scheme=Scheme.PROJECTION, alpha=1e4, beta="1", sigma="4",
            h=0.05, steps=20, particles=20, seed=1, repelling="invsq:1",
        )
        result = run_cbo(cfg, get_objective("rosenbrock"), ackley_ball)
        assert ackley_ball.contains(result.consensus)

    def test_langevin_observer(self):
        dom = Box(np.array([-1.0]), np.array([1.0]))
        cfg = LangevinConfig(
            sigma_noise=1.0, h=1e-3, steps=50, particles=100, seed=0,
            grad_U=lambda x: 2.0 * x, grad_V=lambda z: 0.2 * z,
        )
        seen = []
        final = run_langevin(cfg, dom, observer=lambda ens: seen.append(ens.step))
        assert seen == list(range(51))
        assert np.all(dom.contains(final.positions))


class TestEnsemble:
    """Ensemble state."""

    def test_variance(self):
        ens = Ensemble(np.array([[0.0, 0.0], [2.0, 0.0]]))
        assert ens.variance() == 1.0
        assert ens.size == 2 and ens.dimension == 2

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="finite"):
            Ensemble(np.array([[np.inf, 0.0]]))
