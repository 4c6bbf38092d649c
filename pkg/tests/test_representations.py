from __future__ import annotations

import numpy as np
import pytest

from samlfd import (
    BoundaryConstraint,
    DMPConfig,
    DMPModel,
    JAModel,
    LTEModel,
    Trajectory,
    ValidationError,
    dmp_fit,
    dmp_reproduce,
    ja_reproduce,
    lte_reproduce,
)
from samlfd.metrics import curvature_comparison, endpoint_convergence
from samlfd.representations import (
    REPRESENTATION_ORDER,
    build_reproducers,
    order_labels,
    second_difference_matrix,
    third_difference_matrix,
)


def rms(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.sum((a - b) ** 2, axis=1))))


def gentle_arc(samples: int = 100) -> Trajectory:
    t = np.linspace(0.0, 1.0, samples)
    return Trajectory(np.stack([t, 0.3 * np.sin(np.pi * t)], axis=1))


def straight_line(samples: int = 100) -> Trajectory:
    t = np.linspace(0.0, 1.0, samples)
    return Trajectory(np.stack([t, np.zeros(samples)], axis=1))


# ---------------------------------------------------------------------------
# Operators


class TestDifferenceOperators:
    def test_second_difference_rows(self):
        L = second_difference_matrix(6)
        assert L.shape == (4, 6)
        assert np.array_equal(L[1], [0.0, 1.0, -2.0, 1.0, 0.0, 0.0])

    def test_second_difference_annihilates_lines(self):
        L = second_difference_matrix(10)
        line = np.outer(np.arange(10.0), [1.0, -2.0]) + np.array([3.0, 4.0])
        assert np.allclose(L @ line, 0.0, atol=1e-12)

    def test_third_difference_rows_and_scaling(self):
        h = 0.5
        D3 = third_difference_matrix(5, h)
        assert D3.shape == (2, 5)
        assert np.allclose(D3[0], np.array([-1.0, 3.0, -3.0, 1.0, 0.0]) / h**3)

    def test_third_difference_annihilates_quadratics(self):
        D3 = third_difference_matrix(12, 0.1)
        t = np.arange(12.0)
        quad = np.stack([t**2, 1.0 + 2.0 * t - 3.0 * t**2], axis=1)
        assert np.allclose(D3 @ quad, 0.0, atol=1e-8)


# ---------------------------------------------------------------------------
# Laplacian trajectory editing


class TestLTE:
    def test_delta_of_straight_line_is_zero(self):
        model = LTEModel.fit(straight_line())
        assert np.allclose(model.delta, 0.0, atol=1e-15)

    def test_identity_when_constrained_at_demo_endpoints(self, corpus):
        for demo in corpus.values():
            model = LTEModel.fit(demo)
            out = lte_reproduce(model, BoundaryConstraint.both(demo.initial, demo.final))
            assert np.abs(out.samples - demo.samples).max() < 1e-9

    def test_straight_line_generalization_matches_lstsq_oracle(self):
        demo = straight_line()
        model = LTEModel.fit(demo)
        new_start = np.array([0.0, 1.0])
        new_goal = np.array([1.0, 2.0])
        out = lte_reproduce(model, BoundaryConstraint.both(new_start, new_goal))
        # Oracle: dense least squares on the stacked operator + selector rows.
        T = len(demo)
        selectors = np.zeros((2, T))
        selectors[0, 0] = 1.0
        selectors[1, -1] = 1.0
        stacked = np.vstack([model.laplacian, selectors])
        rhs = np.vstack([model.delta, new_start, new_goal])
        oracle, *_ = np.linalg.lstsq(stacked, rhs, rcond=None)
        assert np.abs(out.samples - oracle).max() < 1e-8
        # The analytic answer is the straight line between the new endpoints.
        line = np.linspace(new_start, new_goal, T)
        assert np.abs(out.samples - line).max() < 1e-8

    def test_translation_equivariance(self, s_curve):
        model = LTEModel.fit(s_curve)
        shift = np.array([0.7, -1.3])
        base = lte_reproduce(model, BoundaryConstraint.both(s_curve.initial + 0.2, s_curve.final))
        moved = lte_reproduce(
            model, BoundaryConstraint.both(s_curve.initial + 0.2 + shift, s_curve.final + shift)
        )
        assert np.abs(moved.samples - (base.samples + shift)).max() < 1e-9

    def test_single_endpoint_defaults_other_to_demo(self, s_curve):
        model = LTEModel.fit(s_curve)
        out = lte_reproduce(model, BoundaryConstraint.initial(s_curve.initial + 0.3))
        assert np.allclose(out.samples[-1], s_curve.final)

    def test_output_has_demo_length_and_dims(self, corpus):
        for demo in corpus.values():
            out = lte_reproduce(LTEModel.fit(demo), BoundaryConstraint.initial(demo.initial + 0.1))
            assert len(out) == len(demo) and out.dims == demo.dims


# ---------------------------------------------------------------------------
# Jerk-accuracy model


def ja_kkt_oracle(demo: Trajectory, accuracy_weight: float, start, goal) -> np.ndarray:
    """Equality-constrained quadratic minimum via a dense KKT solve."""
    T = len(demo)
    D3 = third_difference_matrix(T, demo.step)
    weight = accuracy_weight**6 * demo.step
    hessian = 2.0 * (D3.T @ D3 + weight * np.eye(T))
    constraints = np.zeros((2, T))
    constraints[0, 0] = 1.0
    constraints[1, -1] = 1.0
    kkt = np.block([[hessian, constraints.T], [constraints, np.zeros((2, 2))]])
    rhs = np.vstack([2.0 * weight * demo.samples, np.asarray(start)[None, :], np.asarray(goal)[None, :]])
    solution = np.linalg.solve(kkt, rhs)
    return solution[:T]


class TestJA:
    def test_rejects_nonpositive_weight(self, s_curve):
        with pytest.raises(ValidationError):
            JAModel.fit(s_curve, accuracy_weight=0.0)

    def test_matches_kkt_oracle(self, s_curve):
        model = JAModel.fit(s_curve, accuracy_weight=15.0)
        start = s_curve.initial + np.array([0.2, -0.1])
        out = ja_reproduce(model, BoundaryConstraint.initial(start))
        oracle = ja_kkt_oracle(s_curve, 15.0, start, s_curve.final)
        assert np.abs(out.samples - oracle).max() < 1e-7

    def test_demo_endpoints_close_to_demo_at_moderate_weight(self):
        demo = gentle_arc()
        model = JAModel.fit(demo, accuracy_weight=10.0)
        out = ja_reproduce(model, BoundaryConstraint.both(demo.initial, demo.final))
        assert rms(out.samples, demo.samples) < 0.01 * demo.bbox_diagonal()

    def test_rms_monotone_decreasing_in_weight(self, s_curve):
        errors = []
        for weight in (1.0, 10.0, 100.0):
            model = JAModel.fit(s_curve, accuracy_weight=weight)
            out = ja_reproduce(model, BoundaryConstraint.both(s_curve.initial, s_curve.final))
            errors.append(rms(out.samples, s_curve.samples))
        assert errors[0] > errors[1] > errors[2]

    def test_convergence_from_shifted_start(self):
        demo = straight_line()
        model = JAModel.fit(demo)
        out = ja_reproduce(model, BoundaryConstraint.initial(demo.initial + np.array([0.03, 0.04])))
        tail = slice(80, None)
        deviation = np.linalg.norm(out.samples[tail] - demo.samples[tail], axis=1).max()
        assert deviation < 1e-3

    def test_endpoints_satisfied_exactly(self, s_curve):
        model = JAModel.fit(s_curve)
        start = s_curve.initial + 0.25
        out = ja_reproduce(model, BoundaryConstraint.initial(start))
        assert np.array_equal(out.samples[0], start)
        assert np.array_equal(out.samples[-1], s_curve.final)

    def test_translation_equivariance(self, s_curve):
        # The accuracy term anchors to the demonstration, so equivariance
        # holds when the demonstration shifts together with the constraints.
        shift = np.array([-2.0, 0.5])
        base = ja_reproduce(
            JAModel.fit(s_curve), BoundaryConstraint.both(s_curve.initial + 0.1, s_curve.final)
        )
        moved = ja_reproduce(
            JAModel.fit(s_curve.translated(shift)),
            BoundaryConstraint.both(s_curve.initial + 0.1 + shift, s_curve.final + shift),
        )
        assert np.abs(moved.samples - (base.samples + shift)).max() < 1e-6


# ---------------------------------------------------------------------------
# Dynamic movement primitives


class TestDMP:
    def test_critical_damping(self, s_curve):
        model = dmp_fit(s_curve, DMPConfig(stiffness=64.0))
        assert model.damping == pytest.approx(2.0 * np.sqrt(64.0), abs=0.0)

    def test_self_reconstruction(self, corpus):
        for name, demo in corpus.items():
            model = dmp_fit(demo)
            out = dmp_reproduce(model, BoundaryConstraint.both(demo.initial, demo.final))
            assert rms(out.samples, demo.samples) < 0.03 * demo.bbox_diagonal(), name

    def test_constant_demo_stays_at_point(self):
        point = np.array([1.5, -2.0])
        demo = Trajectory(np.tile(point, (50, 1)))
        with pytest.warns(UserWarning, match="degenerate"):
            model = dmp_fit(demo, DMPConfig(num_basis=10))
        assert np.abs(model.weights).max() < 1e-12
        out = dmp_reproduce(model, BoundaryConstraint.both(point, point))
        assert np.abs(out.samples - point).max() < 1e-12

    def test_goal_convergence_from_displaced_starts(self, s_curve, rng):
        model = dmp_fit(s_curve)
        bbox = s_curve.bbox_diagonal()
        extent = 0.25 * bbox
        for _ in range(20):
            start = s_curve.initial + rng.uniform(-extent, extent, size=2)
            out = dmp_reproduce(model, BoundaryConstraint.initial(start))
            assert np.linalg.norm(out.samples[-1] - s_curve.final) < 0.01 * bbox

    def test_translation_equivariance(self, s_curve):
        model = dmp_fit(s_curve)
        shift = np.array([0.4, 0.9])
        base = dmp_reproduce(model, BoundaryConstraint.both(s_curve.initial, s_curve.final))
        moved = dmp_reproduce(
            model, BoundaryConstraint.both(s_curve.initial + shift, s_curve.final + shift)
        )
        assert np.abs(moved.samples - (base.samples + shift)).max() < 1e-6

    def test_more_basis_functions_fit_tighter(self, s_curve):
        coarse = dmp_fit(s_curve, DMPConfig(num_basis=5))
        fine = dmp_fit(s_curve, DMPConfig(num_basis=50))

        def regression_residual(model: DMPModel) -> float:
            demo = model.demo
            h = demo.step
            tau = model.tau
            phase = (1.0 - h * model.canonical_decay / tau) ** np.arange(len(demo))
            velocity = np.zeros_like(demo.samples)
            velocity[1:] = tau * np.diff(demo.samples, axis=0) / h
            scaled_accel = tau * np.diff(velocity, axis=0) / h
            target = (
                (scaled_accel + model.damping * velocity[:-1]) / model.stiffness
                - (demo.final - demo.samples[:-1])
                + np.outer(phase[:-1], demo.final - demo.initial)
            )
            fitted = np.array([
                np.exp(-model.basis_widths * (s - model.basis_centers) ** 2) @ model.weights
                * s
                / np.exp(-model.basis_widths * (s - model.basis_centers) ** 2).sum()
                for s in phase[:-1]
            ])
            return float(np.linalg.norm(fitted - target))

        assert regression_residual(fine) < regression_residual(coarse)

    def test_warns_when_fewer_samples_than_basis(self):
        t = np.linspace(0.0, 1.0, 20)
        demo = Trajectory(np.stack([t, t**2], axis=1))
        with pytest.warns(UserWarning, match="basis"):
            dmp_fit(demo, DMPConfig(num_basis=40))

    def test_determinism(self, s_curve):
        a = dmp_reproduce(dmp_fit(s_curve), BoundaryConstraint.initial(s_curve.initial + 0.2))
        b = dmp_reproduce(dmp_fit(s_curve), BoundaryConstraint.initial(s_curve.initial + 0.2))
        assert np.array_equal(a.samples, b.samples)

    def test_missing_endpoint_defaults_to_demo(self, s_curve):
        model = dmp_fit(s_curve)
        out = dmp_reproduce(model, BoundaryConstraint.final(s_curve.final + 0.2))
        assert np.array_equal(out.samples[0], s_curve.initial)


# ---------------------------------------------------------------------------
# Cross-representation behavior


class TestBehavioralContrast:
    def test_shape_preservation_vs_convergence_dichotomy(self, s_curve):
        """From a displaced start, the Laplacian edit tracks the demo's
        curvature profile better while the jerk-accuracy model's tail hugs
        the demonstration tighter."""
        displaced = s_curve.initial + np.array([0.5, 0.3])
        constraint = BoundaryConstraint.initial(displaced)
        lte_out = lte_reproduce(LTEModel.fit(s_curve), constraint)
        ja_out = ja_reproduce(JAModel.fit(s_curve), constraint)

        lte_curats = curvature_comparison(lte_out, s_curve)
        ja_curats = curvature_comparison(ja_out, s_curve)
        assert lte_curats < ja_curats

        lte_tail = endpoint_convergence(lte_out, s_curve)
        ja_tail = endpoint_convergence(ja_out, s_curve)
        assert ja_tail < lte_tail


class TestRegistry:
    def test_order_labels_canonicalizes(self):
        assert order_labels(["dmp", "ja"]) == ("ja", "dmp")
        assert order_labels(["lte", "lte"]) == ("lte",)

    def test_order_labels_rejects_unknown(self):
        with pytest.raises(ValidationError):
            order_labels(["ja", "promp"])

    def test_reproducers_all_same_length(self, s_curve):
        constraint = BoundaryConstraint.initial(s_curve.initial + 0.1)
        for label, reproduce in build_reproducers(s_curve).items():
            out = reproduce(constraint)
            assert len(out) == len(s_curve), label
            assert out.dims == s_curve.dims

    def test_full_order(self):
        assert REPRESENTATION_ORDER == ("ja", "lte", "dmp")
