"""Single-demonstration trajectory representations.

Three representations with deliberately different reproduction behavior:

* ``lte`` edits the curve's second-difference (Laplacian) coordinates, so it
  preserves the demonstrated shape and does not try to rejoin the original
  path after an endpoint moves.
* ``ja`` minimizes integrated squared jerk plus a weighted deviation from the
  demonstration, so reproductions from a displaced endpoint converge back to
  the demonstrated path quickly.
* ``dmp`` drives a critically damped attractor toward the goal, perturbed by
  a phase-indexed forcing term learned from the demonstration.

All reproducers take a fitted model plus a :class:`BoundaryConstraint` and
return a trajectory of exactly the demonstration's length and dimension. An
unpinned endpoint defaults to the demonstration's own endpoint, which keeps
every reproducer translation-equivariant and the constrained linear systems
square and consistent.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_banded

from .errors import ComputationError, ValidationError
from .trajectory import BoundaryConstraint, Trajectory

JA_LABEL = "ja"
LTE_LABEL = "lte"
DMP_LABEL = "dmp"

# Canonical precedence order; exact ties anywhere in the engine resolve
# toward the earlier label.
REPRESENTATION_ORDER: tuple[str, ...] = (JA_LABEL, LTE_LABEL, DMP_LABEL)

Reproducer = Callable[[BoundaryConstraint], Trajectory]


def second_difference_matrix(length: int) -> np.ndarray:
    """(T-2) x T operator whose interior rows are [..., 1, -2, 1, ...]."""
    if length < 3:
        raise ValidationError(f"need at least 3 samples for second differences, got {length}")
    rows = length - 2
    mat = np.zeros((rows, length))
    idx = np.arange(rows)
    mat[idx, idx] = 1.0
    mat[idx, idx + 1] = -2.0
    mat[idx, idx + 2] = 1.0
    return mat


def third_difference_matrix(length: int, step: float) -> np.ndarray:
    """(T-3) x T operator whose rows are [..., -1, 3, -3, 1, ...] / step**3."""
    if length < 4:
        raise ValidationError(f"need at least 4 samples for third differences, got {length}")
    rows = length - 3
    mat = np.zeros((rows, length))
    idx = np.arange(rows)
    mat[idx, idx] = -1.0
    mat[idx, idx + 1] = 3.0
    mat[idx, idx + 2] = -3.0
    mat[idx, idx + 3] = 1.0
    return mat / step**3


# ---------------------------------------------------------------------------
# Laplacian trajectory editing


@dataclass(frozen=True, eq=False)
class LTEModel:
    """Demonstration encoded as Laplacian (second-difference) coordinates."""

    demo: Trajectory
    laplacian: np.ndarray
    delta: np.ndarray

    @classmethod
    def fit(cls, demo: Trajectory) -> "LTEModel":
        laplacian = second_difference_matrix(len(demo))
        return cls(demo=demo, laplacian=laplacian, delta=laplacian @ demo.samples)


def lte_reproduce(model: LTEModel, constraint: BoundaryConstraint) -> Trajectory:
    """Reproduce by preserving Laplacian coordinates under endpoint constraints.

    With both endpoints pinned the stacked system (operator rows plus
    constraint rows) is square and consistent, so it is solved exactly by
    eliminating the endpoint unknowns; the interior system is tridiagonal.
    """
    demo = model.demo
    start, goal = constraint.resolve(demo)
    T = len(demo)
    # Interior of the second-difference operator in banded storage.
    bands = np.zeros((3, T - 2))
    bands[0, 1:] = 1.0
    bands[1, :] = -2.0
    bands[2, :-1] = 1.0
    rhs = model.delta.copy()
    rhs[0] -= start
    rhs[-1] -= goal
    interior = solve_banded((1, 1), bands, rhs)
    if not np.isfinite(interior).all():
        raise ComputationError("Laplacian edit solve produced non-finite values")
    return Trajectory(np.vstack([start, interior, goal]), demo.duration)


# ---------------------------------------------------------------------------
# Jerk-accuracy minimization


@dataclass(frozen=True, eq=False)
class JAModel:
    """Jerk-accuracy trade-off model.

    ``accuracy_weight`` is the multiplier lambda: reproductions minimize
    ``||D3 X||^2 + lambda**6 * h * ||X - demo||^2`` over curves with pinned
    endpoints, where D3 holds third finite differences scaled by 1/h**3.
    Larger lambda pulls the reproduction toward the demonstration.
    """

    demo: Trajectory
    accuracy_weight: float
    jerk_operator: np.ndarray
    # Solver cache: the objective's Hessian is fixed per model, so the
    # interior block is factored once and reused for every constraint.
    _interior_factor: tuple = field(repr=False, default=None)
    _boundary_columns: np.ndarray = field(repr=False, default=None)
    _demo_pull: np.ndarray = field(repr=False, default=None)

    @classmethod
    def fit(cls, demo: Trajectory, accuracy_weight: float = 20.0) -> "JAModel":
        if not (np.isfinite(accuracy_weight) and accuracy_weight > 0):
            raise ValidationError(f"accuracy weight must be positive, got {accuracy_weight}")
        operator = third_difference_matrix(len(demo), demo.step)
        lam6h = float(accuracy_weight) ** 6 * demo.step
        hessian = operator.T @ operator
        hessian[np.diag_indices(len(demo))] += lam6h
        try:
            factor = cho_factor(hessian[1:-1, 1:-1])
        except np.linalg.LinAlgError as exc:  # pragma: no cover - SPD by construction
            raise ComputationError(f"jerk-accuracy system is not positive definite: {exc}") from exc
        return cls(
            demo=demo,
            accuracy_weight=float(accuracy_weight),
            jerk_operator=operator,
            _interior_factor=factor,
            _boundary_columns=hessian[1:-1, [0, -1]].copy(),
            _demo_pull=lam6h * demo.samples[1:-1],
        )


def ja_reproduce(model: JAModel, constraint: BoundaryConstraint) -> Trajectory:
    """Minimize the jerk-accuracy objective subject to pinned endpoints."""
    demo = model.demo
    start, goal = constraint.resolve(demo)
    rhs = (
        model._demo_pull
        - np.outer(model._boundary_columns[:, 0], start)
        - np.outer(model._boundary_columns[:, 1], goal)
    )
    interior = cho_solve(model._interior_factor, rhs)
    if not np.isfinite(interior).all():
        raise ComputationError(
            "jerk-accuracy solve produced non-finite values; the system is "
            "ill-conditioned for this accuracy weight"
        )
    return Trajectory(np.vstack([start, interior, goal]), demo.duration)


# ---------------------------------------------------------------------------
# Dynamic movement primitives


@dataclass(frozen=True)
class DMPConfig:
    """Attractor and canonical-system parameters.

    Damping is always ``2 * sqrt(stiffness)`` (critical damping). The phase
    decays as ``tau * s' = -canonical_decay * s`` from 1 toward 0; tau
    defaults to the demonstration's duration at fit time.
    """

    stiffness: float = 100.0
    canonical_decay: float = 6.0
    num_basis: int = 50
    tau: float | None = None

    def __post_init__(self) -> None:
        if not (np.isfinite(self.stiffness) and self.stiffness > 0):
            raise ValidationError(f"stiffness must be positive, got {self.stiffness}")
        if not (np.isfinite(self.canonical_decay) and self.canonical_decay > 0):
            raise ValidationError(f"canonical decay must be positive, got {self.canonical_decay}")
        if int(self.num_basis) != self.num_basis or self.num_basis < 2:
            raise ValidationError(f"num_basis must be an integer >= 2, got {self.num_basis}")
        if self.tau is not None and not (np.isfinite(self.tau) and self.tau > 0):
            raise ValidationError(f"tau must be positive, got {self.tau}")


@dataclass(frozen=True, eq=False)
class DMPModel:
    demo: Trajectory
    stiffness: float
    damping: float
    canonical_decay: float
    tau: float
    basis_centers: np.ndarray
    basis_widths: np.ndarray
    weights: np.ndarray

    @property
    def num_basis(self) -> int:
        return self.basis_centers.size


def _phase_sequence(length: int, step: float, decay: float, tau: float) -> np.ndarray:
    """Phase values produced by the Euler recurrence s += -h * decay * s / tau."""
    factor = 1.0 - step * decay / tau
    if factor <= 0.0:
        raise ComputationError(
            f"canonical system unstable at step {step:g}: decay {decay:g} needs a "
            f"step below {tau / decay:g}"
        )
    return factor ** np.arange(length)


def _basis(decay: float, num_basis: int) -> tuple[np.ndarray, np.ndarray]:
    # Centers follow the phase of uniformly spaced times; widths make adjacent
    # Gaussians cross at ~0.5 activation.
    centers = np.exp(-decay * np.linspace(0.0, 1.0, num_basis))
    widths = np.empty(num_basis)
    gaps = np.diff(centers)
    widths[:-1] = 4.0 * np.log(2.0) / gaps**2
    widths[-1] = widths[-2]
    return centers, widths


def dmp_fit(demo: Trajectory, config: DMPConfig | None = None) -> DMPModel:
    """Learn forcing-term weights by locally weighted regression.

    The forcing target is derived from finite differences of the (already
    smoothed) demonstration using the same discrete recurrence the reproducer
    integrates, so reproducing from the demonstration's own endpoints recovers
    it up to the regression residual.
    """
    config = config or DMPConfig()
    T = len(demo)
    if T < config.num_basis:
        warnings.warn(
            f"demonstration has {T} samples but {config.num_basis} basis functions; "
            "the regression may be underdetermined",
            stacklevel=2,
        )
    K = float(config.stiffness)
    D = 2.0 * np.sqrt(K)
    tau = float(config.tau if config.tau is not None else demo.duration)
    h = demo.step
    phase = _phase_sequence(T, h, config.canonical_decay, tau)
    centers, widths = _basis(config.canonical_decay, config.num_basis)

    x = demo.samples
    start, goal = x[0], x[-1]
    if demo.bbox_diagonal() == 0.0:
        warnings.warn("degenerate demonstration with zero displacement; forcing term is zero", stacklevel=2)
    velocity = np.zeros_like(x)
    velocity[1:] = tau * np.diff(x, axis=0) / h
    # tau * dv/dt, i.e. tau**2 * xdd in demonstration coordinates.
    scaled_accel = tau * np.diff(velocity, axis=0) / h
    s_fit = phase[:-1]
    f_target = (
        (scaled_accel + D * velocity[:-1]) / K
        - (goal - x[:-1])
        + np.outer(s_fit, goal - start)
    )

    activations = np.exp(-widths * (s_fit[:, None] - centers[None, :]) ** 2)
    numerator = activations.T @ (s_fit[:, None] * f_target)
    denominator = activations.T @ (s_fit**2)
    denominator = np.maximum(denominator, np.finfo(float).tiny)
    weights = numerator / denominator[:, None]
    return DMPModel(
        demo=demo,
        stiffness=K,
        damping=D,
        canonical_decay=float(config.canonical_decay),
        tau=tau,
        basis_centers=centers,
        basis_widths=widths,
        weights=weights,
    )


def dmp_forcing(model: DMPModel, s: float) -> np.ndarray:
    """Normalized basis mix scaled by the phase."""
    activations = np.exp(-model.basis_widths * (s - model.basis_centers) ** 2)
    return (activations @ model.weights) * s / np.sum(activations)


def dmp_reproduce(model: DMPModel, constraint: BoundaryConstraint) -> Trajectory:
    """Integrate the attractor system from a new start and/or goal.

    Euler integration at the demonstration's native step; the velocity update
    feeds the position update within each step, matching the recurrence the
    forcing term was fitted against.
    """
    demo = model.demo
    start, goal = constraint.resolve(demo)
    T = len(demo)
    h = demo.step
    K, D, tau = model.stiffness, model.damping, model.tau
    # Validates the step/decay combination before integrating.
    _phase_sequence(2, h, model.canonical_decay, tau)

    x = np.empty((T, demo.dims))
    x[0] = start
    v = np.zeros(demo.dims)
    s = 1.0
    for k in range(T - 1):
        f = dmp_forcing(model, s)
        acc = (K * (goal - x[k]) - D * v - K * (goal - start) * s + K * f) / tau
        v = v + h * acc
        x[k + 1] = x[k] + h * v / tau
        s = s - h * model.canonical_decay * s / tau
    if not np.isfinite(x).all():
        raise ComputationError(
            f"attractor integration diverged at step {h:g}; decrease the step "
            "(more samples) or the stiffness"
        )
    return Trajectory(x, demo.duration)


# ---------------------------------------------------------------------------
# Registry


@dataclass(frozen=True)
class RepresentationConfig:
    """Per-representation parameters, shared by the engine, CLI, and service."""

    ja_accuracy_weight: float = 20.0
    dmp: DMPConfig = field(default_factory=DMPConfig)


def order_labels(labels) -> tuple[str, ...]:
    """Deduplicate and sort labels into canonical precedence order."""
    requested = list(dict.fromkeys(labels))
    if not requested:
        raise ValidationError("at least one representation label is required")
    unknown = [label for label in requested if label not in REPRESENTATION_ORDER]
    if unknown:
        raise ValidationError(
            f"unknown representation labels {unknown}; known labels: {list(REPRESENTATION_ORDER)}"
        )
    return tuple(label for label in REPRESENTATION_ORDER if label in requested)


def build_reproducers(
    demo: Trajectory,
    labels=REPRESENTATION_ORDER,
    config: RepresentationConfig | None = None,
) -> Mapping[str, Reproducer]:
    """Fit one model per label and return pure reproduction callables.

    Models are immutable after fitting; the callables are safe to share
    across worker threads. Mapping order is the tie-breaking precedence.
    """
    config = config or RepresentationConfig()
    reproducers: dict[str, Reproducer] = {}
    for label in order_labels(labels):
        if label == JA_LABEL:
            ja_model = JAModel.fit(demo, accuracy_weight=config.ja_accuracy_weight)
            reproducers[label] = lambda c, _m=ja_model: ja_reproduce(_m, c)
        elif label == LTE_LABEL:
            lte_model = LTEModel.fit(demo)
            reproducers[label] = lambda c, _m=lte_model: lte_reproduce(_m, c)
        else:
            dmp_model = dmp_fit(demo, config.dmp)
            reproducers[label] = lambda c, _m=dmp_model: dmp_reproduce(_m, c)
    return reproducers
