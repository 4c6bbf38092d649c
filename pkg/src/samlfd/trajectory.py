"""Trajectory container, boundary constraints, and the preprocessing pipeline.

A trajectory is an ordered sequence of T >= 2 samples in 2-D or 3-D workspace
coordinates with uniform time indexing: sample t corresponds to time
t * duration / (T - 1). Every ingested demonstration is smoothed and resampled
through :func:`preprocess` before any representation or metric sees it, so the
rest of the package can assume equal-length, noise-filtered curves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NonFiniteValueError, ValidationError

SUPPORTED_DIMS = (2, 3)

# Default ingestion pipeline: centered moving average then linear resampling.
# Index-aligned metrics need equal-length curves; 100 matches typical
# handwriting-dataset sampling density.
DEFAULT_SMOOTH_WINDOW = 5
DEFAULT_RESAMPLE_LEN = 100


def _validated_samples(samples) -> np.ndarray:
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2:
        raise ValidationError(f"samples must be a T x n array, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise ValidationError(f"a trajectory needs at least 2 samples, got {arr.shape[0]}")
    if arr.shape[1] not in SUPPORTED_DIMS:
        raise DimensionMismatchError(
            f"sample dimension must be one of {SUPPORTED_DIMS}, got {arr.shape[1]}"
        )
    if not np.isfinite(arr).all():
        raise NonFiniteValueError("trajectory contains NaN or infinite coordinates")
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Immutable T x n sample sequence with uniform time indexing."""

    samples: np.ndarray
    duration: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", _validated_samples(self.samples))
        if not (np.isfinite(self.duration) and self.duration > 0):
            raise ValidationError(f"duration must be positive and finite, got {self.duration}")
        object.__setattr__(self, "duration", float(self.duration))

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def dims(self) -> int:
        return self.samples.shape[1]

    @property
    def initial(self) -> np.ndarray:
        return self.samples[0]

    @property
    def final(self) -> np.ndarray:
        return self.samples[-1]

    @property
    def step(self) -> float:
        """Time between consecutive samples."""
        return self.duration / (len(self) - 1)

    def bbox_diagonal(self) -> float:
        """Length of the axis-aligned bounding-box diagonal (scale reference)."""
        return float(np.linalg.norm(self.samples.max(axis=0) - self.samples.min(axis=0)))

    def translated(self, offset) -> "Trajectory":
        return Trajectory(self.samples + np.asarray(offset, dtype=float), self.duration)


@dataclass(frozen=True, eq=False)
class BoundaryConstraint:
    """Which endpoints of a reproduction are pinned, and where.

    At least one endpoint must be given. When a representation needs both
    endpoints, the missing one defaults to the demonstration's own endpoint.
    """

    initial_point: np.ndarray | None = None
    final_point: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.initial_point is None and self.final_point is None:
            raise ValidationError("constraint must pin at least one endpoint")
        for name in ("initial_point", "final_point"):
            value = getattr(self, name)
            if value is None:
                continue
            arr = np.asarray(value, dtype=float).reshape(-1)
            if arr.size not in SUPPORTED_DIMS:
                raise DimensionMismatchError(f"{name} must be a 2- or 3-vector, got size {arr.size}")
            if not np.isfinite(arr).all():
                raise NonFiniteValueError(f"{name} contains non-finite values")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if (
            self.initial_point is not None
            and self.final_point is not None
            and self.initial_point.size != self.final_point.size
        ):
            raise DimensionMismatchError("initial and final constraint points differ in dimension")

    @property
    def kind(self) -> str:
        if self.initial_point is not None and self.final_point is not None:
            return "both"
        return "initial" if self.initial_point is not None else "final"

    @property
    def dims(self) -> int:
        point = self.initial_point if self.initial_point is not None else self.final_point
        return int(point.size)

    @classmethod
    def initial(cls, point) -> "BoundaryConstraint":
        return cls(initial_point=point)

    @classmethod
    def final(cls, point) -> "BoundaryConstraint":
        return cls(final_point=point)

    @classmethod
    def both(cls, initial_point, final_point) -> "BoundaryConstraint":
        return cls(initial_point=initial_point, final_point=final_point)

    def resolve(self, demo: Trajectory) -> tuple[np.ndarray, np.ndarray]:
        """Both endpoint targets, falling back to the demonstration's endpoints."""
        if self.dims != demo.dims:
            raise DimensionMismatchError(
                f"constraint dimension {self.dims} does not match demonstration dimension {demo.dims}"
            )
        start = demo.initial if self.initial_point is None else self.initial_point
        goal = demo.final if self.final_point is None else self.final_point
        return start, goal


def resample_uniform(traj: Trajectory, target_len: int) -> Trajectory:
    """Linearly resample to exactly ``target_len`` uniformly indexed samples.

    Endpoints are preserved exactly, and resampling a trajectory to its own
    length is the identity.
    """
    if int(target_len) != target_len or target_len < 2:
        raise ValidationError(f"target_len must be an integer >= 2, got {target_len}")
    target_len = int(target_len)
    source = np.linspace(0.0, 1.0, len(traj))
    query = np.linspace(0.0, 1.0, target_len)
    out = np.empty((target_len, traj.dims))
    for d in range(traj.dims):
        out[:, d] = np.interp(query, source, traj.samples[:, d])
    out[0] = traj.samples[0]
    out[-1] = traj.samples[-1]
    return Trajectory(out, traj.duration)


def smooth_moving_average(traj: Trajectory, window: int) -> Trajectory:
    """Centered moving average with symmetrically shrinking windows at the edges.

    The shrinking half-window keeps both endpoints exactly in place; constant
    trajectories pass through unchanged.
    """
    if int(window) != window or window < 1 or window % 2 == 0:
        raise ValidationError(f"window must be a positive odd integer, got {window}")
    window = int(window)
    T = len(traj)
    if window > T:
        raise ValidationError(f"window {window} exceeds trajectory length {T}")
    half = window // 2
    x = traj.samples
    out = np.empty_like(x)
    for i in range(T):
        h = min(half, i, T - 1 - i)
        # Averaging deviations from the center sample keeps endpoints and
        # constant trajectories bit-exact.
        out[i] = x[i] + np.mean(x[i - h : i + h + 1] - x[i], axis=0)
    return Trajectory(out, traj.duration)


def arc_length(traj) -> float:
    """Polyline length: sum of Euclidean distances between consecutive samples."""
    samples = traj.samples if isinstance(traj, Trajectory) else np.asarray(traj, dtype=float)
    return float(np.sum(np.linalg.norm(np.diff(samples, axis=0), axis=1)))


def preprocess(
    traj: Trajectory,
    smooth_window: int = DEFAULT_SMOOTH_WINDOW,
    target_len: int = DEFAULT_RESAMPLE_LEN,
) -> Trajectory:
    """Default ingestion pipeline: noise filtering, then uniform resampling."""
    return resample_uniform(smooth_moving_average(traj, smooth_window), target_len)
