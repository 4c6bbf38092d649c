"""Trajectory dissimilarity measures and score normalization.

Eleven distance measures over sampled curves, identified by the stable
lowercase strings used throughout the CLI and HTTP API. All measures return 0
for identical inputs and are symmetric except ``pcm``; the engine always
evaluates ``distance(metric, reproduction, demonstration)``.

Index-aligned measures (``sse``, ``totaldist``, ``sea``, ``curvature``,
``endpoint``) resample both curves to a common length when they differ.
"""

from __future__ import annotations

from enum import Enum

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ValidationError
from .trajectory import Trajectory, arc_length, resample_uniform


class MetricId(str, Enum):
    AREA = "area"
    CURVATURE_COMPARISON = "curvature"
    CURVE_LENGTH = "curvelength"
    DTW = "dtw"
    ENDPOINT_CONVERGENCE = "endpoint"
    FRECHET = "frechet"
    HAUSDORFF = "hausdorff"
    PCM = "pcm"
    SEA = "sea"
    SSE = "sse"
    TOTAL_DISTANCE = "totaldist"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


METRIC_IDS: tuple[str, ...] = tuple(m.value for m in MetricId)

# Fraction of trailing indices scored by the endpoint-convergence measure.
ENDPOINT_TAIL_FRACTION = 0.1


def coerce_metric(metric) -> MetricId:
    if isinstance(metric, MetricId):
        return metric
    try:
        return MetricId(str(metric))
    except ValueError as exc:
        raise ValidationError(
            f"unknown metric {metric!r}; valid ids: {', '.join(METRIC_IDS)}"
        ) from exc


def _as_array(curve) -> np.ndarray:
    if isinstance(curve, Trajectory):
        return curve.samples
    arr = np.asarray(curve, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise ValidationError(f"curve must be a T x n array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValidationError("curve contains non-finite values")
    return arr


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a, b = _as_array(a), _as_array(b)
    if a.shape[1] != b.shape[1]:
        raise ValidationError(f"curves differ in dimension: {a.shape[1]} vs {b.shape[1]}")
    return a, b


def _aligned_pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a, b = _pair(a, b)
    if len(a) != len(b):
        target = max(len(a), len(b))
        a = resample_uniform(Trajectory(a), target).samples
        b = resample_uniform(Trajectory(b), target).samples
    return a, b


# ---------------------------------------------------------------------------
# Point-set and alignment measures


def frechet_distance(a, b) -> float:
    """Discrete Frechet distance via the standard coupling recursion."""
    a, b = _pair(a, b)
    costs = cdist(a, b).tolist()
    n, m = len(a), len(b)
    row = [0.0] * m
    row[0] = costs[0][0]
    for j in range(1, m):
        row[j] = max(row[j - 1], costs[0][j])
    for i in range(1, n):
        prev = row
        row = [0.0] * m
        row[0] = max(prev[0], costs[i][0])
        ci = costs[i]
        for j in range(1, m):
            reach = min(prev[j], prev[j - 1], row[j - 1])
            cij = ci[j]
            row[j] = cij if cij > reach else reach
    return float(row[-1])


def dtw_distance(a, b) -> float:
    """Dynamic time warping with Euclidean ground cost and unit steps."""
    a, b = _pair(a, b)
    costs = cdist(a, b).tolist()
    n, m = len(a), len(b)
    row = [0.0] * m
    row[0] = costs[0][0]
    for j in range(1, m):
        row[j] = row[j - 1] + costs[0][j]
    for i in range(1, n):
        prev = row
        row = [0.0] * m
        row[0] = prev[0] + costs[i][0]
        ci = costs[i]
        for j in range(1, m):
            best = prev[j]
            if prev[j - 1] < best:
                best = prev[j - 1]
            if row[j - 1] < best:
                best = row[j - 1]
            row[j] = best + ci[j]
    return float(row[-1])


def hausdorff_distance(a, b) -> float:
    """Max of the two directed point-set Hausdorff distances."""
    a, b = _pair(a, b)
    pairwise = cdist(a, b)
    return float(max(pairwise.min(axis=1).max(), pairwise.min(axis=0).max()))


# ---------------------------------------------------------------------------
# Index-aligned measures


def sse_distance(a, b) -> float:
    a, b = _aligned_pair(a, b)
    return float(np.sum((a - b) ** 2))


def total_distance(a, b) -> float:
    a, b = _aligned_pair(a, b)
    return float(np.sum(np.linalg.norm(a - b, axis=1)))


def _triangle_areas(p: np.ndarray, q: np.ndarray, r: np.ndarray) -> np.ndarray:
    u = q - p
    w = r - p
    if p.shape[1] == 2:
        cross = u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0]
        return 0.5 * np.abs(cross)
    return 0.5 * np.linalg.norm(np.cross(u, w), axis=1)


def _quad_sweep(a: np.ndarray, b: np.ndarray) -> float:
    # Quadrilateral (a_t, a_{t+1}, b_{t+1}, b_t) split into two triangles.
    # Averaging over both diagonal splits keeps the sweep exactly symmetric
    # in its arguments (the splits disagree only on self-intersecting quads);
    # for planar convex quads both splits equal the quadrilateral area.
    split_one = _triangle_areas(a[:-1], a[1:], b[1:]) + _triangle_areas(a[:-1], b[1:], b[:-1])
    split_two = _triangle_areas(b[:-1], a[:-1], a[1:]) + _triangle_areas(b[:-1], a[1:], b[1:])
    return float(0.5 * (np.sum(split_one) + np.sum(split_two)))


def swept_error_area(a, b) -> float:
    """Sum of per-step quadrilateral areas between index-aligned curves."""
    a, b = _aligned_pair(a, b)
    return _quad_sweep(a, b)


def _arclength_resample(x: np.ndarray, count: int) -> np.ndarray:
    deltas = np.linalg.norm(np.diff(x, axis=0), axis=1)
    stations = np.concatenate([[0.0], np.cumsum(deltas)])
    total = stations[-1]
    if total == 0.0:
        return np.repeat(x[:1], count, axis=0)
    query = np.linspace(0.0, total, count)
    out = np.empty((count, x.shape[1]))
    for d in range(x.shape[1]):
        out[:, d] = np.interp(query, stations, x[:, d])
    return out


def area_between_curves(a, b) -> float:
    """Quadrilateral sweep after arc-length reparameterization of both curves."""
    a, b = _pair(a, b)
    count = max(len(a), len(b))
    return _quad_sweep(_arclength_resample(a, count), _arclength_resample(b, count))


def curve_length_difference(a, b) -> float:
    a, b = _pair(a, b)
    return float(abs(arc_length(a) - arc_length(b)))


def menger_curvature(x) -> np.ndarray:
    """Curvature at each interior sample: 4 * area / product of triple side lengths.

    Degenerate triples (collinear or coincident points) get curvature 0.
    """
    x = _as_array(x)
    if len(x) < 3:
        raise ValidationError(f"need at least 3 samples for curvature, got {len(x)}")
    p, q, r = x[:-2], x[1:-1], x[2:]
    areas = _triangle_areas(p, q, r)
    sides = (
        np.linalg.norm(q - p, axis=1)
        * np.linalg.norm(r - q, axis=1)
        * np.linalg.norm(r - p, axis=1)
    )
    safe = sides > 0.0
    curvature = np.zeros(len(areas))
    curvature[safe] = 4.0 * areas[safe] / sides[safe]
    return curvature


def curvature_comparison(a, b) -> float:
    """Sum of absolute differences between the curves' curvature profiles."""
    a, b = _aligned_pair(a, b)
    if len(a) < 3:
        raise ValidationError("curvature comparison needs at least 3 samples")
    return float(np.sum(np.abs(menger_curvature(a) - menger_curvature(b))))


def endpoint_convergence(a, b, tail_fraction: float = ENDPOINT_TAIL_FRACTION) -> float:
    """Mean pointwise distance over the final fraction of indices."""
    a, b = _aligned_pair(a, b)
    tail = max(1, int(round(tail_fraction * len(a))))
    return float(np.mean(np.linalg.norm(a[-tail:] - b[-tail:], axis=1)))


# ---------------------------------------------------------------------------
# Partial curve mapping

PCM_OFFSET_STEPS = 200


def partial_curve_mapping(a, b) -> float:
    """Minimal summed deviation mapping the shorter curve onto the longer one.

    Both curves are parameterized by arc length; the shorter one slides along
    the longer and each of its samples is compared with the point at the same
    arc-length station. Not symmetric in general (documented; the engine calls
    with the reproduction first).
    """
    a, b = _pair(a, b)
    if arc_length(a) <= arc_length(b):
        short, long_ = a, b
    else:
        short, long_ = b, a
    short_deltas = np.linalg.norm(np.diff(short, axis=0), axis=1)
    short_stations = np.concatenate([[0.0], np.cumsum(short_deltas)])
    long_deltas = np.linalg.norm(np.diff(long_, axis=0), axis=1)
    long_stations = np.concatenate([[0.0], np.cumsum(long_deltas)])
    slack = long_stations[-1] - short_stations[-1]
    offsets = np.linspace(0.0, slack, PCM_OFFSET_STEPS + 1) if slack > 0.0 else np.zeros(1)

    # All query stations at once: offsets x short samples.
    queries = offsets[:, None] + short_stations[None, :]
    mapped = np.empty(queries.shape + (long_.shape[1],))
    flat = queries.ravel()
    for d in range(long_.shape[1]):
        mapped[..., d] = np.interp(flat, long_stations, long_[:, d]).reshape(queries.shape)
    deviations = np.linalg.norm(mapped - short[None, :, :], axis=2).sum(axis=1)
    return float(deviations.min())


# ---------------------------------------------------------------------------
# Dispatch and normalization

_DISPATCH = {
    MetricId.AREA: area_between_curves,
    MetricId.CURVATURE_COMPARISON: curvature_comparison,
    MetricId.CURVE_LENGTH: curve_length_difference,
    MetricId.DTW: dtw_distance,
    MetricId.ENDPOINT_CONVERGENCE: endpoint_convergence,
    MetricId.FRECHET: frechet_distance,
    MetricId.HAUSDORFF: hausdorff_distance,
    MetricId.PCM: partial_curve_mapping,
    MetricId.SEA: swept_error_area,
    MetricId.SSE: sse_distance,
    MetricId.TOTAL_DISTANCE: total_distance,
}


def distance(metric, a, b) -> float:
    """Dissimilarity of two curves under the named metric (0 = identical)."""
    return _DISPATCH[coerce_metric(metric)](a, b)


def normalize_similarities(distances) -> np.ndarray:
    """Map raw distances to [0, 1] similarities over the given set.

    The smallest distance maps to 1 and the largest to 0 via
    ``(d_max - d) / (d_max - d_min)``; if all finite distances are equal they
    all map to 1. Non-finite entries (failed evaluations) map to 0.
    """
    arr = np.asarray(distances, dtype=float)
    if arr.size == 0:
        raise ValidationError("cannot normalize an empty distance set")
    finite = np.isfinite(arr)
    if not finite.any():
        raise ValidationError("need at least one finite distance to normalize")
    scores = np.zeros(arr.shape)
    lo = arr[finite].min()
    hi = arr[finite].max()
    if hi == lo:
        scores[finite] = 1.0
    else:
        scores[finite] = (hi - arr[finite]) / (hi - lo)
    return scores
