"""Similarity-region engine.

Builds a meshgrid of candidate boundary points around a point of interest,
reproduces the demonstrated skill from every grid point with every configured
representation, scores each reproduction against the demonstration under one
similarity metric, and normalizes the scores jointly so the maps are
comparable across representations. The per-point argmax defines the
similarity regions; a classifier generalizes the winning label to points
outside the grid, and `best_reproduction` answers exact queries at arbitrary
points.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ComputationError, ValidationError
from .metrics import MetricId, coerce_metric, distance, normalize_similarities
from .representations import (
    REPRESENTATION_ORDER,
    RepresentationConfig,
    Reproducer,
    build_reproducers,
)
from .trajectory import BoundaryConstraint, Trajectory

DEFAULT_RESOLUTION = 9
DEFAULT_EXTENT_FRACTION = 0.25
DEFAULT_GRID_BUDGET = 100_000

CONSTRAINT_KINDS = ("initial", "final")

SESSION_SCHEMA = "samlfd-session/1"


def _check_constraint_kind(kind: str) -> str:
    if kind not in CONSTRAINT_KINDS:
        raise ValidationError(f"constraint kind must be one of {CONSTRAINT_KINDS}, got {kind!r}")
    return kind


def default_extent(demo: Trajectory, fraction: float = DEFAULT_EXTENT_FRACTION) -> float:
    """Grid half-width as a fraction of the demonstration's bounding-box diagonal."""
    extent = fraction * demo.bbox_diagonal()
    if extent <= 0.0:
        raise ValidationError("demonstration has zero extent; supply an explicit grid extent")
    return extent


@dataclass(frozen=True, eq=False)
class Meshgrid:
    """Axis-aligned uniform grid of candidate boundary points.

    ``points`` holds resolution**n rows in row-major order (first axis
    slowest); with an odd resolution the center is itself a grid point.
    """

    center: np.ndarray
    extent: np.ndarray
    resolution: int
    points: np.ndarray

    @property
    def dims(self) -> int:
        return self.center.size

    def axes(self) -> list[np.ndarray]:
        return [
            np.linspace(self.center[d] - self.extent[d], self.center[d] + self.extent[d], self.resolution)
            for d in range(self.dims)
        ]


def build_meshgrid(center, extent, resolution: int = DEFAULT_RESOLUTION, budget: int = DEFAULT_GRID_BUDGET) -> Meshgrid:
    """Uniform grid spanning center +/- extent in every dimension."""
    center = np.asarray(center, dtype=float).reshape(-1)
    if not np.isfinite(center).all():
        raise ValidationError("grid center contains non-finite values")
    extent_arr = np.broadcast_to(np.asarray(extent, dtype=float), center.shape).astype(float)
    if not (np.isfinite(extent_arr).all() and (extent_arr > 0).all()):
        raise ValidationError("grid extent must be positive and finite in every dimension")
    if int(resolution) != resolution or resolution < 2:
        raise ValidationError(f"resolution must be an integer >= 2, got {resolution}")
    resolution = int(resolution)
    total = resolution ** center.size
    if total > budget:
        raise ValidationError(
            f"{resolution}^{center.size} = {total} grid points exceeds the budget of {budget}; "
            "a coarse grid covers more space with fewer points, a dense grid costs "
            "more computation -- lower the resolution or raise the budget"
        )
    axes = [
        np.linspace(center[d] - extent_arr[d], center[d] + extent_arr[d], resolution)
        for d in range(center.size)
    ]
    points = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, center.size)
    center.setflags(write=False)
    extent_arr = extent_arr.copy()
    extent_arr.setflags(write=False)
    points.setflags(write=False)
    return Meshgrid(center=center, extent=extent_arr, resolution=resolution, points=points)


@dataclass(frozen=True, eq=False)
class SimilarityMap:
    """Scores of every (representation, grid point) cell under one metric.

    ``scores`` and ``raw`` are (R, P) arrays whose rows follow ``labels``
    (precedence order). Failed cells carry NaN raw distance, score 0, and an
    entry in ``errors`` keyed ``"label:point_index"``.
    """

    grid: Meshgrid
    metric: MetricId
    constraint_kind: str
    labels: tuple[str, ...]
    scores: np.ndarray
    raw: np.ndarray
    errors: Mapping[str, str] = field(default_factory=dict)

    @property
    def best_index(self) -> np.ndarray:
        # argmax returns the first maximum, which is exactly the precedence rule.
        return np.argmax(self.scores, axis=0)

    @property
    def best_label(self) -> list[str]:
        return [self.labels[i] for i in self.best_index]

    @property
    def best_score(self) -> np.ndarray:
        return self.scores.max(axis=0)

    def scores_for(self, label: str) -> np.ndarray:
        if label not in self.labels:
            raise ValidationError(f"unknown representation {label!r}; map has {list(self.labels)}")
        return self.scores[self.labels.index(label)]


def _constraint_at(point: np.ndarray, kind: str) -> BoundaryConstraint:
    if kind == "initial":
        return BoundaryConstraint.initial(point)
    return BoundaryConstraint.final(point)


def _evaluate_cell(
    reproducer: Reproducer,
    demo: Trajectory,
    point: np.ndarray,
    kind: str,
    metric: MetricId,
) -> tuple[float, str | None]:
    try:
        reproduction = reproducer(_constraint_at(point, kind))
        return distance(metric, reproduction, demo), None
    except Exception as exc:  # failures degrade one cell, never the grid
        return float("nan"), f"{type(exc).__name__}: {exc}"


def evaluate_grid(
    demo: Trajectory,
    grid: Meshgrid,
    reps: Sequence[str] = REPRESENTATION_ORDER,
    metric: MetricId | str = MetricId.FRECHET,
    constraint_kind: str = "initial",
    *,
    config: RepresentationConfig | None = None,
    reproducers: Mapping[str, Reproducer] | None = None,
    normalization: str = "joint",
    workers: int | None = None,
) -> SimilarityMap:
    """Score every representation at every grid point.

    Raw distances are normalized jointly over the whole (representation x
    point) set by default, so exactly one cell per session reaches similarity
    1; ``normalization="per_representation"`` rescales each row independently
    for per-representation heatmaps. Cells evaluate independently, so any
    ``workers`` count yields a map bit-identical to sequential evaluation.
    """
    metric = coerce_metric(metric)
    kind = _check_constraint_kind(constraint_kind)
    if normalization not in ("joint", "per_representation"):
        raise ValidationError(f"unknown normalization {normalization!r}")
    if grid.dims != demo.dims:
        raise ValidationError(f"grid dimension {grid.dims} does not match demonstration {demo.dims}")
    if reproducers is None:
        reproducers = build_reproducers(demo, reps, config)
    labels = tuple(reproducers.keys())
    points = grid.points
    raw = np.full((len(labels), len(points)), np.nan)
    errors: dict[str, str] = {}

    cells = [(r, p) for r in range(len(labels)) for p in range(len(points))]
    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    lambda cell: _evaluate_cell(
                        reproducers[labels[cell[0]]], demo, points[cell[1]], kind, metric
                    ),
                    cells,
                )
            )
    else:
        results = [
            _evaluate_cell(reproducers[labels[r]], demo, points[p], kind, metric)
            for r, p in cells
        ]
    for (r, p), (value, error) in zip(cells, results):
        raw[r, p] = value
        if error is not None:
            errors[f"{labels[r]}:{p}"] = error

    if normalization == "joint":
        scores = normalize_similarities(raw.ravel()).reshape(raw.shape)
    else:
        scores = np.vstack([normalize_similarities(row) for row in raw])
    raw.setflags(write=False)
    scores.setflags(write=False)
    return SimilarityMap(
        grid=grid,
        metric=metric,
        constraint_kind=kind,
        labels=labels,
        scores=scores,
        raw=raw,
        errors=errors,
    )


def combine_best(smap: SimilarityMap) -> tuple[list[str], np.ndarray]:
    """Per-point winning label and score; exact ties go to the earlier label."""
    return smap.best_label, smap.best_score


def robust_region(smap: SimilarityMap, threshold: float) -> np.ndarray:
    """Boolean mask of grid points whose best similarity reaches the threshold."""
    if not (0.0 <= threshold <= 1.0):
        raise ValidationError(f"threshold must lie in [0, 1], got {threshold}")
    return smap.best_score >= threshold


def accumulated_similarity_difference(smap: SimilarityMap, rep: str) -> float:
    """Sum over grid points of (best score - the representation's score).

    Nonnegative by construction: the combined map is the pointwise maximum.
    """
    return float(np.sum(smap.best_score - smap.scores_for(rep)))


# ---------------------------------------------------------------------------
# Region classification


@dataclass(eq=False)
class RegionModel:
    """Classifier mapping any point in the generalization space to a label."""

    kind: str
    training_points: np.ndarray
    training_labels: list[str]
    label_order: tuple[str, ...]
    hyperparameters: dict
    _svc: object | None = None

    @classmethod
    def fit(cls, points, labels, label_order=None, kind: str = "knn", **hyperparameters) -> "RegionModel":
        points = np.asarray(points, dtype=float)
        labels = [str(label) for label in labels]
        if len(points) != len(labels) or len(points) == 0:
            raise ValidationError("need one label per training point, and at least one point")
        if kind not in ("knn", "csvc"):
            raise ValidationError(f"classifier kind must be 'knn' or 'csvc', got {kind!r}")
        if label_order is None:
            label_order = tuple(dict.fromkeys(labels))
        model = cls(
            kind=kind,
            training_points=points,
            training_labels=labels,
            label_order=tuple(label_order),
            hyperparameters=dict(hyperparameters),
        )
        if kind == "csvc" and len(set(labels)) > 1:
            from sklearn.svm import SVC

            encoded = [model.label_order.index(label) for label in labels]
            svc = SVC(
                C=hyperparameters.get("C", 10.0),
                gamma=hyperparameters.get("gamma", "scale"),
                kernel="rbf",
            )
            svc.fit(points, encoded)
            model._svc = svc
        return model

    def predict(self, point) -> str:
        point = np.asarray(point, dtype=float).reshape(-1)
        if point.size != self.training_points.shape[1]:
            raise ValidationError(
                f"query dimension {point.size} does not match training dimension "
                f"{self.training_points.shape[1]}"
            )
        unique = set(self.training_labels)
        if len(unique) == 1:
            return next(iter(unique))
        if self.kind == "csvc":
            index = int(self._svc.predict(point[None, :])[0])
            return self.label_order[index]
        return self._predict_knn(point)

    def _predict_knn(self, point: np.ndarray) -> str:
        k = int(self.hyperparameters.get("k", 5))
        dists = np.linalg.norm(self.training_points - point, axis=1)
        nearest = np.argsort(dists, kind="stable")[: max(1, k)]
        if dists[nearest[0]] == 0.0:
            # Exact hits outrank everything; precedence breaks multi-hit ties.
            hits = [self.training_labels[i] for i in nearest if dists[i] == 0.0]
            return min(hits, key=self._precedence)
        votes: dict[str, float] = {}
        for i in nearest:
            label = self.training_labels[i]
            votes[label] = votes.get(label, 0.0) + 1.0 / dists[i]
        top = max(votes.values())
        winners = [label for label, weight in votes.items() if weight == top]
        return min(winners, key=self._precedence)

    def _precedence(self, label: str) -> int:
        return self.label_order.index(label) if label in self.label_order else len(self.label_order)

    def predict_many(self, points) -> list[str]:
        return [self.predict(p) for p in np.asarray(points, dtype=float)]


def fit_region_classifier(smap: SimilarityMap, kind: str = "knn", **hyperparameters) -> RegionModel:
    """Train a classifier on the map's per-point winning labels."""
    return RegionModel.fit(
        smap.grid.points,
        smap.best_label,
        label_order=smap.labels,
        kind=kind,
        **hyperparameters,
    )


def predict_representation(model: RegionModel, point) -> str:
    """Label for any point; extrapolation beyond the grid is allowed."""
    return model.predict(point)


# ---------------------------------------------------------------------------
# Exact best-reproduction queries


@dataclass(frozen=True, eq=False)
class ReproductionResult:
    representation: str
    trajectory: Trajectory
    similarity: float
    raw_distance: float

    def to_dict(self) -> dict:
        return {
            "representation": self.representation,
            "similarity": self.similarity,
            "raw_distance": self.raw_distance,
            "trajectory": {
                "duration": self.trajectory.duration,
                "samples": self.trajectory.samples.tolist(),
            },
        }


def best_reproduction(
    demo: Trajectory,
    point,
    constraint_kind: str = "initial",
    reps: Sequence[str] = REPRESENTATION_ORDER,
    metric: MetricId | str = MetricId.FRECHET,
    *,
    config: RepresentationConfig | None = None,
    reproducers: Mapping[str, Reproducer] | None = None,
) -> ReproductionResult:
    """Exact evaluation at one point: reproduce with every representation,
    score against the demonstration, and return the closest reproduction.

    Bypasses any trained classifier; similarities are normalized over this
    query's candidate set, so the winner always scores 1.
    """
    metric = coerce_metric(metric)
    kind = _check_constraint_kind(constraint_kind)
    point = np.asarray(point, dtype=float).reshape(-1)
    if reproducers is None:
        reproducers = build_reproducers(demo, reps, config)
    candidates: list[tuple[str, Trajectory, float]] = []
    failures: list[str] = []
    for label, reproducer in reproducers.items():
        try:
            reproduction = reproducer(_constraint_at(point, kind))
            candidates.append((label, reproduction, distance(metric, reproduction, demo)))
        except Exception as exc:
            failures.append(f"{label}: {type(exc).__name__}: {exc}")
    if not candidates:
        raise ComputationError("every representation failed -- " + "; ".join(failures))
    raw = np.array([c[2] for c in candidates])
    scores = normalize_similarities(raw)
    winner = int(np.argmin(raw))  # first minimum = precedence order
    label, trajectory, raw_value = candidates[winner]
    return ReproductionResult(
        representation=label,
        trajectory=trajectory,
        similarity=float(scores[winner]),
        raw_distance=float(raw_value),
    )


# ---------------------------------------------------------------------------
# Session document


def session_document(
    demo: Trajectory,
    smap: SimilarityMap,
    *,
    demo_name: str = "demonstration",
    robust_threshold: float | None = None,
) -> dict:
    """JSON-serializable session artifact shared by the CLI and the service.

    Score and raw matrices are row-major over the grid points, one list per
    representation label.
    """
    doc = {
        "schema": SESSION_SCHEMA,
        "demo": {
            "name": demo_name,
            "dims": demo.dims,
            "duration": demo.duration,
            "samples": demo.samples.tolist(),
        },
        "metric": smap.metric.value,
        "constraint": smap.constraint_kind,
        "representations": list(smap.labels),
        "grid": {
            "center": smap.grid.center.tolist(),
            "extent": smap.grid.extent.tolist(),
            "resolution": smap.grid.resolution,
            "points": smap.grid.points.tolist(),
        },
        "scores": {label: smap.scores[i].tolist() for i, label in enumerate(smap.labels)},
        "raw": {
            label: [None if not np.isfinite(v) else float(v) for v in smap.raw[i]]
            for i, label in enumerate(smap.labels)
        },
        "best_label": smap.best_label,
        "best_score": smap.best_score.tolist(),
        "errors": dict(smap.errors),
    }
    if robust_threshold is not None:
        doc["robust"] = {
            "threshold": float(robust_threshold),
            "mask": [bool(v) for v in robust_region(smap, robust_threshold)],
        }
    return doc


def canonical_session_json(doc: dict) -> str:
    """Stable serialization so equal sessions are byte-identical artifacts."""
    return json.dumps(doc, separators=(",", ":"), sort_keys=True, allow_nan=False)
