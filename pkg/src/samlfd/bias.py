"""Metric-bias categorization study.

Most similarity metrics systematically prefer one reproduction behavior:
converging back to the demonstration (the jerk-accuracy model) or preserving
its shape (Laplacian editing). This module tallies, over a corpus of shapes
and a grid of displaced initial points, which of the two wins under a given
metric, and categorizes the metric accordingly.

A cell is inconclusive when the two raw distances are within the tie margin
of each other: ``|d_ja - d_lte| / max(d_ja, d_lte) <= margin`` (both zero
also counts as a tie).
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

from .engine import DEFAULT_EXTENT_FRACTION, DEFAULT_RESOLUTION, build_meshgrid, default_extent
from .errors import ValidationError
from .metrics import MetricId, coerce_metric, distance
from .representations import JA_LABEL, LTE_LABEL, RepresentationConfig, build_reproducers
from .trajectory import BoundaryConstraint, Trajectory

DEFAULT_TIE_MARGIN = 0.10
DEFAULT_DECISION_THRESHOLD = 0.5

JA_DECISION = "JA"
LTE_DECISION = "LTE"
EITHER_DECISION = "Either"


@dataclass(frozen=True, eq=False)
class BiasRecord:
    """One table row: per-metric shares (percent) and the bias decision."""

    metric: MetricId
    ja_share: float
    lte_share: float
    inconclusive_share: float
    decision: str
    cells: Mapping[str, list[str]]
    excluded: Mapping[str, int]

    @property
    def total_cells(self) -> int:
        return sum(len(v) for v in self.cells.values())


def categorize_metric(
    ja_share: float,
    lte_share: float,
    threshold: float = DEFAULT_DECISION_THRESHOLD,
) -> str:
    """Decision from percentage shares: a side must hold a majority above the threshold."""
    cutoff = 100.0 * threshold
    if ja_share > cutoff and ja_share > lte_share:
        return JA_DECISION
    if lte_share > cutoff and lte_share > ja_share:
        return LTE_DECISION
    return EITHER_DECISION


def _cell_outcomes(
    shapes: Mapping[str, Trajectory],
    grid_resolution: int,
    extent_fraction: float,
    config: RepresentationConfig | None,
):
    """Per-shape grid points with their JA/LTE reproductions, computed once."""
    for name, demo in shapes.items():
        grid = build_meshgrid(
            demo.initial, default_extent(demo, extent_fraction), grid_resolution
        )
        reproducers = build_reproducers(demo, (JA_LABEL, LTE_LABEL), config)
        pairs = []
        for point in grid.points:
            constraint = BoundaryConstraint.initial(point)
            try:
                pairs.append((reproducers[JA_LABEL](constraint), reproducers[LTE_LABEL](constraint)))
            except Exception as exc:
                pairs.append(exc)
        yield name, demo, pairs


def _tally(
    shape_pairs: Sequence[tuple],
    metric: MetricId,
    tie_margin: float,
    decision_threshold: float,
) -> BiasRecord:
    cells: dict[str, list[str]] = {}
    excluded: dict[str, int] = {}
    counts = {"ja": 0, "lte": 0, "tie": 0}
    for name, demo, pairs in shape_pairs:
        outcomes: list[str] = []
        failed = 0
        for pair in pairs:
            if isinstance(pair, Exception):
                failed += 1
                continue
            ja_repro, lte_repro = pair
            try:
                d_ja = distance(metric, ja_repro, demo)
                d_lte = distance(metric, lte_repro, demo)
            except Exception:
                failed += 1
                continue
            top = max(d_ja, d_lte)
            if top <= 0.0 or abs(d_ja - d_lte) / top <= tie_margin:
                outcome = "tie"
            else:
                outcome = "ja" if d_ja < d_lte else "lte"
            outcomes.append(outcome)
            counts[outcome] += 1
        cells[name] = outcomes
        if failed:
            excluded[name] = failed
            warnings.warn(f"{name}: {failed} grid cells excluded from the {metric.value} tally", stacklevel=2)
    total = sum(counts.values())
    if total == 0:
        raise ValidationError("no usable grid cells; every reproduction failed")
    ja_share = 100.0 * counts["ja"] / total
    lte_share = 100.0 * counts["lte"] / total
    inconclusive = 100.0 * counts["tie"] / total
    return BiasRecord(
        metric=metric,
        ja_share=ja_share,
        lte_share=lte_share,
        inconclusive_share=inconclusive,
        decision=categorize_metric(ja_share, lte_share, decision_threshold),
        cells=cells,
        excluded=excluded,
    )


def run_bias_suite(
    shapes: Mapping[str, Trajectory],
    metrics: Sequence[MetricId | str] = tuple(MetricId),
    grid_resolution: int = DEFAULT_RESOLUTION,
    tie_margin: float = DEFAULT_TIE_MARGIN,
    extent_fraction: float = DEFAULT_EXTENT_FRACTION,
    decision_threshold: float = DEFAULT_DECISION_THRESHOLD,
    config: RepresentationConfig | None = None,
) -> list[BiasRecord]:
    """Bias records for several metrics, reusing one set of reproductions."""
    if not shapes:
        raise ValidationError("the shape corpus is empty")
    if not (0.0 < tie_margin < 1.0):
        raise ValidationError(f"tie margin must lie in (0, 1), got {tie_margin}")
    metric_ids = [coerce_metric(m) for m in metrics]
    if not metric_ids:
        metric_ids = list(MetricId)
    shape_pairs = list(_cell_outcomes(shapes, grid_resolution, extent_fraction, config))
    return [_tally(shape_pairs, metric, tie_margin, decision_threshold) for metric in metric_ids]


def run_bias_study(
    shapes: Mapping[str, Trajectory],
    metric: MetricId | str,
    grid_resolution: int = DEFAULT_RESOLUTION,
    tie_margin: float = DEFAULT_TIE_MARGIN,
    extent_fraction: float = DEFAULT_EXTENT_FRACTION,
    decision_threshold: float = DEFAULT_DECISION_THRESHOLD,
    config: RepresentationConfig | None = None,
) -> BiasRecord:
    """Single-metric study over a corpus of demonstrations."""
    return run_bias_suite(
        shapes,
        [metric],
        grid_resolution=grid_resolution,
        tie_margin=tie_margin,
        extent_fraction=extent_fraction,
        decision_threshold=decision_threshold,
        config=config,
    )[0]


# ---------------------------------------------------------------------------
# Report emission


def bias_table_rows(records: Sequence[BiasRecord]) -> list[list[str]]:
    rows = [["Metric", "JA", "LTE", "Inconclusive", "Decision"]]
    for record in records:
        rows.append(
            [
                record.metric.value,
                f"{record.ja_share:.2f}%",
                f"{record.lte_share:.2f}%",
                f"{record.inconclusive_share:.2f}%",
                record.decision,
            ]
        )
    return rows


def bias_table_csv(records: Sequence[BiasRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows(bias_table_rows(records))
    return buffer.getvalue()


def bias_table_markdown(records: Sequence[BiasRecord]) -> str:
    rows = bias_table_rows(records)
    header, body = rows[0], rows[1:]
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join(["---"] * len(header)) + "|"]
    lines.extend("| " + " | ".join(row) + " |" for row in body)
    return "\n".join(lines) + "\n"
