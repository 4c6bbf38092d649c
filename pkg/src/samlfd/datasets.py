"""Trajectory persistence and corpus ingestion.

The canonical on-disk format is a JSON object::

    {"name": str, "dims": int, "duration": number,
     "samples": [[number, ...], ...], "provenance": str}

A CSV fallback (header row ``x,y`` or ``x,y,z``, one sample per line) covers
data exported from other tools. Handwriting-corpus ingestion expects one CSV
file per shape, pre-converted from the dataset's native container (see the
README for the one-time conversion snippet).
"""

from __future__ import annotations

import csv
import json
import warnings
from pathlib import Path

from .errors import DimensionMismatchError, TrajectoryParseError, ValidationError
from .trajectory import Trajectory, preprocess

_CSV_HEADERS = {("x", "y"): 2, ("x", "y", "z"): 3}


def trajectory_to_dict(traj: Trajectory, name: str = "trajectory", provenance: str = "") -> dict:
    return {
        "name": name,
        "dims": traj.dims,
        "duration": traj.duration,
        "samples": traj.samples.tolist(),
        "provenance": provenance,
    }


def trajectory_from_dict(data: dict) -> Trajectory:
    if not isinstance(data, dict) or "samples" not in data:
        raise TrajectoryParseError("trajectory object must contain a 'samples' array")
    traj = Trajectory(data["samples"], duration=float(data.get("duration", 1.0)))
    declared = data.get("dims")
    if declared is not None and int(declared) != traj.dims:
        raise DimensionMismatchError(
            f"declared dims {declared} does not match samples of dimension {traj.dims}"
        )
    return traj


def save_trajectory(traj: Trajectory, path, name: str = "trajectory", provenance: str = "") -> None:
    path = Path(path)
    path.write_text(json.dumps(trajectory_to_dict(traj, name=name, provenance=provenance), indent=2))


def _load_csv(path: Path) -> Trajectory:
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise TrajectoryParseError(f"{path}: empty file") from None
        key = tuple(h.strip().lower() for h in header)
        if key not in _CSV_HEADERS:
            raise TrajectoryParseError(f"{path}: expected header 'x,y' or 'x,y,z', got {header!r}")
        dims = _CSV_HEADERS[key]
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != dims:
                raise TrajectoryParseError(f"{path}:{line_no}: expected {dims} columns, got {len(row)}")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise TrajectoryParseError(f"{path}:{line_no}: {exc}") from exc
    return Trajectory(rows)


def load_trajectory(path) -> Trajectory:
    """Load a trajectory from a `.json` or `.csv` file, validating invariants."""
    path = Path(path)
    if not path.exists():
        raise TrajectoryParseError(f"{path}: no such file")
    if path.suffix.lower() == ".csv":
        return _load_csv(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise TrajectoryParseError(f"{path}: invalid JSON: {exc}") from exc
    return trajectory_from_dict(data)


def ingest_corpus_csv(directory, preprocess_demos: bool = True) -> dict[str, Trajectory]:
    """Load every per-shape CSV in a directory as a named demonstration corpus.

    Files are visited in lexicographic order; unreadable or too-short files
    are skipped with a warning. Demonstrations go through the default
    preprocessing pipeline unless ``preprocess_demos`` is false.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise ValidationError(f"{directory}: not a directory")
    corpus: dict[str, Trajectory] = {}
    files = sorted(directory.glob("*.csv"))
    if not files:
        warnings.warn(f"{directory}: no CSV files found; corpus is empty", stacklevel=2)
        return corpus
    for path in files:
        try:
            traj = _load_csv(path)
            corpus[path.stem] = preprocess(traj) if preprocess_demos else traj
        except ValidationError as exc:
            warnings.warn(f"skipping {path.name}: {exc}", stacklevel=2)
    return corpus
