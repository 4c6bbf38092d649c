"""Bundled synthetic demonstration shapes.

Six deterministic 2-D strokes in the spirit of handwriting-dataset skills,
so every study and test can run without downloading a corpus. All shapes go
through the default preprocessing pipeline (smoothing + resampling to 100
samples) and span roughly a unit box.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .trajectory import Trajectory, preprocess

_RAW_SAMPLES = 100


def _param() -> np.ndarray:
    return np.linspace(0.0, 1.0, _RAW_SAMPLES)


def _line() -> np.ndarray:
    t = _param()
    return np.stack([t, t], axis=1)


def _s_curve() -> np.ndarray:
    t = _param()
    return np.stack([t, 0.35 * np.sin(2.0 * np.pi * t)], axis=1)


def _l_shape() -> np.ndarray:
    down = np.stack([np.zeros(50), np.linspace(1.0, 0.0, 50)], axis=1)
    across = np.stack([np.linspace(0.0, 1.0, 51)[1:], np.zeros(50)], axis=1)
    return np.vstack([down, across])


def _loop() -> np.ndarray:
    t = _param()
    a = 0.35
    return np.stack([t - a * np.sin(2.0 * np.pi * t), a * (1.0 - np.cos(2.0 * np.pi * t))], axis=1)


def _zigzag() -> np.ndarray:
    t = _param()
    teeth = 0.18 * (2.0 * np.abs((3.0 * t) % 2.0 - 1.0) - 1.0)
    return np.stack([t, teeth], axis=1)


def _spiral() -> np.ndarray:
    t = _param()
    theta = 2.0 * np.pi * t
    radius = 0.22 + 0.30 * t
    return np.stack([radius * np.cos(theta), radius * np.sin(theta)], axis=1)


_BUILDERS = {
    "line": _line,
    "s_curve": _s_curve,
    "l_shape": _l_shape,
    "loop": _loop,
    "zigzag": _zigzag,
    "spiral": _spiral,
}

BUNDLED_SHAPE_NAMES: tuple[str, ...] = tuple(_BUILDERS)


def bundled_shape(name: str) -> Trajectory:
    """One preprocessed bundled demonstration by name."""
    if name not in _BUILDERS:
        raise ValidationError(
            f"unknown bundled shape {name!r}; available: {', '.join(BUNDLED_SHAPE_NAMES)}"
        )
    return preprocess(Trajectory(_BUILDERS[name]()))


def bundled_shapes() -> dict[str, Trajectory]:
    """All bundled demonstrations, keyed by name."""
    return {name: bundled_shape(name) for name in BUNDLED_SHAPE_NAMES}
