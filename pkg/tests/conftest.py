from __future__ import annotations

import numpy as np
import pytest

from samlfd import Trajectory, bundled_shapes


@pytest.fixture(scope="session")
def corpus() -> dict[str, Trajectory]:
    return bundled_shapes()


@pytest.fixture(scope="session")
def s_curve(corpus) -> Trajectory:
    return corpus["s_curve"]


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)


def random_curve(rng: np.random.Generator, length: int, dims: int = 2, scale: float = 1.0) -> np.ndarray:
    """Random smooth-ish polyline: cumulative sum of small steps."""
    steps = rng.normal(scale=scale / length, size=(length, dims))
    return np.cumsum(steps, axis=0)
