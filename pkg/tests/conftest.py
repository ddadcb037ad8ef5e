import numpy as np
import pytest

from evaug.events import EventStream


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_stream(rng, n_events, width, height, t_max=100_000):
    t = np.sort(rng.integers(0, t_max + 1, n_events))
    return EventStream(
        rng.integers(0, width, n_events),
        rng.integers(0, height, n_events),
        t,
        rng.integers(0, 2, n_events),
        width,
        height,
    )


def sparse_volume(rng, shape=(10, 2, 80, 80), density=0.03, max_count=4):
    """Integer count volume that looks like a voxelized recording."""
    vol = (rng.random(shape) < density) * rng.integers(1, max_count + 1, shape)
    return np.ascontiguousarray(vol, dtype=np.float32)


@pytest.fixture
def make_stream(rng):
    def _make(n_events=1000, width=32, height=32, t_max=100_000):
        return random_stream(rng, n_events, width, height, t_max)

    return _make


@pytest.fixture
def make_volume(rng):
    def _make(shape=(10, 2, 80, 80), density=0.03, max_count=4):
        return sparse_volume(rng, shape, density, max_count)

    return _make
