"""Deterministic random-stream derivation.

Every random decision in the pipeline draws from a generator derived from
``(master seed, sample index, stage label)``. Per-sample streams are a pure
function of that triple, so corpus results do not depend on worker count or
scheduling, and enabling one pipeline stage never perturbs the draws of
another.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


def _stage_key(stage: str) -> int:
    # crc32 is fully specified, stable across platforms and Python versions
    return zlib.crc32(stage.encode("utf-8"))


def derive_rng(master: int, sample_index: int = 0, stage: str = "") -> np.random.Generator:
    """Generator for one (master, sample, stage) triple.

    Distinct triples yield statistically independent streams (SeedSequence
    entropy mixing); identical triples always yield the identical stream.
    """
    entropy = [int(master) & _MASK64, int(sample_index) & _MASK64, _stage_key(stage)]
    return np.random.default_rng(np.random.SeedSequence(entropy))


@dataclass(frozen=True)
class RngSeed:
    """Addressable random source: 64-bit master seed plus a sample index."""

    master: int
    sample_index: int = 0

    def stream(self, stage: str = "") -> np.random.Generator:
        return derive_rng(self.master, self.sample_index, stage)

    def for_sample(self, sample_index: int) -> "RngSeed":
        return RngSeed(self.master, sample_index)


def as_seed(seed: "RngSeed | int") -> RngSeed:
    """Coerce a bare integer to an ``RngSeed`` with sample index 0."""
    if isinstance(seed, RngSeed):
        return seed
    return RngSeed(int(seed), 0)
