"""Seeded, label-partitioned random streams.

Every stochastic operation draws from ``numpy.random.PCG64`` seeded by a
``SeedSequence`` built from the 64-bit user seed and a SHA-256 digest of a
label path.  Two calls with the same (seed, labels) get bit-identical streams
on every platform, and the order in which operations run does not matter.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

_MASK32 = 0xFFFFFFFF


@dataclass(frozen=True)
class RngState:
    seed: int
    path: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def child(self, label: str) -> "RngState":
        return RngState(self.seed, self.path + (str(label),))

    def generator(self, label: str = "") -> np.random.Generator:
        """Return a fresh generator for the stream ``path + (label,)``."""
        parts = self.path + ((label,) if label else ())
        digest = hashlib.sha256("\x1f".join(parts).encode("utf-8")).digest()
        words = [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]
        entropy = [self.seed & _MASK32, (self.seed >> 32) & _MASK32, *words]
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def as_rng(rng: RngState | int) -> RngState:
    return rng if isinstance(rng, RngState) else RngState(int(rng))
