"""Counter-based random streams.

Every stochastic routine in the library derives its randomness from a Philox
generator keyed by (seed, stream tag) with the counter indexing the substream.
Streams are therefore independent of execution order: a worker that handles
stratum `j` of a run seeded with `s` always sees the same bits, no matter how
the work was scheduled.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

# Stream tags.  Fixed integers, never reused for a different purpose.
STREAM_SECTOR_CONSTANT = 1
STREAM_PAIRING = 2
STREAM_VOLUME = 3
STREAM_SET_SAMPLE = 4
STREAM_BAND_CONFIG = 5
STREAM_DISJOINTNESS = 6
STREAM_HYPOTHESIS = 7
STREAM_GENERIC = 8


def substream(seed: int, tag: int, index: int = 0, subindex: int = 0) -> np.random.Generator:
    """Generator for the (tag, index, subindex) substream of `seed`."""
    key = np.array([seed & _MASK64, tag & _MASK64], dtype=np.uint64)
    counter = np.array([index & _MASK64, subindex & _MASK64, 0, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def sample_unit_ball(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    """Uniform points in the closed Euclidean unit ball of R^dim, shape (n, dim)."""
    g = rng.standard_normal((n, dim))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    radii = rng.random(n) ** (1.0 / dim)
    return g / norms * radii[:, None]
