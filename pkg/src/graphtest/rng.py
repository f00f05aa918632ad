"""Deterministic random substreams.

Every random draw in the package comes from a generator keyed by
``(seed, purpose, *indices)``. Replicate ``i`` of a Monte Carlo loop always
sees the same stream no matter how replicates are batched or scheduled, so
results are bit-identical across worker counts.
"""

from __future__ import annotations

import numpy as np

# purpose tags keep streams for different jobs disjoint
GRAPH = 1
NULL = 2
EFFECT = 3
NOISE = 4
RANDOMIZATION = 5
THEORY = 6
TUNING = 7


def substream(seed: int, *keys: int) -> np.random.Generator:
    """Return an independent generator for ``(seed, *keys)``."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))
