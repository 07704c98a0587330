"""Seeded random streams with counter-based splitting.

Every randomized routine in this package draws from a named substream of a
single 64-bit root seed. Substreams are derived with ``SeedSequence`` spawn
keys and fed into the counter-based Philox generator, so the values drawn for
one coordinate (a row, a trial, a pipeline stage) never depend on how many
draws another coordinate consumed. Results are therefore identical no matter
how work is partitioned across threads or in what order coordinates are
visited.
"""

from __future__ import annotations

import numpy as np

# Stage tags keep substreams of different operations disjoint even when they
# share the root seed and index arguments.
POWER_ITERATION = 1
HYBRID_SAMPLER = 2
L1_ROW_SAMPLER = 3
VECTOR_SAMPLER = 4
OUTER_PRODUCT_A = 5
OUTER_PRODUCT_B = 6
PAIR_SAMPLER = 7
AMM_SKETCH_A = 8
AMM_SKETCH_B = 9
TRIAL = 10

_U64 = (1 << 64) - 1


def substream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator for the substream named by ``path`` under ``seed``.

    ``seed`` may be any Python int; it is reduced to 64 bits (two's
    complement for negatives). Path components must be non-negative ints.
    """
    entropy = int(seed) & _U64
    key = tuple(int(p) for p in path)
    if any(p < 0 for p in key):
        raise ValueError(f"substream path must be non-negative, got {key}")
    seq = np.random.SeedSequence(entropy, spawn_key=key)
    return np.random.Generator(np.random.Philox(seq))
