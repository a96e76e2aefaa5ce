"""Seeding for reproducible sampling.

Every random object is drawn from a Philox (counter-based) bit generator
keyed by a numpy SeedSequence built from an integer path, e.g.
``(seed, n, sample_index)``.  Two streams with different paths are
statistically independent, and a stream depends only on its own path, so
parallel or partial re-runs reproduce sequential results exactly.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def make_rng(*path: int) -> np.random.Generator:
    """Generator for the stream addressed by ``path`` (non-negative ints)."""
    if not path:
        raise ValueError("empty seed path")
    words = []
    for p in path:
        p = int(p)
        if p < 0:
            raise ValueError(f"seed path entries must be non-negative, got {p}")
        words.append(p & MASK64)
        if p > MASK64:
            words.append(p >> 64)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))


def derive_seed(*path: int) -> int:
    """A 64-bit seed derived from ``path``; used in reports for provenance."""
    ss = np.random.SeedSequence([int(p) & MASK64 for p in path])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
