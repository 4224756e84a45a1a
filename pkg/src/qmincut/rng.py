"""Seed derivation.

Every random choice in the package flows from one integer seed.  Sub-seeds are
derived by labelled spawning so that adding a new consumer never shifts the
stream seen by an existing one.
"""
from __future__ import annotations

import zlib

import numpy as np


def _key(label) -> int:
    if isinstance(label, (int, np.integer)):
        return int(label) & 0xFFFFFFFF
    return zlib.crc32(str(label).encode())


def generator(seed: int, *labels) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by ``seed`` and a label path."""
    ss = np.random.SeedSequence(int(seed) & ((1 << 64) - 1), spawn_key=tuple(_key(x) for x in labels))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *labels) -> int:
    ss = np.random.SeedSequence(int(seed) & ((1 << 64) - 1), spawn_key=tuple(_key(x) for x in labels))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)
