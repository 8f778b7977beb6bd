"""Derivation of per-subsystem random streams from one root seed.

A stream is named by a path of strings, e.g. ``("train", "zelda", "8")``.
Its seed is ``SeedSequence([root, crc32(part0), crc32(part1), ...])``, so any
stream can be reproduced without replaying the others.
"""

from __future__ import annotations

import zlib

import numpy as np


def seed_sequence(root: int, *path: object) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(root)] + [zlib.crc32(str(p).encode()) for p in path])


def derive_seed(root: int, *path: object) -> int:
    """A 63-bit integer seed for ``path`` (stable across runs and platforms)."""
    return int(seed_sequence(root, *path).generate_state(2, np.uint64)[0] >> np.uint64(1))


def rng_for(root: int, *path: object) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(root, *path))
