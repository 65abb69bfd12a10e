"""Seed derivation: every stream is keyed by (seed, *path) and independent of call order."""
from typing import Sequence

import numpy as np

SeedLike = int | np.random.SeedSequence | np.random.Generator | None


def derive_seed(seed: int, *path: int) -> np.random.SeedSequence:
    """Child seed sequence for a position in the work tree, e.g. (size_idx, rep_idx)."""
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))


def make_rng(seed: SeedLike = None, path: Sequence[int] = ()) -> np.random.Generator:
    """Build a Generator from an int, a SeedSequence or pass an existing Generator through."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        if path:
            seed = np.random.SeedSequence(
                entropy=seed.entropy, spawn_key=tuple(seed.spawn_key) + tuple(int(p) for p in path)
            )
        return np.random.default_rng(seed)
    if seed is None:
        return np.random.default_rng()
    return np.random.default_rng(derive_seed(seed, *path))

