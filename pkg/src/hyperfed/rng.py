"""Seed derivation so every consumer of randomness gets its own stream."""

import numpy as np

# stream tags
PARTITION = 1
MASKS = 2
INIT = 3
DROPOUT = 4
SYNTHETIC = 5


def seeded_rng(seed: int, *keys: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, keys)]))
