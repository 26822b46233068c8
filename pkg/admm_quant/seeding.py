"""
Seeded random streams.

Every run owns its generators; they are counter-based (Philox) and keyed by the
run seed plus a purpose key, so draws for the initial point and the ADMM-R masks
never interfere and never depend on scheduling.
"""

import numpy as np

INIT_STREAM = 0
MASK_STREAM = 1


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, keys)])))


def derive_seed(seed: int, *keys: int) -> int:
    """A 64-bit child seed for (seed, *keys)"""
    state = np.random.SeedSequence([int(seed), *map(int, keys)]).generate_state(1, dtype=np.uint64)
    return int(state[0])
