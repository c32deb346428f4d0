"""Seed derivation: every random choice in a run descends from one master seed."""

import numpy as np

# Independent streams so that, e.g., adding dropout never shifts minibatch order.
INIT_STREAM = 0
TRAIN_STREAM = 1
SELECT_STREAM = 2
DROPOUT_STREAM = 3
DATA_STREAM = 4


def derive_seed(master: int, stream: int, *keys: int) -> int:
    """Return a 64-bit seed for (master, stream, keys...)."""
    seq = np.random.SeedSequence([master, stream, *keys])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def make_rng(master: int, stream: int, *keys: int) -> np.random.Generator:
    """Return a generator seeded from (master, stream, keys...)."""
    return np.random.default_rng(np.random.SeedSequence([master, stream, *keys]))
