"""Counter-based seed derivation.

Every random draw in the package comes from a generator whose seed is a pure
function of ``(parent_seed, stream, index)``.  The mixing function is numpy's
``SeedSequence`` hash: the parent seed is the entropy and ``(stream, index)``
the spawn key; the first 64 bits of its generated state are the child seed.
Generators are ``PCG64`` seeded with that child seed.  No generator state is
shared between replications, so parallel and sequential runs agree bitwise.
"""

import numpy as np

MASK64 = (1 << 64) - 1

# Stream identifiers used by the harness.
STREAM_DESIGN = 0
STREAM_REPLICATION = 1
STREAM_FOLDS = 2


def derive_seed(parent_seed, stream, index):
    """Return the 64-bit child seed for ``(parent_seed, stream, index)``."""
    ss = np.random.SeedSequence(int(parent_seed) & MASK64,
                                spawn_key=(int(stream), int(index)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(int(seed) & MASK64))
