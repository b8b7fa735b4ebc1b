"""Seed derivation.

Every stochastic routine in the package takes a 64-bit seed and builds its own
``numpy.random.Generator`` over a Philox counter-based bit generator.  Replica
seeds are derived from a master seed with the splitmix64 finalizer, so the
stream for replica ``i`` depends only on ``(master_seed, i)`` and never on
thread scheduling.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(z: int) -> int:
    """splitmix64 output function (Steele, Lea & Flood 2014)."""
    z = (z + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix(master_seed: int, index: int) -> int:
    """Seed for stream ``index`` under ``master_seed``."""
    return splitmix64((master_seed & MASK64) ^ splitmix64(index & MASK64))


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed & MASK64))
