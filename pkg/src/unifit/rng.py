"""Reproducible random streams for the Monte Carlo machinery.

Every replication of every simulation draws from its own Philox substream,
keyed by (seed, purpose, replication index). Philox is counter-based, so
distinct keys give statistically independent streams and the result of a
simulation does not depend on how replications are scheduled across
workers. Purposes keep calibration draws disjoint from power-study draws
under the same user-facing seed.
"""

import numpy as np

# Purpose codes occupy the top 16 bits of the second key word.
PURPOSE_SIMULATION = 0
PURPOSE_CALIBRATION = 1

_MASK48 = (1 << 48) - 1
_MASK64 = (1 << 64) - 1


def substream(seed: int, purpose: int, rep: int) -> np.random.Generator:
    """Return the generator for one replication of one purpose."""
    if rep < 0 or rep > _MASK48:
        raise ValueError(f"replication index out of range: {rep}")
    key = np.array(
        [seed & _MASK64, ((purpose & 0xFFFF) << 48) | (rep & _MASK48)],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


def uniform_block(seed: int, purpose: int, first_rep: int, reps: int, n: int) -> np.ndarray:
    """(reps, n) matrix of U(0,1) draws, row r from substream(seed, purpose, first_rep + r)."""
    out = np.empty((reps, n))
    for r in range(reps):
        out[r] = substream(seed, purpose, first_rep + r).random(n)
    return out
