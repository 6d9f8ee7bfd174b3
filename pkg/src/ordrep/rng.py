"""Seeded random streams.

All randomness goes through numpy's PCG64 bit generator, whose output
stream is fixed by its published algorithm and identical across platforms.
Normal deviates use Box-Muller on top of it instead of numpy's ziggurat so
the transform is documented here and does not depend on numpy internals.
"""

import numpy as np

SEED_MASK = (1 << 64) - 1


def make_rng(seed):
    """Return a PCG64-backed generator for a 64-bit integer seed."""
    return np.random.Generator(np.random.PCG64(int(seed) & SEED_MASK))


def uniform(rng, size):
    return rng.random(size)


def normal(rng, n):
    """Draw ``n`` standard normal deviates by Box-Muller.

    Uniform pairs are consumed in order; both the cosine and the sine
    branch are used, so ``n`` deviates cost ``2 * ceil(n / 2)`` uniforms.
    """
    m = (n + 1) // 2
    u = rng.random((m, 2))
    # 1 - u lies in (0, 1], keeps log finite
    radius = np.sqrt(-2.0 * np.log(1.0 - u[:, 0]))
    angle = 2.0 * np.pi * u[:, 1]
    z = np.empty(2 * m)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    return z[:n]
