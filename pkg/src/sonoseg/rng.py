"""Counter-based SplitMix64 streams.

The phantom generator needs noise that is bit-identical on every platform and
numpy version, so it does not use ``numpy.random``.  Output ``i`` of the stream
seeded with ``s`` is ``mix64(s + (i + 1) * GOLDEN_GAMMA)``, exactly the value
the sequential SplitMix64 generator (Steele, Lea & Flood 2014) produces on its
``i``-th call.  Because the state update is a plain counter, whole blocks are
computed at once with uint64 array arithmetic (which wraps modulo 2**64).
"""

import numpy as np

GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed, start, count):
    """Raw 64-bit outputs ``start .. start+count-1`` of the stream for ``seed``."""
    s = np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = s + idx * GOLDEN_GAMMA
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def uniform(seed, start, count):
    """Doubles in (0, 1]: top 53 bits of each output, shifted off zero."""
    bits = splitmix64(seed, start, count) >> np.uint64(11)
    return (bits.astype(np.float64) + 1.0) * 2.0**-53


def normal(seed, start, count):
    """Standard normals via Box-Muller (cosine branch), consuming ``2*count`` outputs."""
    u = uniform(seed, start, 2 * count)
    u1, u2 = u[0::2], u[1::2]
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
