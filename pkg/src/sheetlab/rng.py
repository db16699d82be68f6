"""Counter-based splittable random streams.

Every stochastic routine in the package derives its randomness from a Philox
counter-based generator keyed by a (master_seed, replicate, component, ...)
tuple, so replicate k is the same no matter how many replicates are drawn,
in what order, or on how many workers.
"""

from __future__ import annotations

import numpy as np

_KEY_MOD = 2 ** 64


def stream(*key: int) -> np.random.Generator:
    """Independent generator for an integer key tuple."""
    if not key:
        raise ValueError("stream key must be nonempty")
    # Philox accepts a 128-bit key; fold the tuple into two 64-bit words.
    words = [0, 0]
    for i, k in enumerate(key):
        words[i % 2] = (words[i % 2] * 0x9E3779B97F4A7C15 + int(k) + i + 1) % _KEY_MOD
    packed = words[0] | (words[1] << 64)
    return np.random.Generator(np.random.Philox(key=packed))


def normals(shape, *key: int) -> np.ndarray:
    return stream(*key).standard_normal(shape)
