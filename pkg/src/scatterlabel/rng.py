"""Seeded randomness with a pinned bit-stream.

Every stochastic artifact in this package (dataset generators, splits,
t-SNE initialization) draws from `make_rng(seed)` — a PCG64 generator whose
raw uniform stream is stable across numpy releases.  Gaussian variates are
produced by `normals`, an explicit Box-Muller transform of those uniforms,
rather than `Generator.standard_normal`, whose ziggurat tables are not part
of numpy's compatibility promise.  This is what makes "same seed, same
bytes" hold across environments.
"""

import numpy as np


def make_rng(seed):
    """A named, seedable 64-bit generator (PCG64)."""
    return np.random.Generator(np.random.PCG64(seed))


def normals(rng, shape):
    """Standard normal samples via Box-Muller on `rng.random()` uniforms.

    Consumes uniforms in a fixed order so the output is a pure function of
    the generator state.
    """
    count = int(np.prod(shape)) if shape else 1
    pairs = (count + 1) // 2
    u1 = rng.random(pairs)
    u2 = rng.random(pairs)
    # Guard log(0); rng.random() yields [0, 1), so flip to (0, 1].
    r = np.sqrt(-2.0 * np.log(1.0 - u1))
    theta = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:count].reshape(shape)
