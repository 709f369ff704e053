"""Seeded direction sampling on the unit sphere and inside the unit ball.

All randomness in zobench flows through :class:`RandomSource`, a thin owner of
a numpy ``Generator`` backed by the PCG64 bit generator.  PCG64 output and
numpy's ziggurat normal sampler are stable across platforms, so a seed fully
determines every trace.

Draw accounting (per call, in generator order):

* ``sample_sphere(d)`` -- one ``standard_normal(d)`` call; a further call for
  every all-zero draw (probability zero in practice).
* ``sample_sphere_batch(d, k)`` -- one ``standard_normal((k, d))`` call, which
  consumes the stream exactly like ``k`` successive ``sample_sphere(d)`` calls.
* ``sample_ball(d)`` -- one sphere sample followed by one ``random()`` draw.
* ``sample_ball_batch(d, n)`` -- ``standard_normal((n, d))`` then ``random(n)``.

Sub-streams are derived by seed splitting, ``SeedSequence(seed,
spawn_key=(stream,))``, so that e.g. noise draws never shift the estimator's
direction stream.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError

PRNG_NAME = "numpy.PCG64"

# Documented sub-stream identifiers.
STREAM_ESTIMATOR = 0
STREAM_NOISE = 1
STREAM_DIAGNOSTICS = 2
STREAM_INIT = 3

_MAX_SEED = 2**64 - 1


class RandomSource:
    """Single-owner random stream identified by ``(seed, stream)``."""

    __slots__ = ("seed", "stream", "generator")

    def __init__(self, seed: int, stream: int | None = None):
        seed = int(seed)
        if not 0 <= seed <= _MAX_SEED:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.stream = stream
        if stream is None:
            seq = np.random.SeedSequence(seed)
        else:
            seq = np.random.SeedSequence(seed, spawn_key=(int(stream),))
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def substream(self, stream: int) -> "RandomSource":
        """Independent source for ``stream``; does not touch this source's state."""
        return RandomSource(self.seed, stream)

    def standard_normal(self, shape) -> np.ndarray:
        return self.generator.standard_normal(shape)

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        return self.generator.uniform(low, high, size)

    def random(self, size=None):
        return self.generator.random(size)

    def __repr__(self):
        return f"RandomSource(seed={self.seed}, stream={self.stream})"


def _check_dim(d) -> int:
    d = int(d)
    if d < 1:
        raise DimensionError(f"dimension must be >= 1, got {d}")
    return d


def _normalize_rows(z: np.ndarray, rng: RandomSource) -> np.ndarray:
    norms = np.sqrt(np.einsum("ij,ij->i", z, z))
    for i in np.flatnonzero(norms == 0.0):
        while norms[i] == 0.0:
            z[i] = rng.standard_normal(z.shape[1])
            norms[i] = np.sqrt(z[i] @ z[i])
    z /= norms[:, None]
    return z


def sample_sphere(d: int, rng: RandomSource) -> np.ndarray:
    """One direction drawn uniformly from the unit sphere in ``d`` dimensions."""
    d = _check_dim(d)
    return _normalize_rows(rng.standard_normal((1, d)), rng)[0]


def sample_sphere_batch(d: int, k: int, rng: RandomSource) -> np.ndarray:
    """``k`` i.i.d. sphere directions as the rows of a ``(k, d)`` array."""
    d = _check_dim(d)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return _normalize_rows(rng.standard_normal((int(k), d)), rng)


def sample_ball(d: int, rng: RandomSource) -> np.ndarray:
    """One point drawn uniformly from the unit ball: sphere sample times ``U**(1/d)``."""
    d = _check_dim(d)
    u = sample_sphere(d, rng)
    # 1 - random() lies in (0, 1].
    return u * (1.0 - rng.random()) ** (1.0 / d)


def sample_ball_batch(d: int, n: int, rng: RandomSource) -> np.ndarray:
    """``n`` i.i.d. unit-ball points as the rows of an ``(n, d)`` array."""
    d = _check_dim(d)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    u = sample_sphere_batch(d, n, rng)
    radii = (1.0 - rng.random(int(n))) ** (1.0 / d)
    return u * radii[:, None]
