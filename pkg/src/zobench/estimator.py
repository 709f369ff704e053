"""Random-direction finite-difference gradient estimation.

The estimator averages ``K`` forward differences along i.i.d. unit-sphere
directions ``u_k``::

    g = (d / K) * sum_k (f(theta + mu u_k; xi) - f(theta; xi)) / mu * u_k

The central value ``f(theta; xi)`` is evaluated once and shared by all K
differences, so one estimate costs exactly ``K + 1`` evaluations.  All K + 1
evaluations see the same noise realization ``xi``.

``g`` is an unbiased estimate of the gradient of the ball-smoothed function
``F_mu(theta) = E_{u ~ Unif(B^d)} F(theta + mu u)``.  The Monte-Carlo oracles
:func:`smoothed_value` and :func:`smoothed_gradient_oracle` estimate ``F_mu``
and its gradient independently of the estimator; they read true gradients and
exist for tests and diagnostics only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import ArgumentError, DimensionError, EvaluationError
from .objectives import ObjectiveSpec
from .sampler import RandomSource, sample_ball_batch, sample_sphere_batch

_ORACLE_CHUNK = 8192


@dataclass(frozen=True)
class EstimatorConfig:
    mu: float = 0.005
    k: int = 10

    def __post_init__(self):
        if not (self.mu > 0.0 and math.isfinite(self.mu)):
            raise ArgumentError(f"mu must be a positive finite number, got {self.mu}")
        if int(self.k) != self.k or self.k < 1:
            raise ArgumentError(f"k must be a positive integer, got {self.k}")
        object.__setattr__(self, "k", int(self.k))


@dataclass
class GradientEstimate:
    components: np.ndarray
    evaluations_used: int
    center_value: float

    def __array__(self, dtype=None, copy=None):
        return self.components if dtype is None else self.components.astype(dtype)

    def __len__(self):
        return len(self.components)


def _noise(objective, rng: RandomSource, noise_rng: RandomSource | None) -> float:
    noise = getattr(objective, "noise", None)
    if noise is None or not noise.active:
        return 0.0
    return noise.draw(noise_rng if noise_rng is not None else rng)


def estimate_gradient(
    objective,
    theta,
    cfg: EstimatorConfig,
    rng: RandomSource,
    noise_rng: RandomSource | None = None,
) -> GradientEstimate:
    """Estimate the gradient at ``theta`` from ``cfg.k + 1`` function values.

    ``objective`` is an :class:`ObjectiveSpec` or any object exposing ``dim``,
    ``values(points)`` and optionally ``noise``.  Directions come from ``rng``;
    the noise draw (if any) from ``noise_rng``, defaulting to ``rng``.
    """
    theta = np.asarray(theta, dtype=np.float64)
    d = objective.dim
    if theta.shape != (d,):
        raise DimensionError(f"expected theta of length {d}, got shape {theta.shape}")
    U = sample_sphere_batch(d, cfg.k, rng)
    xi = _noise(objective, rng, noise_rng)
    g, fvals = directional_estimate(objective, theta, U, cfg.mu, xi)
    return GradientEstimate(g, cfg.k + 1, float(fvals[0]))


def directional_estimate(objective, theta, U, mu: float, xi: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Estimate from caller-supplied directions (rows of ``U``).

    Returns ``(g, fvals)`` with ``fvals[0]`` the central value; every value
    includes the shared noise offset ``xi``.
    """
    theta = np.asarray(theta, dtype=np.float64)
    U = np.ascontiguousarray(U, dtype=np.float64)
    k, d = U.shape
    if theta.shape != (d,):
        raise DimensionError(f"theta has shape {theta.shape}, directions have dimension {d}")
    if isinstance(objective, ObjectiveSpec):
        g, fvals = _backend.kernels.fd_estimate(objective.kind.code, theta, U, mu, xi)
    else:
        pts = np.empty((k + 1, d))
        pts[0] = theta
        np.multiply(U, mu, out=pts[1:])
        pts[1:] += theta
        fvals = np.asarray(objective.values(pts), dtype=np.float64) + xi
        g = ((fvals[1:] - fvals[0]) / mu) @ U
        g *= d / k
    if not (np.all(np.isfinite(fvals)) and np.all(np.isfinite(g))):
        raise EvaluationError("non-finite objective value during gradient estimation", theta=theta.copy())
    return g, fvals


def _oracle_args(objective, theta, mu, n_samples):
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (objective.dim,):
        raise DimensionError(f"expected theta of length {objective.dim}, got shape {theta.shape}")
    if int(n_samples) != n_samples or n_samples < 1:
        raise ArgumentError(f"n_samples must be a positive integer, got {n_samples}")
    if not mu > 0.0:
        raise ArgumentError(f"mu must be positive, got {mu}")
    return theta, int(n_samples)


def _chunks(n):
    done = 0
    while done < n:
        size = min(_ORACLE_CHUNK, n - done)
        yield size
        done += size


class _MomentAccumulator:
    """Chunk-wise mean/variance merge (Chan et al.), stable for small spreads."""

    def __init__(self, shape):
        self.n = 0
        self.mean = np.zeros(shape)
        self.m2 = np.zeros(shape)

    def add(self, batch: np.ndarray):
        nb = batch.shape[0]
        mb = batch.mean(axis=0)
        m2b = ((batch - mb) ** 2).sum(axis=0)
        n = self.n + nb
        delta = mb - self.mean
        self.mean = self.mean + delta * (nb / n)
        self.m2 = self.m2 + m2b + delta * delta * (self.n * nb / n)
        self.n = n

    def result(self):
        if self.n < 2:
            return self.mean, np.full(self.mean.shape, math.inf)
        return self.mean, np.sqrt(self.m2 / (self.n - 1) / self.n)


def smoothed_value(objective, theta, mu: float, n_samples: int, rng: RandomSource) -> tuple[float, float]:
    """Monte-Carlo ``(mean, std_error)`` of ``F(theta + mu u)`` with ``u ~ Unif(B^d)``."""
    theta, n = _oracle_args(objective, theta, mu, n_samples)
    acc = _MomentAccumulator(())
    for size in _chunks(n):
        acc.add(np.asarray(objective.values(theta + mu * sample_ball_batch(objective.dim, size, rng))))
    mean, se = acc.result()
    return float(mean), float(se)


def smoothed_gradient_oracle(
    objective, theta, mu: float, n_samples: int, rng: RandomSource
) -> tuple[np.ndarray, np.ndarray]:
    """Monte-Carlo ``(mean, std_error)`` of the smoothed gradient.

    Averages the analytic gradient over ``theta + mu u``, ``u ~ Unif(B^d)``;
    differentiation under the expectation makes this ``grad F_mu(theta)``.
    """
    theta, n = _oracle_args(objective, theta, mu, n_samples)
    d = objective.dim
    acc = _MomentAccumulator((d,))
    for size in _chunks(n):
        pts = theta + mu * sample_ball_batch(d, size, rng)
        acc.add(np.array([objective.gradient(p) for p in pts]))
    return acc.result()
