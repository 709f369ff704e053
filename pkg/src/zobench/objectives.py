"""Synthetic benchmark objectives with analytic gradients and known optima.

Four separable-ish test functions, each with global minimum value 0::

    quadratic   F(x) = 1/2 sum x_i^2                                 min at 0
    cubic       F(x) = sum |x_i|^3 + x_i^2 / 2                       min at 0
    levy        F(x) = sin^2(pi w_1)
                       + sum_{i=2}^{d-1} (w_i - 1)^2 (1 + 10 sin^2(pi w_i + 1))
                       + (w_d - 1)^2 (1 + sin^2(2 pi w_d)),
                w_i = 1 + (x_i - 1) / 4                              min at 1
    rosenbrock  F(x) = sum_{i<d} 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2  min at 1

Note the Levy interior sum starts at i = 2; for d = 1 the head and tail
terms both act on w_1.

A :class:`NoiseModel` turns ``F`` into a stochastic oracle ``f(x; xi) = F(x) + xi``
with ``xi`` uniform on ``[-sigma*sqrt(3), sigma*sqrt(3)]`` (variance sigma^2).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import DimensionError, DomainError
from .sampler import RandomSource


class ObjectiveKind(str, enum.Enum):
    QUADRATIC = "quadratic"
    CUBIC = "cubic"
    LEVY = "levy"
    ROSENBROCK = "rosenbrock"

    @property
    def code(self) -> int:
        return _CODES[self]


_CODES = {
    ObjectiveKind.QUADRATIC: 0,
    ObjectiveKind.CUBIC: 1,
    ObjectiveKind.LEVY: 2,
    ObjectiveKind.ROSENBROCK: 3,
}


class NoiseKind(str, enum.Enum):
    NONE = "none"
    ADDITIVE_UNIFORM = "additive-uniform"


@dataclass(frozen=True)
class NoiseModel:
    kind: NoiseKind = NoiseKind.NONE
    sigma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if not (self.sigma >= 0.0 and math.isfinite(self.sigma)):
            raise ValueError(f"noise sigma must be finite and >= 0, got {self.sigma}")

    @classmethod
    def uniform(cls, sigma: float) -> "NoiseModel":
        """Additive uniform noise with standard deviation ``sigma`` (``sigma=0`` means none)."""
        if sigma == 0:
            return cls()
        return cls(NoiseKind.ADDITIVE_UNIFORM, float(sigma))

    @property
    def active(self) -> bool:
        return self.kind is NoiseKind.ADDITIVE_UNIFORM

    @property
    def half_width(self) -> float:
        return self.sigma * math.sqrt(3.0)

    def draw(self, rng: RandomSource) -> float:
        """One noise realization; consumes one uniform draw iff the model is active."""
        if not self.active:
            return 0.0
        h = self.half_width
        return float(rng.uniform(-h, h))


@dataclass(frozen=True)
class ObjectiveSpec:
    """Immutable description of a benchmark objective."""

    kind: ObjectiveKind
    dim: int
    noise: NoiseModel = field(default_factory=NoiseModel)

    def __post_init__(self):
        object.__setattr__(self, "kind", ObjectiveKind(self.kind))
        if int(self.dim) < 1:
            raise DimensionError(f"dimension must be >= 1, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))

    # -- batch interface shared with test probes -------------------------------------
    def values(self, points: np.ndarray) -> np.ndarray:
        """Noise-free values for each row of ``points``."""
        return _backend.kernels.values(self.kind.code, np.ascontiguousarray(points, dtype=np.float64))

    def value(self, theta) -> float:
        theta = self.check(theta)
        return float(self.values(theta[None, :])[0])

    def gradient(self, theta) -> np.ndarray:
        theta = self.check(theta)
        return _backend.kernels.gradient(self.kind.code, theta)

    def check(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=np.float64)
        if theta.ndim != 1 or theta.shape[0] != self.dim:
            raise DimensionError(f"expected a vector of length {self.dim}, got shape {theta.shape}")
        return theta

    @property
    def optimum_value(self) -> float:
        return 0.0

    def minimizer(self) -> np.ndarray:
        if self.kind in (ObjectiveKind.LEVY, ObjectiveKind.ROSENBROCK):
            return np.ones(self.dim)
        return np.zeros(self.dim)

    def default_theta0(self) -> np.ndarray:
        """Shared starting point: all-threes for Levy, all-twos otherwise."""
        return np.full(self.dim, 3.0 if self.kind is ObjectiveKind.LEVY else 2.0)


def evaluate(spec: ObjectiveSpec, theta, rng: RandomSource | None = None) -> float:
    """One stochastic evaluation ``F(theta) + xi``.

    ``rng`` is only consulted (one uniform draw) when the spec carries noise.
    """
    theta = spec.check(theta)
    if not np.all(np.isfinite(theta)):
        raise DomainError("theta contains non-finite components")
    value = spec.value(theta)
    if spec.noise.active:
        if rng is None:
            raise ValueError("a RandomSource is required for noisy objectives")
        value += spec.noise.draw(rng)
    return value


def true_gradient(spec: ObjectiveSpec, theta) -> np.ndarray:
    """Analytic gradient of the noise-free objective (a subgradient for cubic at 0)."""
    return spec.gradient(theta)


def optimality_gap(spec: ObjectiveSpec, theta) -> float:
    """``F(theta) - min F``, clamped at zero against round-off."""
    return max(spec.value(theta) - spec.optimum_value, 0.0)
