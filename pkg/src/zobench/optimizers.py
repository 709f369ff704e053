"""Zeroth-order update rules behind one stepping interface.

=============  ==============================================================
token          update (all operations elementwise)
=============  ==============================================================
zo-sgd         theta -= eta * g
zo-signsgd     theta -= eta * sign(g)                        (sign(0) = 0)
zo-rmsprop     v = b2 v + (1-b2) g^2;  theta -= eta * g / sqrt(v + zeta)
zo-adamm       m = b1 m + (1-b1) g;  v = b2 v + (1-b2) g^2
               theta -= eta * m / sqrt(v + zeta)
r-adazo        m = b1 m + (1-b1) g;  v = b2 v + (1-b2) m^2
               theta -= eta * m / sqrt(v + zeta)
=============  ==============================================================

None of the rules apply Adam's ``1 - beta^t`` bias correction: rescaling the
first moment would undo the variance reduction it provides.  ``zeta`` sits
inside the square root.

R-AdaZO differs from ZO-AdaMM only in feeding the squared *first moment*,
rather than the squared raw estimate, into the second moment.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _backend
from .errors import ArgumentError, DimensionError, EvaluationError
from .estimator import EstimatorConfig, GradientEstimate, estimate_gradient
from .objectives import ObjectiveSpec
from .sampler import STREAM_ESTIMATOR, STREAM_NOISE, RandomSource
from .trace import TraceRecord

MAX_LOGGED_ROWS = 10_000


class OptimizerKind(str, enum.Enum):
    ZO_SGD = "zo-sgd"
    ZO_SIGNSGD = "zo-signsgd"
    ZO_RMSPROP = "zo-rmsprop"
    ZO_ADAMM = "zo-adamm"
    R_ADAZO = "r-adazo"

    @property
    def mode(self) -> int:
        return list(OptimizerKind).index(self)

    @property
    def uses_first_moment(self) -> bool:
        return self in (OptimizerKind.ZO_ADAMM, OptimizerKind.R_ADAZO)

    @property
    def uses_second_moment(self) -> bool:
        return self in (OptimizerKind.ZO_RMSPROP, OptimizerKind.ZO_ADAMM, OptimizerKind.R_ADAZO)


@dataclass(frozen=True)
class HyperParams:
    beta1: float = 0.9
    beta2: float = 0.99
    eta: float = 0.001
    zeta: float = 1e-8

    def __post_init__(self):
        if not 0.0 <= self.beta1 < 1.0:
            raise ArgumentError(f"beta1 must lie in [0, 1), got {self.beta1}")
        if not 0.0 <= self.beta2 < 1.0:
            raise ArgumentError(f"beta2 must lie in [0, 1), got {self.beta2}")
        if not (self.eta > 0.0 and math.isfinite(self.eta)):
            raise ArgumentError(f"eta must be positive and finite, got {self.eta}")
        if not (self.zeta >= 0.0 and math.isfinite(self.zeta)):
            raise ArgumentError(f"zeta must be non-negative and finite, got {self.zeta}")


@dataclass
class OptimizerState:
    """Mutable per-run state; ``m``/``v`` are ``None`` for rules that lack them."""

    kind: OptimizerKind
    hp: HyperParams
    m: np.ndarray | None
    v: np.ndarray | None
    t: int = 0
    dim: int = 0


def new_state(kind, d: int, hp: HyperParams | None = None, m0=None, v0=None) -> OptimizerState:
    """Fresh state at ``t = 0``; moments default to zero vectors."""
    kind = OptimizerKind(kind)
    hp = hp or HyperParams()
    d = int(d)
    if d < 1:
        raise DimensionError(f"dimension must be >= 1, got {d}")

    def _vec(x, name):
        if x is None:
            return np.zeros(d)
        arr = np.array(x, dtype=np.float64).reshape(-1) if np.ndim(x) else np.full(d, float(x))
        if arr.shape != (d,):
            raise DimensionError(f"{name} must have length {d}, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise ArgumentError(f"{name} must be finite")
        return arr

    m = _vec(m0, "m0")
    v = _vec(v0, "v0")
    if np.any(v < 0):
        raise ArgumentError("v0 must be non-negative componentwise")
    return OptimizerState(
        kind=kind,
        hp=hp,
        m=m if kind.uses_first_moment else None,
        v=v if kind.uses_second_moment else None,
        dim=d,
    )


def step(state: OptimizerState, theta, g) -> np.ndarray:
    """Advance ``state`` by one update using estimate ``g``; returns the new theta."""
    if isinstance(g, GradientEstimate):
        g = g.components
    theta = np.asarray(theta, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if theta.shape != (state.dim,) or g.shape != (state.dim,):
        raise DimensionError(f"state has dimension {state.dim}; got theta {theta.shape}, g {g.shape}")
    if not np.all(np.isfinite(g)):
        raise EvaluationError("non-finite gradient estimate", theta=theta.copy())
    hp = state.hp
    new_theta = _backend.kernels.moment_step(
        state.kind.mode, theta, g, state.m, state.v, hp.beta1, hp.beta2, hp.eta, hp.zeta
    )
    state.t += 1
    return new_theta


def log_every(T: int) -> int:
    """Logging stride: every iteration up to 10^4, else ceil(T / 10^4)."""
    return max(1, -(-int(T) // MAX_LOGGED_ROWS))


# observer(t, theta_prev, g, state) -> dict of extra TraceRecord fields
Observer = Callable[[int, np.ndarray, np.ndarray, OptimizerState], dict]


def run(
    kind,
    spec: ObjectiveSpec,
    cfg: EstimatorConfig,
    hp: HyperParams,
    theta0,
    T: int,
    seed: int,
    *,
    m0=None,
    v0=None,
    observer: Observer | None = None,
    every: int | None = None,
) -> list[TraceRecord]:
    """Run ``T`` estimate-then-step iterations and return the trace.

    The trace starts with an iteration-0 record at ``theta0``.  Directions and
    noise come from independent sub-streams of ``seed``.  ``observer`` is
    called read-only after every step, and its columns are merged into logged
    records; it cannot perturb the trajectory.  A numerical failure stops the
    run and appends a record carrying ``error``.
    """
    if int(T) != T or T < 0:
        raise ArgumentError(f"T must be a non-negative integer, got {T}")
    T = int(T)
    theta = spec.check(np.array(theta0, dtype=np.float64))
    state = new_state(kind, spec.dim, hp, m0, v0)
    base = RandomSource(seed)
    dir_rng = base.substream(STREAM_ESTIMATOR)
    noise_rng = base.substream(STREAM_NOISE)
    stride = every or log_every(T)

    f0 = spec.value(theta)
    trace = [TraceRecord(0, f0, max(f0, 0.0), 0.0)]
    for t in range(1, T + 1):
        try:
            g = estimate_gradient(spec, theta, cfg, dir_rng, noise_rng)
            new_theta = step(state, theta, g)
            if not np.all(np.isfinite(new_theta)):
                raise EvaluationError("update produced a non-finite parameter", theta=theta.copy())
        except EvaluationError as exc:
            fval = spec.value(theta)
            trace.append(TraceRecord(t, fval, max(fval, 0.0), 0.0, error=f"iteration {t}: {exc}"))
            return trace
        extra = observer(t, theta, g.components, state) if observer is not None else None
        delta = new_theta - theta
        theta = new_theta
        if t % stride == 0 or t == T:
            fval = spec.value(theta)
            if not math.isfinite(fval):
                trace.append(TraceRecord(t, fval, fval, 0.0, error=f"iteration {t}: objective overflowed"))
                return trace
            rec = TraceRecord(t, fval, max(fval, 0.0), float(np.linalg.norm(delta)))
            if extra:
                for key, value in extra.items():
                    setattr(rec, key, value)
            trace.append(rec)
    return trace
