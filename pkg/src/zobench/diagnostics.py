"""Moment-quality diagnostics and the first-moment variance-reduction check.

Two families of measurement:

* Along a trajectory (:func:`instrumented_run`): how well ``g_t`` and ``m_t``
  align with the true gradient ``grad F(theta_{t-1})``, and how far each
  second-moment recursion (squared estimates vs. squared first moments) lies
  from the same recursion driven by the squared true gradient.
* At a fixed point (:func:`variance_reduction_ratio`): the stationary variance
  of the EMA ``m = b1 m + (1 - b1) g`` over i.i.d. estimates ``g``, relative
  to ``Var(g)``.  For an AR(1) filter this is ``(1 - b1) / (1 + b1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DimensionError, UndefinedReferenceError
from .estimator import EstimatorConfig, estimate_gradient
from .objectives import ObjectiveSpec
from .optimizers import HyperParams, OptimizerKind, OptimizerState, run
from .sampler import RandomSource
from .trace import TraceRecord

_TINY_NORM = 1e-300


@dataclass
class MomentDiagnostics:
    cos_g: float
    cos_m: float | None = None
    relerr_v_ori: float | None = None
    relerr_v_ours: float | None = None


def cosine_similarity(a, b) -> float:
    """Cosine of the angle between ``a`` and ``b``; 0 if either is (numerically) zero."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na < _TINY_NORM or nb < _TINY_NORM:
        return 0.0
    c = float(np.dot(a / na, b / nb))
    return min(1.0, max(-1.0, c))


def relative_error(v_est, v_ref) -> float:
    """``||v_est - v_ref|| / ||v_ref||``."""
    v_est = np.asarray(v_est, dtype=np.float64)
    v_ref = np.asarray(v_ref, dtype=np.float64)
    if v_est.shape != v_ref.shape:
        raise DimensionError(f"length mismatch: {v_est.shape} vs {v_ref.shape}")
    ref_norm = np.linalg.norm(v_ref)
    if ref_norm == 0.0:
        raise UndefinedReferenceError("reference vector is zero")
    return float(np.linalg.norm(v_est - v_ref) / ref_norm)


def min_burn_in(beta1: float) -> int:
    """Burn-in long enough that ``beta1**n`` is below ~5e-5."""
    # The slack stops 1 - 0.9 = 0.0999... from rounding 100 up to 101.
    return math.ceil(10.0 / (1.0 - beta1) - 1e-9)


def variance_reduction_ratio(
    spec: ObjectiveSpec,
    theta_fixed,
    cfg: EstimatorConfig,
    beta1: float,
    n_burn: int | None = None,
    n_measure: int = 5000,
    rng: RandomSource | None = None,
) -> tuple[float, float]:
    """Measured ``Var(m_i) / Var(g_i)`` (averaged over coordinates) and ``(1-b1)/(1+b1)``.

    Estimates are drawn i.i.d. at the fixed point ``theta_fixed``; the EMA is
    burned in for ``n_burn`` steps before ``n_measure`` samples are collected.
    """
    if not 0.0 <= beta1 < 1.0:
        raise ArgumentError(f"beta1 must lie in [0, 1), got {beta1}")
    if n_measure < 100:
        raise ArgumentError(f"n_measure must be >= 100, got {n_measure}")
    required = min_burn_in(beta1)
    if n_burn is None:
        n_burn = required
    elif n_burn < required:
        raise ArgumentError(f"n_burn must be >= {required} for beta1={beta1}, got {n_burn}")
    if rng is None:
        rng = RandomSource(0)
    theta = spec.check(theta_fixed)
    d = spec.dim

    m = np.zeros(d)
    for _ in range(n_burn):
        g = estimate_gradient(spec, theta, cfg, rng).components
        m = beta1 * m + (1.0 - beta1) * g

    # Welford accumulators for g and m.
    mean_g = np.zeros(d)
    m2_g = np.zeros(d)
    mean_m = np.zeros(d)
    m2_m = np.zeros(d)
    for n in range(1, n_measure + 1):
        g = estimate_gradient(spec, theta, cfg, rng).components
        m = beta1 * m + (1.0 - beta1) * g
        dg = g - mean_g
        mean_g += dg / n
        m2_g += dg * (g - mean_g)
        dm = m - mean_m
        mean_m += dm / n
        m2_m += dm * (m - mean_m)
    usable = m2_g > 0.0
    if not np.any(usable):
        raise UndefinedReferenceError("gradient estimates have zero variance at theta_fixed")
    ratio = float(np.mean(m2_m[usable] / m2_g[usable]))
    return ratio, (1.0 - beta1) / (1.0 + beta1)


class _MomentObserver:
    """Read-only per-step hook computing :class:`MomentDiagnostics`."""

    def __init__(self, spec: ObjectiveSpec, kind: OptimizerKind, hp: HyperParams, v0):
        self.spec = spec
        self.kind = kind
        self.beta2 = hp.beta2
        d = spec.dim
        base = np.zeros(d) if v0 is None else np.broadcast_to(np.asarray(v0, dtype=np.float64), (d,)).copy()
        self.v_ref = base.copy()
        # Shadow recursions for whichever second moment the optimizer does not keep itself.
        self.v_ori = base.copy() if kind is OptimizerKind.R_ADAZO else None
        self.v_ours = base.copy() if kind is OptimizerKind.ZO_ADAMM else None
        self.latest: dict[int, MomentDiagnostics] = {}

    def _relerr(self, v):
        if v is None:
            return None
        try:
            return relative_error(v, self.v_ref)
        except UndefinedReferenceError:
            return math.nan

    def __call__(self, t: int, theta_prev: np.ndarray, g: np.ndarray, state: OptimizerState) -> dict:
        b2 = self.beta2
        grad = self.spec.gradient(theta_prev)
        self.v_ref = b2 * self.v_ref + (1.0 - b2) * (grad * grad)
        diag = MomentDiagnostics(cos_g=cosine_similarity(g, grad))
        if state.m is not None:
            diag.cos_m = cosine_similarity(state.m, grad)
        if self.kind is OptimizerKind.R_ADAZO:
            self.v_ori = b2 * self.v_ori + (1.0 - b2) * (g * g)
            diag.relerr_v_ori = self._relerr(self.v_ori)
            diag.relerr_v_ours = self._relerr(state.v)
        elif self.kind is OptimizerKind.ZO_ADAMM:
            self.v_ours = b2 * self.v_ours + (1.0 - b2) * (state.m * state.m)
            diag.relerr_v_ori = self._relerr(state.v)
            diag.relerr_v_ours = self._relerr(self.v_ours)
        elif self.kind is OptimizerKind.ZO_RMSPROP:
            diag.relerr_v_ori = self._relerr(state.v)
        self.latest[t] = diag
        return {k: v for k, v in vars(diag).items() if v is not None}


def instrumented_run(
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
    every: int | None = None,
) -> list[tuple[TraceRecord, MomentDiagnostics | None]]:
    """Same trajectory as :func:`zobench.optimizers.run`, with moment diagnostics.

    The reference second moment is the ``beta2`` recursion over squared true
    gradients at ``theta_{t-1}``, seeded at ``v0`` (zero by default).  Fields
    an optimizer has no moment for stay ``None``; iteration 0 has no
    diagnostics.
    """
    kind = OptimizerKind(kind)
    observer = _MomentObserver(spec, kind, hp, v0)
    trace = run(kind, spec, cfg, hp, theta0, T, seed, m0=m0, v0=v0, observer=observer, every=every)
    return [(rec, observer.latest.get(rec.iter) if rec.iter > 0 and rec.error is None else None) for rec in trace]
