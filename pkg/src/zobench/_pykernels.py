"""Pure-numpy kernels; the reference backend and the fallback when the
compiled extension is unavailable.

Objective codes: 0 quadratic, 1 cubic, 2 levy, 3 rosenbrock.
Update modes: 0 zo-sgd, 1 zo-signsgd, 2 zo-rmsprop, 3 zo-adamm, 4 r-adazo.
"""

import numpy as np

NAME = "python"

QUADRATIC, CUBIC, LEVY, ROSENBROCK = 0, 1, 2, 3
SGD, SIGNSGD, RMSPROP, ADAMM, RADAZO = 0, 1, 2, 3, 4


def values(kind, X):
    """Objective values for each row of the 2-D array ``X``."""
    X = np.asarray(X, dtype=np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        if kind == QUADRATIC:
            return 0.5 * np.einsum("ij,ij->i", X, X)
        if kind == CUBIC:
            a = np.abs(X)
            return (a * a * a + 0.5 * X * X).sum(axis=1)
        if kind == LEVY:
            W = 1.0 + (X - 1.0) * 0.25
            head = np.sin(np.pi * W[:, 0]) ** 2
            mid = W[:, 1:-1]
            body = ((mid - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * mid + 1.0) ** 2)).sum(axis=1)
            wd = W[:, -1]
            tail = (wd - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * wd) ** 2)
            return head + body + tail
        if kind == ROSENBROCK:
            lo, hi = X[:, :-1], X[:, 1:]
            return (100.0 * (hi - lo * lo) ** 2 + (1.0 - lo) ** 2).sum(axis=1)
    raise ValueError(f"unknown objective code {kind}")


def gradient(kind, theta):
    """Analytic (sub)gradient at a single point."""
    x = np.asarray(theta, dtype=np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        if kind == QUADRATIC:
            return x.copy()
        if kind == CUBIC:
            return 3.0 * x * np.abs(x) + x
        if kind == LEVY:
            w = 1.0 + (x - 1.0) * 0.25
            dw = np.zeros_like(w)
            dw[0] += np.pi * np.sin(2.0 * np.pi * w[0])
            mid = w[1:-1]
            s = np.sin(np.pi * mid + 1.0)
            dw[1:-1] += 2.0 * (mid - 1.0) * (1.0 + 10.0 * s * s) + 10.0 * np.pi * (mid - 1.0) ** 2 * np.sin(
                2.0 * (np.pi * mid + 1.0)
            )
            wd = w[-1]
            sd = np.sin(2.0 * np.pi * wd)
            dw[-1] += 2.0 * (wd - 1.0) * (1.0 + sd * sd) + 2.0 * np.pi * (wd - 1.0) ** 2 * np.sin(4.0 * np.pi * wd)
            return 0.25 * dw
        if kind == ROSENBROCK:
            g = np.zeros_like(x)
            lo, hi = x[:-1], x[1:]
            r = hi - lo * lo
            g[:-1] += -400.0 * lo * r - 2.0 * (1.0 - lo)
            g[1:] += 200.0 * r
            return g
    raise ValueError(f"unknown objective code {kind}")


def fd_estimate(kind, theta, U, mu, xi):
    """Random-direction forward-difference estimate.

    Returns ``(g, fvals)`` where ``fvals[0]`` is the shared central value and
    ``fvals[1 + k]`` the value at ``theta + mu * U[k]``; ``xi`` is added to
    every value.
    """
    k, d = U.shape
    pts = np.empty((k + 1, d))
    pts[0] = theta
    np.multiply(U, mu, out=pts[1:])
    pts[1:] += theta
    fvals = values(kind, pts) + xi
    coeffs = (fvals[1:] - fvals[0]) / mu
    g = coeffs @ U
    g *= d / k
    return g, fvals


def moment_step(mode, theta, g, m, v, beta1, beta2, eta, zeta):
    """One optimizer update. ``m`` and ``v`` are updated in place; returns new theta."""
    if mode == SGD:
        return theta - eta * g
    if mode == SIGNSGD:
        return theta - eta * np.sign(g)
    if mode == RMSPROP:
        v *= beta2
        v += (1.0 - beta2) * (g * g)
        return theta - eta * g / np.sqrt(v + zeta)
    if mode == ADAMM or mode == RADAZO:
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        if mode == ADAMM:
            v += (1.0 - beta2) * (g * g)
        else:
            v += (1.0 - beta2) * (m * m)
        return theta - eta * m / np.sqrt(v + zeta)
    raise ValueError(f"unknown update mode {mode}")
