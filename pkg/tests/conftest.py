import numpy as np
import pytest

from zobench import _backend
from zobench.objectives import NoiseModel

BACKENDS = ["python"] + (["cython"] if _backend.compiled_available() else [])


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run a test once per available kernel backend."""
    monkeypatch.setattr(_backend, "kernels", _backend.get(request.param))
    return request.param


class LinearProbe:
    """f(theta) = theta_1."""

    noise = NoiseModel()

    def __init__(self, dim):
        self.dim = dim
        self.calls = 0

    def values(self, points):
        self.calls += len(points)
        return np.asarray(points)[:, 0].copy()

    def gradient(self, theta):
        g = np.zeros(self.dim)
        g[0] = 1.0
        return g


class ConstantProbe:
    noise = NoiseModel()

    def __init__(self, dim, c=3.5):
        self.dim = dim
        self.c = c

    def values(self, points):
        return np.full(len(points), self.c)

    def gradient(self, theta):
        return np.zeros(self.dim)


class ClippedQuadraticProbe:
    """f(theta; xi) = min(|theta|^2 / 2, C) + xi, so |F| <= C by construction."""

    def __init__(self, dim, C, sigma=0.0):
        self.dim = dim
        self.C = C
        self.noise = NoiseModel.uniform(sigma)

    def values(self, points):
        pts = np.asarray(points)
        return np.minimum(0.5 * np.einsum("ij,ij->i", pts, pts), self.C)


class CountingObjective:
    """Wraps an objective and counts evaluated points."""

    def __init__(self, inner):
        self.inner = inner
        self.dim = inner.dim
        self.noise = inner.noise
        self.evaluations = 0

    def values(self, points):
        self.evaluations += len(points)
        return self.inner.values(points)


class NanProbe:
    noise = NoiseModel()

    def __init__(self, dim):
        self.dim = dim

    def values(self, points):
        out = np.zeros(len(points))
        out[-1] = np.nan
        return out


# --- acceptance report ------------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    def _report(criterion: str, passed: bool, detail: str):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
