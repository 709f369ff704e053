import os
import subprocess
import sys

import numpy as np
import pytest

from zobench import _backend, _pykernels
from zobench.objectives import ObjectiveKind
from zobench.optimizers import OptimizerKind

pytestmark = pytest.mark.skipif(not _backend.compiled_available(), reason="compiled kernels not built")


@pytest.fixture(scope="module")
def ck():
    return _backend.get("cython")


@pytest.mark.parametrize("kind", list(ObjectiveKind))
@pytest.mark.parametrize("d", [1, 2, 3, 64, 1000])
def test_values_and_gradients_agree(ck, kind, d):
    rng = np.random.default_rng(d)
    X = rng.uniform(-3, 3, size=(7, d))
    np.testing.assert_allclose(ck.values(kind.code, X), _pykernels.values(kind.code, X), rtol=1e-13, atol=1e-13)
    np.testing.assert_allclose(ck.gradient(kind.code, X[0]), _pykernels.gradient(kind.code, X[0]), rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("kind", list(ObjectiveKind))
def test_fd_estimates_agree(ck, kind):
    rng = np.random.default_rng(11)
    d, k = 200, 10
    theta = rng.uniform(-2, 2, size=d)
    U = rng.standard_normal((k, d))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    g_c, f_c = ck.fd_estimate(kind.code, theta, U, 0.005, 0.25)
    g_p, f_p = _pykernels.fd_estimate(kind.code, theta, U, 0.005, 0.25)
    np.testing.assert_allclose(f_c, f_p, rtol=1e-13)
    # Differences of nearby values amplify last-ulp disagreements by about |f| / (mu |df|).
    np.testing.assert_allclose(g_c, g_p, rtol=1e-7, atol=1e-7 * np.abs(g_p).max())


@pytest.mark.parametrize("kind", list(OptimizerKind))
def test_moment_step_bitwise(ck, kind):
    rng = np.random.default_rng(5)
    d = 257
    theta = rng.standard_normal(d)
    states = []
    for _ in range(2):
        m = rng.standard_normal(d) if kind.uses_first_moment else None
        v = rng.random(d) if kind.uses_second_moment else None
        states.append((m, v))
    m_c = None if states[0][0] is None else states[0][0].copy()
    v_c = None if states[0][1] is None else states[0][1].copy()
    m_p = None if m_c is None else m_c.copy()
    v_p = None if v_c is None else v_c.copy()
    th_c, th_p = theta.copy(), theta.copy()
    for _ in range(50):
        g = rng.standard_normal(d)
        g[::17] = 0.0
        th_c = ck.moment_step(kind.mode, th_c, g, m_c, v_c, 0.9, 0.99, 1e-3, 1e-8)
        th_p = _pykernels.moment_step(kind.mode, th_p, g, m_p, v_p, 0.9, 0.99, 1e-3, 1e-8)
        assert np.array_equal(th_c, th_p)
    if m_c is not None:
        assert np.array_equal(m_c, m_p)
    if v_c is not None:
        assert np.array_equal(v_c, v_p)


def test_environment_selects_backend():
    code = "from zobench import _backend; print(_backend.BACKEND)"
    for choice, expected in (("python", "python"), ("cython", "cython"), ("auto", "cython")):
        env = dict(os.environ, ZOBENCH_BACKEND=choice)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        assert out.stdout.strip() == expected


def test_unknown_backend_name():
    with pytest.raises(ValueError):
        _backend.get("fortran")

