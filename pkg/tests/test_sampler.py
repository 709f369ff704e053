import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zobench.errors import DimensionError
from zobench.sampler import (
    PRNG_NAME,
    STREAM_ESTIMATOR,
    STREAM_NOISE,
    RandomSource,
    sample_ball,
    sample_ball_batch,
    sample_sphere,
    sample_sphere_batch,
)


def test_prng_is_named():
    assert PRNG_NAME == "numpy.PCG64"


def test_sphere_d1_is_plus_or_minus_one():
    rng = RandomSource(7)
    for _ in range(50):
        u = sample_sphere(1, rng)
        assert u.shape == (1,)
        assert u[0] in (1.0, -1.0)


@settings(max_examples=50, deadline=None)
@given(d=st.integers(1, 200), seed=st.integers(0, 2**64 - 1))
def test_sphere_unit_norm(d, seed):
    u = sample_sphere(d, RandomSource(seed))
    assert abs(np.linalg.norm(u) - 1.0) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(d=st.integers(1, 200), seed=st.integers(0, 2**32))
def test_ball_containment(d, seed):
    u = sample_ball(d, RandomSource(seed))
    assert np.linalg.norm(u) <= 1.0


@pytest.mark.parametrize("d", [0, -3])
def test_zero_dimension_rejected(d):
    with pytest.raises(DimensionError):
        sample_sphere(d, RandomSource(0))
    with pytest.raises(DimensionError):
        sample_ball(d, RandomSource(0))


def test_sphere_second_moment_is_one_over_d():
    # E[u_i^2] = 1/d by symmetry.
    U = sample_sphere_batch(10, 100_000, RandomSource(11))
    means = (U**2).mean(axis=0)
    assert np.all((means >= 0.09) & (means <= 0.11))


def test_sphere_isotropy():
    d, n = 5, 100_000
    U = sample_sphere_batch(d, n, RandomSource(12))
    cov = U.T @ U / n
    # Var(u_i u_j) = E[u_i^2 u_j^2] = 1/(d(d+2)) off the diagonal;
    # Var(u_i^2) = 3/(d(d+2)) - 1/d^2 on it.
    se_off = np.sqrt(1.0 / (d * (d + 2)) / n)
    se_diag = np.sqrt((3.0 / (d * (d + 2)) - 1.0 / d**2) / n)
    off = cov[~np.eye(d, dtype=bool)]
    assert np.all(np.abs(off) <= 5 * se_off)
    assert np.all(np.abs(np.diag(cov) - 1.0 / d) <= 5 * se_diag)


def test_ball_mean_squared_norm_d2():
    # E|u|^2 = d/(d+2) = 0.5 for d = 2.
    U = sample_ball_batch(2, 100_000, RandomSource(13))
    assert 0.48 <= (U**2).sum(axis=1).mean() <= 0.52


def test_ball_volume_fraction_d3():
    # P(|u| <= 1/2) = (1/2)^3 = 0.125.
    U = sample_ball_batch(3, 100_000, RandomSource(14))
    frac = (np.linalg.norm(U, axis=1) <= 0.5).mean()
    assert 0.115 <= frac <= 0.135


def test_ball_single_draws_match_batch_distribution():
    rng = RandomSource(15)
    norms = np.array([np.linalg.norm(sample_ball(3, rng)) for _ in range(20_000)])
    assert 0.115 <= (norms <= 0.5).mean() <= 0.135


def test_same_seed_same_sequence():
    a, b = RandomSource(99), RandomSource(99)
    for d in (1, 3, 17):
        np.testing.assert_array_equal(sample_sphere(d, a), sample_sphere(d, b))
        np.testing.assert_array_equal(sample_ball(d, a), sample_ball(d, b))


def test_batch_consumes_stream_like_sequential_calls():
    a, b = RandomSource(5), RandomSource(5)
    batch = sample_sphere_batch(7, 4, a)
    seq = np.array([sample_sphere(7, b) for _ in range(4)])
    np.testing.assert_array_equal(batch, seq)
    # Streams stay aligned afterwards.
    np.testing.assert_array_equal(sample_sphere(7, a), sample_sphere(7, b))


def test_substreams_are_independent_of_parent_state():
    base = RandomSource(3)
    first = base.substream(STREAM_NOISE).random(4)
    sample_sphere(10, base)  # advancing the parent must not matter
    second = base.substream(STREAM_NOISE).random(4)
    np.testing.assert_array_equal(first, second)
    other = base.substream(STREAM_ESTIMATOR).random(4)
    assert not np.array_equal(first, other)


def test_seed_range_checked():
    with pytest.raises(ValueError):
        RandomSource(-1)
    with pytest.raises(ValueError):
        RandomSource(2**64)
    RandomSource(2**64 - 1)
