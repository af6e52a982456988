import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm

from gencoupling import metrics as mt
from gencoupling.errors import DomainError, TransportSizeError
from gencoupling.metrics import EmpiricalMeasure, PremetricSpec, Reject


def absdiff(x, y):
    return abs(x - y)


def test_d_N_examples():
    assert mt.d_N_eval(0.0, 7.0, 3.0) == 0.0
    assert mt.d_N_eval(0.3, 0.5, 2.0) == pytest.approx(0.6, abs=1e-15)
    assert mt.d_N_eval(0.3, 0.3, 10.0) == 1.0


def test_d_N_negative():
    with pytest.raises(DomainError):
        mt.d_N_eval(-0.1, 0.2, 1.0)


@given(a=st.floats(0, 10), b=st.floats(0, 10), N=st.floats(1e-3, 1e3))
def test_d_N_symmetric_and_capped(a, b, N):
    v = mt.d_N_eval(a, b, N)
    assert v == mt.d_N_eval(b, a, N)
    assert 0.0 <= v <= 1.0


def test_theta_alpha_examples():
    assert mt.theta_alpha_eval(0.0, 5.0, 0.5, 2.0) == 0.0
    assert mt.theta_alpha_eval(4.0, 3.0, 0.5, 0.0) == 2.0
    assert mt.theta_alpha_eval(1.0, 1.0, 0.5, 2.0) == pytest.approx(math.e, rel=1e-15)


@pytest.mark.parametrize("alpha", [0.0, 1.5, -1.0])
def test_theta_alpha_range(alpha):
    with pytest.raises(DomainError):
        mt.theta_alpha_eval(1.0, 1.0, alpha, 1.0)


def test_premetric_spec_exp_asymmetric():
    spec = PremetricSpec(kind="exp", alpha=0.5, Q=1.0, N=1.0, U=lambda x: float(x[0] ** 2))
    x, y = np.array([1.0]), np.array([0.0])
    assert spec.theta(x, y) == pytest.approx(math.e)
    assert spec.theta(y, x) == pytest.approx(1.0)
    assert spec.d_N(x, y) == 1.0


def test_wasserstein_examples():
    pts = [0.0, 1.5, 2.0]
    assert mt.empirical_wasserstein(EmpiricalMeasure(pts), EmpiricalMeasure(pts), absdiff) == 0.0
    capped = lambda x, y: min(abs(x - y), 1.0)
    assert mt.empirical_wasserstein(EmpiricalMeasure([0.0]), EmpiricalMeasure([1.0]), capped) == 1.0
    assert mt.empirical_wasserstein(EmpiricalMeasure([0.0, 2.0]), EmpiricalMeasure([1.0, 3.0]), absdiff) == 1.0


def test_wasserstein_cap():
    mu = EmpiricalMeasure(list(range(10)))
    with pytest.raises(TransportSizeError):
        mt.empirical_wasserstein(mu, mu, absdiff, cap=5)


def test_weight_mismatch():
    with pytest.raises(DomainError):
        EmpiricalMeasure([0.0, 1.0], np.array([0.5, 0.6]))


def test_wasserstein_weighted_lp():
    # W1 on the line equals the L1 distance between CDFs
    xs, ys = [0.0, 1.0, 3.0], [0.5, 2.0]
    a, b = np.array([0.2, 0.5, 0.3]), np.array([0.7, 0.3])
    got = mt.empirical_wasserstein(EmpiricalMeasure(xs, a), EmpiricalMeasure(ys, b), absdiff)
    grid = np.array(sorted(xs + ys))
    Fa = np.array([a[np.array(xs) <= g].sum() for g in grid])
    Fb = np.array([b[np.array(ys) <= g].sum() for g in grid])
    ref = float(np.sum(np.abs(Fa - Fb)[:-1] * np.diff(grid)))
    assert got == pytest.approx(ref, abs=1e-12)


def test_wasserstein_unequal_uniform_sizes():
    xs, ys = [0.0, 1.0], [0.0, 0.5, 1.0]
    got = mt.empirical_wasserstein(EmpiricalMeasure(xs), EmpiricalMeasure(ys), absdiff)
    assert got == pytest.approx(1.0 / 6.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_wasserstein_integer_oracle(n, seed):
    rng = np.random.default_rng(seed)
    xs = [tuple(p) for p in rng.integers(-5, 6, (n, 2))]
    ys = [tuple(p) for p in rng.integers(-5, 6, (n, 2))]
    l1 = lambda x, y: abs(x[0] - y[0]) + abs(x[1] - y[1])
    got = mt.empirical_wasserstein(EmpiricalMeasure(xs), EmpiricalMeasure(ys), l1)
    assert Fraction(got).limit_denominator(1000) == Fraction(mt.brute_force_wasserstein(xs, ys, l1)).limit_denominator(1000)


@settings(max_examples=30, deadline=None)
@given(xs=st.lists(st.floats(-10, 10), min_size=1, max_size=40))
def test_wasserstein_self_zero_and_symmetric(xs):
    ys = [x + 1.0 for x in xs]
    a, b = EmpiricalMeasure(xs), EmpiricalMeasure(ys)
    assert mt.empirical_wasserstein(a, a, absdiff) == 0.0
    assert mt.empirical_wasserstein(a, b, absdiff) == pytest.approx(mt.empirical_wasserstein(b, a, absdiff), abs=1e-12)


def test_tv_examples():
    a = np.random.default_rng(0).normal(size=1000)
    assert mt.tv_histogram(a, a) == 0.0
    assert mt.tv_histogram(np.zeros(10), np.full(10, 100.0), bins=8) == 1.0


def test_tv_gaussian_shift():
    rng = np.random.default_rng(1)
    a = rng.normal(0.0, 1.0, 100_000)
    b = rng.normal(0.5, 1.0, 100_000)
    exact = 2 * norm.cdf(0.25) - 1
    assert mt.tv_histogram(a, b, bins=64) == pytest.approx(exact, abs=0.02)


def test_tv_empty():
    with pytest.raises(DomainError):
        mt.tv_histogram([], [1.0])


def test_tv_projection():
    pts = [np.array([x, 0.0]) for x in range(5)]
    assert mt.tv_histogram(pts, pts, projection=lambda s: s[0]) == 0.0


def test_contraction_budget_examples():
    assert mt.contraction_budget(1 / 3, 1.0, 2.0) == pytest.approx(5 / 6, abs=1e-15)
    assert mt.contraction_budget(Fraction(1, 3), Fraction(1), Fraction(2)) == Fraction(5, 6)
    assert isinstance(mt.contraction_budget(Fraction(1, 3) + Fraction(1, 10**9), 0, 1), Reject)
    assert mt.contraction_budget(0.0, 0.0, 7.0) == 0.0
    r = mt.contraction_budget(0.5, 1.0, 2.0)
    assert isinstance(r, Reject) and r.reason == "r(t) > 1/3"
    assert isinstance(mt.contraction_budget(0.1, 2.0, 1.0), Reject)


def test_smallness_b1_examples():
    assert mt.smallness_budget_b1(1.0, 4.0) == 0.5
    assert mt.smallness_budget_b1(0.2, 4.0) == pytest.approx(0.98, abs=1e-15)
    assert mt.smallness_budget_b1(1e-4, 4.0) < 1.0
    assert mt.smallness_budget_b1(1e-4, 4.0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        mt.smallness_budget_b1(0.0, 4.0)


def test_smallness_b2_examples():
    assert mt.smallness_budget_b2(3.0, 0.0, 0.5) == 0.75
    assert mt.smallness_budget_b2(10.0, 0.01, 0.2) == pytest.approx(0.9, abs=1e-15)
    assert isinstance(mt.smallness_budget_b2(10.0, 0.1, 0.2), Reject)
    with pytest.raises(DomainError):
        mt.smallness_budget_b2(1.0, 0.0, 1.0)


@given(r=st.floats(0, 1 / 3), L=st.floats(0, 10), N=st.floats(1e-3, 100))
def test_contraction_budget_below_one_when_admissible(r, L, N):
    v = mt.contraction_budget(r, L, N)
    if N >= 2 * L:
        assert v <= 5 / 6 + 1e-15
    else:
        assert isinstance(v, Reject)
