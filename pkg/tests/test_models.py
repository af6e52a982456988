import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gencoupling import spectral as sp
from gencoupling.errors import BlowUpError, DimensionError, NonInvertibleError, RangeConditionError
from gencoupling.models import (
    NSE2D,
    SFDE,
    Control,
    DissipativeSDE,
    LinearDelayDrift,
    Segment,
    check_finite,
    control_drift_nse,
    control_drift_sfde,
    energy_terms_nse,
    lyapunov_eval,
    unit_mode_directions,
)
from gencoupling.noise import NoiseStream
from gencoupling.spectral import SpectralField


def test_linear_decay_exact():
    m = DissipativeSDE([1.0], np.zeros((1, 1)))
    x = m.init_state([1.0], 1)
    for dt in (1e-3, 0.1, 2.0):
        y = m.step(x, np.zeros((1, 1)), np.zeros((1, 1)), dt)
        assert y[0, 0] == pytest.approx(np.exp(-dt), rel=1e-15)


def test_sde_additive_noise_enters_once():
    m = DissipativeSDE([1.0, 2.0], np.eye(2))
    x = np.zeros((1, 2))
    dW = np.array([[0.3, -0.1]])
    assert np.array_equal(m.step(x, dW, np.zeros_like(dW), 0.1), dW)


def test_sfde_driftless_is_random_walk():
    r, dt = 0.5, 0.01
    m = SFDE(r, LinearDelayDrift(0.0, 0.0), np.eye(2), n=2)
    seg = m.init_state(np.array([1.0, -2.0]), 1, dt)
    dW = NoiseStream(0, 0, 2, dt).increments(0, 300)
    for k in range(300):
        seg = m.step(seg, dW[k][None], np.zeros((1, 2)), dt)
    np.testing.assert_allclose(seg.now[0], [1.0, -2.0] + dW.sum(axis=0), atol=1e-12)
    # the window holds the last r/dt + 1 values in order
    path = np.array([1.0, -2.0]) + np.cumsum(dW, axis=0)
    np.testing.assert_allclose(seg.values()[0], path[-seg.L:], atol=1e-12)


def test_segment_shift_and_lag():
    seg = Segment.from_path(np.arange(5.0), 0.25)
    assert seg.now[0, 0] == 4.0 and seg.lag(4)[0, 0] == 0.0
    seg.push_(np.array([[5.0]]))
    assert seg.values()[0, :, 0].tolist() == [1.0, 2.0, 3.0, 4.0, 5.0]
    assert seg.lag(4)[0, 0] == 1.0
    with pytest.raises(DimensionError):
        seg.lag(5)


def test_linear_delay_drift():
    seg = Segment.from_path([2.0, 0.0, 1.0], 0.5)
    assert LinearDelayDrift(-2.0, 0.5)(seg)[0, 0] == -2.0 + 1.0


def test_sfde_control_examples():
    dt = 0.1
    m = SFDE(1.0, LinearDelayDrift(0.0, 0.0), np.eye(2), n=2)
    X = m.init_state(np.array([1.0, 0.0]), 1, dt)
    Y = m.init_state(np.array([0.0, 0.0]), 1, dt)
    assert np.array_equal(control_drift_sfde(m, X, X, 2.0), np.zeros((1, 2)))
    np.testing.assert_array_equal(control_drift_sfde(m, X, Y, 2.0), [[2.0, 0.0]])


def test_sfde_control_matrix_solve():
    G = np.array([[2.0, 1.0], [0.5, 3.0]])
    m = SFDE(1.0, LinearDelayDrift(0.0, 0.0), G, n=2)
    X = m.init_state(np.array([0.3, -1.2]), 1, 0.1)
    Y = m.init_state(np.array([1.0, 0.4]), 1, 0.1)
    ref = 1.5 * np.linalg.solve(G, np.array([0.3 - 1.0, -1.2 - 0.4]))
    np.testing.assert_allclose(control_drift_sfde(m, X, Y, 1.5)[0], ref, atol=1e-14)


def test_sfde_singular_g():
    with pytest.raises(NonInvertibleError):
        SFDE(1.0, LinearDelayDrift(0.0, 0.0), np.array([[1.0, 2.0], [2.0, 4.0]]), n=2)
    m = SFDE(1.0, LinearDelayDrift(0.0, 0.0), lambda seg: np.zeros((seg.buf.shape[0], 1, 1)),
             n=1, g_inv_bound=1.0)
    X = Segment.constant(1.0, 1.0, 0.5)
    with pytest.raises(NonInvertibleError):
        m.control_drift(X, X.copy(), 1.0)


def test_sfde_lyapunov_options():
    seg = Segment.constant(3.0, 1.0, 0.5)
    assert lyapunov_eval(SFDE(1.0, LinearDelayDrift(0, 0), [[1.0]]), seg)[0] == 9.0
    path = Segment.from_path([5.0, 1.0, 2.0], 0.5)
    assert SFDE(1.0, LinearDelayDrift(0, 0), [[1.0]], lyapunov_option="i").lyapunov(path)[0] == 25.0
    assert SFDE(1.0, LinearDelayDrift(0, 0), [[1.0]]).lyapunov(path)[0] == 4.0


def test_nse_inviscid_invariants():
    m = NSE2D(0.0, [], 16, scheme="rk4")
    w0 = SpectralField.random(16, np.random.default_rng(0), slope=3.0)
    w = m.init_state(w0, 1)
    U0, S0 = m.U(w)[0], m.S(w)[0]
    z = np.zeros((1, 0))
    for _ in range(1000):
        w = m.step(w, z, z, 1e-3)
    assert abs(m.U(w)[0] / U0 - 1) < 1e-8
    assert abs(m.S(w)[0] / S0 - 1) < 1e-8


def test_nse_viscous_single_mode_decay():
    m = NSE2D(1.0, [], 8)
    f = SpectralField.velocity_mode(8, (2, 1), 1.0)
    w = m.init_state(f, 1)
    z = np.zeros((1, 0))
    for _ in range(100):
        w = m.step(w, z, z, 1e-2)
    assert m.U(w)[0] == pytest.approx(np.exp(-2 * 5 * 1.0), rel=1e-12)


def test_nse_control_zero_on_diagonal():
    m = NSE2D(1.0, unit_mode_directions(8, 2), 8)
    X = SpectralField.random(8, np.random.default_rng(1))
    assert not control_drift_nse(m, X, X).any()


@pytest.mark.parametrize("a", [0.5, 2.0])
def test_nse_control_single_mode(a):
    m = NSE2D(1.0, unit_mode_directions(8, 2), 8)
    assert m.N == 8 and m.lambda_next == 4
    d = SpectralField.velocity_mode(8, (1, 1), a, "sin")
    beta = control_drift_nse(m, d, SpectralField.zeros(8))
    assert np.linalg.norm(beta) == pytest.approx(m.nu * m.lambda_next * a / 2, rel=1e-12)


def test_nse_control_residual_random():
    m = NSE2D(0.7, unit_mode_directions(8, 2, 0.3), 8)
    d = SpectralField.random(8, np.random.default_rng(4))
    beta = control_drift_nse(m, d, SpectralField.zeros(8))
    target = m.gain * sp.project_low_modes(d, m.proj)
    got = SpectralField(m.noise_field(beta), 8)
    assert (got - target).h_norm <= 1e-10


def test_nse_range_condition():
    sigma = unit_mode_directions(8, 1)
    with pytest.raises(RangeConditionError):
        NSE2D(1.0, sigma, 8, N=8)
    # dropping the sin direction of (0, 1) breaks the lowest block
    assert NSE2D(1.0, sigma[:-1], 8).N < 4


def test_nse_lyapunov_and_energy_terms():
    f = SpectralField.velocity_mode(8, (1, 0), 2.0)
    m = NSE2D(1.0, [], 8)
    assert lyapunov_eval(m, m.init_state(f, 1))[0] == pytest.approx(4.0, rel=1e-14)
    assert energy_terms_nse(SpectralField.zeros(8)) == (0.0, 0.0)
    U, S = energy_terms_nse(SpectralField.velocity_mode(8, (0, 1), 1.0))
    assert U == pytest.approx(S, rel=1e-14)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_nse_S_dominates_U(seed):
    U, S = energy_terms_nse(SpectralField.random(8, np.random.default_rng(seed)))
    assert S >= U


def test_sigma_norm():
    m = NSE2D(1.0, unit_mode_directions(16, 2, 0.25), 16)
    assert m.sigma_norm2 == pytest.approx(0.5, rel=1e-14)
    assert m.N == 8 and m.lambda_next == 4


def test_control_range_sde():
    m = DissipativeSDE([1.0, 2.0], np.array([[1.0], [0.0]]))
    m.control_matrix(Control(1.0, n_modes=1))
    with pytest.raises(RangeConditionError):
        m.control_matrix(Control(1.0))


def test_check_finite():
    check_finite(np.array([1.0, 2.0]), 0.5)
    with pytest.raises(BlowUpError) as e:
        check_finite(np.array([1.0, np.nan]), 0.75)
    assert e.value.time == 0.75
