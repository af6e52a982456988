import numpy as np
import pytest
from scipy.stats import chi2

from gencoupling.bounds import nse_h_constants
from gencoupling.coupling import (
    CoupledRun,
    check_reimbursement,
    estimate_hitting_prob,
    fit_decay_rate,
    merge_runs,
    run_coupled_pair,
    run_true_pair,
    tune_sfde_gain,
    verify_dissipativity,
    verify_energy,
)
from gencoupling.errors import BlowUpError, DomainError, InconsistentRunError
from gencoupling.models import NSE2D, SFDE, Control, DissipativeSDE, LinearDelayDrift, unit_mode_directions
from gencoupling.noise import GirsanovLedger
from gencoupling.spectral import SpectralField


@pytest.fixture
def ou():
    return DissipativeSDE([1.0], np.eye(1))


def nse_pilot(K=8):
    m = NSE2D(1.0, unit_mode_directions(K, 2, 0.25), K)
    x0 = SpectralField.velocity_mode(K, (1, 1), 1.0) + SpectralField.velocity_mode(K, (2, 1), 0.5, "sin")
    y0 = SpectralField.velocity_mode(K, (1, 0), 1.0)
    return m, x0, y0


def test_diagonal_start_stays_diagonal(ou):
    run = run_coupled_pair(ou, [0.3], [0.3], Control(1.0), 1.0, 1e-2, seed=0, n_traj=4)
    assert not run.q.any() and not run.cost.any()
    m, x0, _ = nse_pilot()
    run = run_coupled_pair(m, x0, x0, True, 0.05, 1e-2, seed=0, n_traj=2)
    assert not run.q.any() and not run.cost.any()


def test_ou_coupled_closed_form(ou):
    run = run_coupled_pair(ou, [1.0], [0.0], Control(1.0), 1.0, 1e-3, seed=0)
    assert run.q[0, -1] == pytest.approx(np.exp(-4.0), abs=1e-6)
    np.testing.assert_allclose(run.q[0], np.exp(-4.0 * run.times), rtol=1e-10)


def test_ou_true_pair_rate(ou):
    run = run_true_pair(ou, [1.0], [0.0], 2.0, 1e-3, seed=3)
    np.testing.assert_allclose(run.q[0], np.exp(-2.0 * run.times), rtol=1e-10)
    assert fit_decay_rate(run.times, run.q[0]).rate == pytest.approx(2.0, abs=1e-9)
    assert not run.cost.any()


def test_true_pair_diagonal(ou):
    assert not run_true_pair(ou, [2.0], [2.0], 1.0, 1e-2, seed=1).q.any()


def test_shared_noise_cancels_bitwise(ou):
    a = run_coupled_pair(ou, [1.0], [-1.0], Control(1.0), 1.0, 1e-2, seed=0)
    b = run_coupled_pair(ou, [1.0], [-1.0], Control(1.0), 1.0, 1e-2, seed=99)
    assert np.array_equal(a.q, b.q) and np.array_equal(a.cost, b.cost)
    assert not np.array_equal(a.ito_sum, b.ito_sum)


def test_stream_split_invariance():
    m = DissipativeSDE([1.0, 3.0], np.eye(2), "cubic_sat", 0.5)
    args = ([1.0, 0.0], [0.0, 1.0], Control(2.0), 0.5, 1e-2)
    whole = run_coupled_pair(m, *args, seed=5, n_traj=6)
    parts = merge_runs([run_coupled_pair(m, *args, seed=5, streams=s) for s in ([0, 1], [2, 3, 4], [5])])
    for name in ("q", "U", "S_integral", "cost", "ito_sum", "beta2"):
        assert np.array_equal(getattr(whole, name), getattr(parts, name))


def test_determinism(ou):
    a = run_coupled_pair(ou, [1.0], [0.0], Control(0.5), 0.5, 1e-2, seed=11, n_traj=3)
    b = run_coupled_pair(ou, [1.0], [0.0], Control(0.5), 0.5, 1e-2, seed=11, n_traj=3)
    assert np.array_equal(a.ito_sum, b.ito_sum) and np.array_equal(a.U, b.U)


def test_refine_shares_path(ou):
    coarse = run_true_pair(ou, [1.0], [0.0], 1.0, 1e-2, seed=2, n_traj=8, refine=4)
    fine = run_true_pair(ou, [1.0], [0.0], 1.0, 2.5e-3, seed=2, n_traj=8)
    assert np.max(np.abs(coarse.X_final - fine.X_final)) < 0.05
    other = run_true_pair(ou, [1.0], [0.0], 1.0, 2.5e-3, seed=3, n_traj=8)
    assert np.max(np.abs(other.X_final - fine.X_final)) > 0.2


def test_record_every(ou):
    full = run_coupled_pair(ou, [1.0], [0.0], Control(1.0), 1.0, 1e-2, seed=0)
    thin = run_coupled_pair(ou, [1.0], [0.0], Control(1.0), 1.0, 1e-2, seed=0, record_every=10)
    assert thin.q.shape == (1, 11)
    assert np.array_equal(thin.q, full.q[:, ::10])
    assert np.array_equal(thin.S_integral, full.S_integral[:, ::10])
    with pytest.raises(DomainError):
        run_coupled_pair(ou, [1.0], [0.0], Control(1.0), 1.0, 1e-2, seed=0, record_every=7)


def test_blowup_carries_time():
    m = DissipativeSDE([1.0], np.eye(1), "cubic_sat", 50.0)
    with pytest.raises(BlowUpError) as e:
        run_true_pair(m, [1.0], [0.5], 2.0, 1e-3, seed=0)
    assert 0 < e.value.time <= 2.0


def test_dissipativity_zero_run(ou):
    run = run_coupled_pair(ou, [1.0], [1.0], Control(1.0), 0.5, 1e-2, seed=0)
    assert verify_dissipativity(run, 4.0, 0.0).violations == 0


@pytest.mark.parametrize("gain", [0.5, 1.0, 3.0])
def test_dissipativity_ou(ou, gain):
    run = run_coupled_pair(ou, [1.0], [0.0], Control(gain), 1.0, 1e-4, seed=0)
    rep = verify_dissipativity(run, 2 * (1 + gain), 0.0, tol=1e-6)
    assert rep.violations == 0 and rep.worst_margin >= -1e-6


def test_dissipativity_inconsistent(ou):
    run = run_coupled_pair(ou, [1.0], [0.0], Control(1.0), 0.1, 1e-2, seed=0)
    q = run.q.copy()
    q[:, 0] = 0.0
    bad = CoupledRun(run.times, q, run.U, run.S, run.S_integral, run.beta2, run.cost,
                     run.ito_sum, run.ledger, dt=run.dt)
    with pytest.raises(InconsistentRunError):
        verify_dissipativity(bad, 4.0, 0.0)


def test_reimbursement_ou(ou):
    run = run_coupled_pair(ou, [1.0], [0.0], Control(2.0), 0.5, 1e-2, seed=0, n_traj=4)
    c = ou.reimbursement_constant(Control(2.0))
    assert c == pytest.approx(4.0)
    assert check_reimbursement(run, c) == 0
    assert check_reimbursement(run, 0.5 * c) > 0


def test_ledger_replay_from_stored_beta(ou):
    # the recorded beta^2 series integrates back to the ledger cost
    run = run_coupled_pair(ou, [1.0], [0.0], Control(1.0), 1.0, 1e-3, seed=0, n_traj=3)
    replay = np.sum(run.beta2[:, :-1], axis=1) * run.dt
    np.testing.assert_allclose(run.cost[:, -1], replay, rtol=0, atol=1e-12)


def test_energy_deterministic():
    m = NSE2D(1.0, [], 8)
    x0 = SpectralField.random(8, np.random.default_rng(0), slope=3.0)
    run = run_true_pair(m, x0, x0, 0.5, 1e-4, seed=0)
    rep = verify_energy(run, mu=2.0, b=0.0)
    assert abs(rep.mean) <= 10 * 1e-4 * run.U[0, 0] * 25
    assert rep.qv_slope < 1e-10


def test_energy_report_echoes_b():
    m = NSE2D(1.0, unit_mode_directions(8, 1, 1.0)[:1], 8, N=0)
    assert m.sigma_norm2 == pytest.approx(1.0, rel=1e-14)
    h = nse_h_constants(1.0, np.sqrt(m.f_norm_Ahalf2), m.sigma_norm2, m.lambda_next)
    assert h.b == pytest.approx(1.0, rel=1e-14)
    x0 = SpectralField.velocity_mode(8, (1, 0), 1.0)
    run = run_true_pair(m, x0, x0, 0.1, 1e-2, seed=0, n_traj=4)
    assert verify_energy(run, 1.0, h.b).b == h.b


def test_nse_pilot_decay():
    m, x0, y0 = nse_pilot()
    run = run_coupled_pair(m, x0, y0, True, 0.5, 2e-3, seed=0, n_traj=8)
    Eq = run.q.mean(axis=0)
    fit = fit_decay_rate(run.times, Eq)
    assert fit.rate > 0
    assert Eq[-1] < Eq[len(Eq) // 2] < Eq[0]
    assert check_reimbursement(run, m.reimbursement_constant()) == 0


def test_fit_decay_examples():
    t = np.linspace(0, 3, 31)
    assert fit_decay_rate(t, np.exp(-2 * t)).rate == pytest.approx(2.0, abs=1e-12)
    f = fit_decay_rate(t, 5 * np.exp(-3 * t))
    assert f.rate == pytest.approx(3.0, abs=1e-12) and f.intercept == pytest.approx(np.log(5), abs=1e-12)
    assert fit_decay_rate(t, np.full(31, 2.0)).rate == 0.0
    with pytest.raises(DomainError):
        fit_decay_rate(t, np.zeros(31))


def test_hitting_prob_examples(ou):
    pts = [np.array([x]) for x in (-1.0, 0.0, 1.0)]
    every = estimate_hitting_prob(ou, pts, lambda s: np.ones(s.shape[0], bool), 1.0, 50, seed=0, dt=1e-2)
    assert every.probability == 1.0
    none = estimate_hitting_prob(ou, pts, lambda s: np.zeros(s.shape[0], bool), 1.0, 50, seed=0, dt=1e-2)
    assert none.probability == 0.0
    ball = estimate_hitting_prob(ou, pts, lambda s: np.abs(s[:, 0]) <= 3.0, 5.0, 400, seed=0, dt=1e-2)
    # stationary N(0, 1/2) mass within radius 3
    assert chi2(1).cdf(9.0 / 0.5) > 0.99
    assert ball.probability >= 0.99


def test_sfde_gain_tuning():
    m = SFDE(1.0, LinearDelayDrift(-2.0, 0.5), [[1.0]])
    tune = tune_sfde_gain(m, [1.0], [0.0], T=4.0, dt=1e-2, seed=0, n_traj=16)
    assert tune.gain >= 1.0 and tune.rate >= 1.0
    assert tune.history[-1] == (tune.gain, tune.rate)


def test_merge_empty():
    with pytest.raises(DomainError):
        merge_runs([])
    assert isinstance(GirsanovLedger.zeros(2).cost, np.ndarray)
