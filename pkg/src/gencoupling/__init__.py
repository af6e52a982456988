"""Controlled coupling simulations for convergence of stochastic dynamics: coupled runs,
Girsanov cost ledgers, rate certificates and KL/TV bound calculus."""
from .bounds import (
    Bound,
    Certificate,
    HConstants,
    PhiSpec,
    check_condtheta,
    check_nse_threshold,
    derive_certificate,
    h_phi,
    h_phi_inverse,
    kl_girsanov,
    measure_lower_bound,
    nse_h_constants,
    pinsker_tv,
    rate_curve,
    tv_delta_floor,
    tv_delta_upper,
    tv_exp_bound,
    wiener_lower_bound,
)
from .coupling import (
    CoupledRun,
    estimate_hitting_prob,
    fit_decay_rate,
    run_coupled_pair,
    run_true_pair,
    verify_dissipativity,
    verify_energy,
)
from .errors import *  # noqa: F401,F403
from .metrics import (
    EmpiricalMeasure,
    PremetricSpec,
    contraction_budget,
    d_N_eval,
    empirical_wasserstein,
    smallness_budget_b1,
    smallness_budget_b2,
    theta_alpha_eval,
    tv_histogram,
)
from .models import NSE2D, SFDE, Control, DissipativeSDE, LinearDelayDrift, Segment
from .noise import GirsanovLedger, NoiseStream, ledger_kl_bound, ledger_m_delta, ledger_update, sample_increment
from .spectral import ModeProjector, SpectralField, WaveVector, biot_savart, nonlinear_term, norms, project_low_modes, stokes_eigenvalues

__version__ = "0.1.0"
