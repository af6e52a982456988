"""Generalized-coupling runs, pathwise diagnostics and decay-rate fits.

A run advances a whole ensemble at once: trajectory ``i`` draws its increments
from stream ``streams[i]`` of the master seed, so results do not depend on how
the ensemble is split across workers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import linregress

from .errors import BlowUpError, DomainError, InconsistentRunError
from .models import BLOWUP_THRESHOLD, SFDE, Segment
from .noise import GirsanovLedger, ensemble_increments

BLOCK = 256  # steps of noise generated per batch


@dataclass(frozen=True)
class CoupledRun:
    """Recorded series of an ensemble of coupled pairs.

    Every series has shape ``(n_traj, n_steps + 1)`` and is sampled on
    ``times``. ``beta2[:, k]`` and ``q[:, k]`` are left-point values of step
    ``k``, so the reimbursement bound can be checked step by step.
    """

    times: np.ndarray
    q: np.ndarray
    U: np.ndarray
    S: np.ndarray
    S_integral: np.ndarray
    beta2: np.ndarray
    cost: np.ndarray
    ito_sum: np.ndarray
    ledger: GirsanovLedger
    X_final: object = None
    Y_final: object = None
    dt: float = 0.0
    streams: tuple = ()

    @property
    def n_traj(self) -> int:
        return self.q.shape[0]

    @property
    def logweight(self) -> np.ndarray:
        return -self.ito_sum - 0.5 * self.cost

    @property
    def q0(self) -> np.ndarray:
        return self.q[:, 0]

    def csv_columns(self, i: int) -> dict:
        """Per-run CSV body for trajectory ``i`` (fixed column order)."""
        return {
            "t": self.times,
            "q": self.q[i],
            "U_x": self.U[i],
            "S_int": self.S_integral[i],
            "cost": self.cost[i],
            "logweight": self.logweight[i],
        }


def merge_runs(runs: Sequence[CoupledRun]) -> CoupledRun:
    """Concatenate ensembles recorded on the same time grid."""
    if isinstance(runs, CoupledRun):
        return runs
    runs = list(runs)
    if not runs:
        raise DomainError("ensemble is empty")
    t = runs[0].times
    if any(r.times.shape != t.shape or not np.array_equal(r.times, t) for r in runs):
        raise DomainError("runs must share a time grid")
    cat = lambda name: np.concatenate([getattr(r, name) for r in runs])  # noqa: E731
    ledger = GirsanovLedger(cat("cost")[:, -1], np.zeros(sum(r.n_traj for r in runs)),
                            cat("ito_sum")[:, -1], np.zeros(sum(r.n_traj for r in runs)),
                            runs[0].ledger.t_sum, runs[0].ledger.t_comp)
    return CoupledRun(t, cat("q"), cat("U"), cat("S"), cat("S_integral"), cat("beta2"),
                      cat("cost"), cat("ito_sum"), ledger, dt=runs[0].dt,
                      streams=sum((tuple(r.streams) for r in runs), ()))


def _n_steps(T: float, dt: float) -> int:
    if not T > 0 or not dt > 0:
        raise DomainError("T and dt must be positive")
    n = int(round(T / dt))
    if n < 1 or abs(n * dt - T) > 1e-9 * T:
        raise DomainError("T must be an integer multiple of dt")
    return n


def _pair_init(model, x0, y0, n, dt):
    if isinstance(model, SFDE):
        return model.pair_init(x0, y0, n, dt)
    return model.pair_init(x0, y0, n)


def _norm(model, state):
    if isinstance(state, Segment):
        return state.sup_norm()
    return model.state_norm(state)


def _check_blowup(model, pair, t):
    for s in (model.pair_X(pair), model.pair_Y(pair)):
        nrm = np.asarray(_norm(model, s))
        bad = ~np.isfinite(nrm) | (nrm > BLOWUP_THRESHOLD)
        if np.any(bad):
            worst = float(nrm[bad][0])
            raise BlowUpError(t, worst if np.isfinite(worst) else float("inf"))


def _increments(seed, streams, m, dt, start, count, refine):
    if m == 0:  # deterministic model
        return np.zeros((len(streams), count, 0))
    if refine == 1:
        return ensemble_increments(seed, streams, m, dt, start, count)
    fine = ensemble_increments(seed, streams, m, dt / refine, start * refine, count * refine)
    return fine.reshape(len(streams), count, refine, m).sum(axis=2)


def _simulate_pair(model, x0, y0, control, T, dt, seed, n_traj, streams, refine, record_every):
    steps = _n_steps(T, dt)
    streams = tuple(range(n_traj)) if streams is None else tuple(int(s) for s in streams)
    n = len(streams)
    if n < 1:
        raise DomainError("need at least one trajectory")
    if refine < 1 or record_every < 1:
        raise DomainError("refine and record_every must be >= 1")
    if steps % record_every:
        raise DomainError("record_every must divide the number of steps")
    pair = _pair_init(model, x0, y0, n, dt)
    m = model.noise_dim
    shape = (n, steps // record_every + 1)
    q, U, S, S_int, b2, cost, ito = (np.zeros(shape) for _ in range(7))
    ledger = GirsanovLedger.zeros(n)
    s_int = np.zeros(n)

    def record(i, pair, S_now):
        X = model.pair_X(pair)
        q[:, i] = model.pair_q(pair)
        U[:, i] = model.U(X)
        S[:, i] = S_now
        S_int[:, i] = s_int
        cost[:, i] = ledger.cost
        ito[:, i] = ledger.ito_sum

    S_prev = model.S(model.pair_X(pair))
    record(0, pair, S_prev)
    for start in range(0, steps, BLOCK):
        count = min(BLOCK, steps - start)
        inc = _increments(seed, streams, m, dt, start, count, refine)
        for j in range(count):
            k = start + j
            dW = inc[:, j]
            beta = model.pair_beta(pair, control)
            if k % record_every == 0:
                b2[:, k // record_every] = np.sum(beta * beta, axis=-1)
            ledger = ledger.update(beta, dW, dt)
            pair = model.pair_step(pair, dW, beta, dt, control)
            _check_blowup(model, pair, (k + 1) * dt)
            S_new = model.S(model.pair_X(pair))
            s_int = s_int + 0.5 * dt * (S_prev + S_new)  # trapezoid
            S_prev = S_new
            if (k + 1) % record_every == 0:
                record((k + 1) // record_every, pair, S_new)
    times = np.arange(shape[1]) * (dt * record_every)
    return CoupledRun(times, q, U, S, S_int, b2, cost, ito, ledger,
                      model.pair_X(pair), model.pair_Y(pair), dt, streams)


def run_coupled_pair(model, x0, y0, control, T: float, dt: float, seed: int, n_traj: int = 1,
                     streams: Sequence[int] | None = None, refine: int = 1,
                     record_every: int = 1) -> CoupledRun:
    """Simulate ``(X, Y)``: ``X`` with the raw noise, ``Y`` with noise plus control.

    ``control`` is a :class:`~gencoupling.models.Control` for the dissipative
    SDE, a gain for the SFDE and ``True`` (projector ``P_N``) for the NSE.
    ``refine > 1`` draws the Brownian path on ``dt / refine`` and sums it, so
    a run at ``dt`` and one at ``dt / refine`` see the same path.
    Series are stored every ``record_every`` steps; ``S_integral`` is always
    accumulated by the trapezoid rule on every step.
    """
    return _simulate_pair(model, x0, y0, control, T, dt, seed, n_traj, streams, refine, record_every)


def run_true_pair(model, x0, y0, T: float, dt: float, seed: int, n_traj: int = 1,
                  streams: Sequence[int] | None = None, refine: int = 1,
                  record_every: int = 1) -> CoupledRun:
    """Synchronous coupling: shared noise and no control."""
    off = None if model.kind == "sde" else False
    return _simulate_pair(model, x0, y0, off, T, dt, seed, n_traj, streams, refine, record_every)


# ---------------------------------------------------------------------------
# pathwise and ensemble diagnostics


@dataclass(frozen=True)
class DissipativityReport:
    margins: np.ndarray = field(repr=False)
    tol: float
    violations: int
    worst_margin: float

    @property
    def worst_violation(self) -> float:
        """Magnitude of the most negative margin, 0 when none is negative."""
        return max(0.0, -self.worst_margin)


def dissipativity_margins(run: CoupledRun, zeta: float, kappa: float) -> np.ndarray:
    """``log q(x,y) - zeta t + kappa S_int(t) - log q(t)``; ``+inf`` where ``q(t) = 0``."""
    q0 = run.q0[:, None]
    if np.any((q0[:, 0] == 0) & np.any(run.q > 0, axis=1)):
        raise InconsistentRunError("q(x, y) = 0 but the pair separated")
    with np.errstate(divide="ignore", invalid="ignore"):
        m = np.log(q0) - zeta * run.times + kappa * run.S_integral - np.log(run.q)
    return np.where(run.q == 0, np.inf, m)


def verify_dissipativity(run: CoupledRun, zeta: float, kappa: float,
                         tol: float | None = None) -> DissipativityReport:
    """Check ``q(t) <= q(x,y) exp(-zeta t + kappa int S)`` at every recorded time ``t > 0``.

    The default tolerance is ``10 dt (zeta + kappa max S)``.
    """
    m = dissipativity_margins(run, zeta, kappa)[:, 1:]
    if tol is None:
        tol = 10.0 * run.dt * (abs(zeta) + abs(kappa) * float(np.max(run.S, initial=0.0)))
    worst = float(np.min(m)) if m.size else np.inf
    return DissipativityReport(m, tol, int(np.sum(m < -tol)), worst)


@dataclass(frozen=True)
class EnergyReport:
    M_hat: np.ndarray = field(repr=False)
    mean: float
    stderr: float
    b: float
    qv_slope: float
    qv_bound_slope: float

    @property
    def z(self) -> float:
        if self.stderr == 0:
            return 0.0 if self.mean == 0 else np.copysign(np.inf, self.mean)
        return self.mean / self.stderr

    @property
    def within_3se(self) -> bool:
        return abs(self.z) <= 3.0


def verify_energy(runs, mu: float, b: float, b1: float = 0.0, b2: float = 0.0) -> EnergyReport:
    """Terminal ``M_T = U(T) + mu int S - U(0) - b T`` over the ensemble.

    The quadratic-variation slope is the mean of ``sum (dM)^2 / T`` against
    the mean of ``(b1 int S + b2 T) / T``.
    """
    run = merge_runs(runs)
    T = run.times[-1]
    M = run.U + mu * run.S_integral - run.U[:, :1] - b * run.times
    MT = M[:, -1]
    n = MT.size
    se = float(MT.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    qv = float(np.mean(np.sum(np.diff(M, axis=1) ** 2, axis=1)) / T)
    bound = float(np.mean(b1 * run.S_integral[:, -1] + b2 * T) / T)
    return EnergyReport(M, float(MT.mean()), se, b, qv, bound)


def check_reimbursement(run: CoupledRun, c: float, rtol: float = 1e-12) -> int:
    """Number of recorded steps with ``|beta|^2 > c q`` (beyond rounding)."""
    lhs = run.beta2[:, :-1]
    rhs = c * run.q[:, :-1]
    return int(np.sum(lhs > rhs * (1 + rtol) + 1e-300))


class DecayFit(tuple):
    __slots__ = ()

    def __new__(cls, rate, intercept, r2):
        return super().__new__(cls, (rate, intercept, r2))

    rate = property(lambda self: self[0])
    intercept = property(lambda self: self[1])
    r2 = property(lambda self: self[2])


def fit_decay_rate(times, values) -> DecayFit:
    """Least-squares line through ``(t, log value)``; rate is minus the slope."""
    t = np.asarray(times, float)
    v = np.asarray(values, float)
    if t.shape != v.shape or t.size < 2:
        raise DomainError("need matching series with at least two points")
    if np.any(~(v > 0)):
        raise DomainError("values must be positive")
    y = np.log(v)
    if np.all(y == y[0]):
        return DecayFit(0.0, float(y[0]), 1.0)
    fit = linregress(t, y)
    return DecayFit(float(-fit.slope), float(fit.intercept), float(fit.rvalue**2))


# ---------------------------------------------------------------------------
# hitting probabilities and gain tuning


@dataclass(frozen=True)
class HittingReport:
    probability: float
    stderr: float
    per_point: np.ndarray = field(repr=False)
    per_point_se: np.ndarray = field(repr=False)
    blowups: int


def _simulate_single(model, x0, t0, dt, seed, streams):
    steps = _n_steps(t0, dt)
    n = len(streams)
    state = model.init_state(x0, n, dt) if isinstance(model, SFDE) else model.init_state(x0, n)
    alive = np.ones(n, bool)
    m = model.noise_dim
    for start in range(0, steps, BLOCK):
        count = min(BLOCK, steps - start)
        inc = _increments(seed, streams, m, dt, start, count, 1)
        for j in range(count):
            dW = inc[:, j]
            state = model.step(state, dW, np.zeros_like(dW), dt)
            nrm = np.asarray(_norm(model, state))
            alive &= np.isfinite(nrm) & (nrm <= BLOWUP_THRESHOLD)
    return state, alive


def estimate_hitting_prob(model, B_points, D_predicate: Callable, t0: float, n_traj: int,
                          seed: int, dt: float = 1e-3) -> HittingReport:
    """Minimum over ``B_points`` of the Monte-Carlo estimate of ``P_t0(x, D)``.

    ``D_predicate`` maps a batched state to a boolean array. Trajectories that
    blow up count as misses and are tallied in ``blowups``.
    """
    if n_traj < 1:
        raise DomainError("n_traj must be >= 1")
    pts = list(B_points)
    if not pts:
        raise DomainError("B sampler produced no points")
    probs, ses, blown = [], [], 0
    for i, x0 in enumerate(pts):
        streams = tuple(i * n_traj + j for j in range(n_traj))
        with np.errstate(over="ignore", invalid="ignore"):
            state, alive = _simulate_single(model, x0, t0, dt, seed, streams)
            hit = np.asarray(D_predicate(state), bool) & alive
        blown += int(np.sum(~alive))
        p = float(hit.mean())
        probs.append(p)
        ses.append(float(np.sqrt(p * (1 - p) / n_traj)))
    k = int(np.argmin(probs))
    return HittingReport(probs[k], ses[k], np.array(probs), np.array(ses), blown)


def sfde_sup_series(model: SFDE, x0, y0, gain, T: float, dt: float, seed: int, n_traj: int,
                    streams: Sequence[int] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Ensemble mean of ``||X_t - Y_t||_sup`` on the step grid."""
    run = run_coupled_pair(model, x0, y0, gain, T, dt, seed, n_traj, streams)
    return run.times, np.mean(np.sqrt(run.q), axis=0)


@dataclass(frozen=True)
class GainTuning:
    gain: float
    rate: float
    history: tuple


def tune_sfde_gain(model: SFDE, x0, y0, T: float, dt: float, seed: int, n_traj: int = 32,
                   target: float = 1.0, max_doublings: int = 12) -> GainTuning:
    """Double the gain from 1 until the fitted decay rate of ``E||X_t - Y_t||_sup``
    over ``t >= r`` reaches ``target``."""
    gain = 1.0
    history = []
    for _ in range(max_doublings + 1):
        t, e = sfde_sup_series(model, x0, y0, gain, T, dt, seed, n_traj)
        sel = (t >= model.r) & (e > 0)
        rate = fit_decay_rate(t[sel], e[sel]).rate if sel.sum() >= 2 else np.inf
        history.append((gain, rate))
        if rate >= target:
            return GainTuning(gain, rate, tuple(history))
        gain *= 2.0
    raise DomainError(f"no gain up to {gain / 2:g} reached decay rate {target}")
