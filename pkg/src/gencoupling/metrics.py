"""Premetrics, the capped distance d_N, exact empirical Wasserstein-1 and TV estimates.

Also hosts the closed-form budgets that turn generalized-coupling estimates into
contraction and smallness factors for d_N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment, linprog

from .errors import DomainError, TransportSizeError

TRANSPORT_CAP = 512


@dataclass(frozen=True)
class Reject:
    """A budget that does not apply; ``reason`` names the violated condition."""

    reason: str

    def __bool__(self):
        return False


@dataclass(frozen=True)
class PremetricSpec:
    """``kind='norm'``: q(x,y)=||x-y||^2. ``kind='exp'``: exp(Q U(x)) q(x,y)^alpha.

    ``U`` and ``distance`` are callables on states; ``N`` is the d_N cap scale.
    """

    kind: str = "norm"
    alpha: float = 1.0
    Q: float = 0.0
    N: float = 1.0
    U: Callable | None = None
    distance: Callable | None = None

    def __post_init__(self):
        if self.kind not in ("norm", "exp"):
            raise DomainError(f"unknown premetric kind {self.kind!r}")
        if not 0 < self.alpha <= 1:
            raise DomainError("alpha must lie in (0, 1]")
        if self.Q < 0 or self.N < 0:
            raise DomainError("Q and N must be nonnegative")

    def q(self, x, y) -> float:
        if self.distance is not None:
            return float(self.distance(x, y)) ** 2
        return float(np.sum((np.asarray(x) - np.asarray(y)) ** 2))

    def theta(self, x, y) -> float:
        qxy = self.q(x, y)
        if self.kind == "norm":
            return qxy
        weight = math.exp(self.Q * self.U(x)) if self.U is not None and self.Q else 1.0
        return weight * qxy**self.alpha

    def d_N(self, x, y) -> float:
        # theta may be asymmetric, so both orientations are needed
        return d_N_eval(self.theta(x, y), self.theta(y, x), self.N)


@dataclass
class EmpiricalMeasure:
    points: Sequence
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        n = len(self.points)
        if n == 0:
            raise DomainError("empirical measure needs at least one point")
        if self.weights is None:
            self.weights = np.full(n, 1.0 / n)
        self.weights = np.asarray(self.weights, float)
        if self.weights.shape != (n,) or np.any(self.weights < 0):
            raise DomainError("weights must be nonnegative, one per point")
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise DomainError(f"weights sum to {self.weights.sum()!r}, not 1")

    def __len__(self):
        return len(self.points)

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(self.weights == self.weights[0]))


def d_N_eval(theta_xy: float, theta_yx: float, N: float) -> float:
    """``min(N theta(x,y), N theta(y,x), 1)``."""
    if theta_xy < 0 or theta_yx < 0:
        raise DomainError("premetric values must be nonnegative")
    if N <= 0:
        raise DomainError("N must be positive")
    return min(N * theta_xy, N * theta_yx, 1.0)


def theta_alpha_eval(q_xy: float, U_x: float, alpha: float, upsilon: float) -> float:
    """``q^alpha * exp(alpha * upsilon * U(x))``."""
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if q_xy < 0 or U_x < 0 or upsilon < 0:
        raise DomainError("q, U and upsilon must be nonnegative")
    if q_xy == 0:
        return 0.0
    return q_xy**alpha * math.exp(alpha * upsilon * U_x)


def _cost_matrix(mu: EmpiricalMeasure, nu: EmpiricalMeasure, d: Callable) -> np.ndarray:
    return np.array([[float(d(x, y)) for y in nu.points] for x in mu.points])


def empirical_wasserstein(mu: EmpiricalMeasure, nu: EmpiricalMeasure, d: Callable,
                          cap: int = TRANSPORT_CAP) -> float:
    """Exact optimal-transport cost ``W_d(mu, nu)``.

    Uniform measures are reduced to an assignment problem (replicating points
    up to a common multiplicity) and solved combinatorially; general weights go
    to the HiGHS simplex on the transportation LP.
    """
    if len(mu) > cap or len(nu) > cap:
        raise TransportSizeError(f"measures of size {len(mu)}, {len(nu)} exceed cap {cap}; subsample")
    cost = _cost_matrix(mu, nu, d)
    if np.any(cost < 0) or not np.all(np.isfinite(cost)):
        raise DomainError("cost must be finite and nonnegative")
    n, m = cost.shape
    if mu.is_uniform and nu.is_uniform:
        L = math.lcm(n, m)
        if L <= cap:
            big = np.repeat(np.repeat(cost, L // n, axis=0), L // m, axis=1)
            rows, cols = linear_sum_assignment(big)
            return float(big[rows, cols].sum() / L)
    return _transport_lp(cost, mu.weights, nu.weights)


def _transport_lp(cost, a, b) -> float:
    n, m = cost.shape
    A_rows = np.kron(np.eye(n), np.ones(m))
    A_cols = np.kron(np.ones(n), np.eye(m))
    A = np.vstack([A_rows, A_cols])[:-1]  # one constraint is redundant
    rhs = np.concatenate([a, b])[:-1]
    res = linprog(cost.ravel(), A_eq=A, b_eq=rhs, bounds=(0, None), method="highs")
    if res.status != 0:
        raise DomainError(f"transport LP failed: {res.message}")
    return float(res.fun)


def brute_force_wasserstein(xs: Sequence, ys: Sequence, d: Callable) -> float:
    """Reference value for equal-size uniform measures by enumerating permutations."""
    n = len(xs)
    if n != len(ys):
        raise DomainError("brute force requires equal sizes")
    cost = _cost_matrix(EmpiricalMeasure(list(xs)), EmpiricalMeasure(list(ys)), d)
    best = min(sum(cost[i, p[i]] for i in range(n)) for p in permutations(range(n)))
    return float(best / n)


def tv_histogram(a, b, projection: Callable | None = None, bins: int = 64) -> float:
    """Half L1 distance between histograms of projected samples on a shared range."""
    if bins < 2:
        raise DomainError("bins must be >= 2")
    a = np.asarray(a if projection is None else [projection(s) for s in a], float).ravel()
    b = np.asarray(b if projection is None else [projection(s) for s in b], float).ravel()
    if a.size == 0 or b.size == 0:
        raise DomainError("both sample sets must be nonempty")
    lo = min(a.min(), b.min())
    hi = max(a.max(), b.max())
    if hi == lo:
        return 0.0
    edges = np.linspace(lo, hi, bins + 1)
    pa, _ = np.histogram(a, edges)
    pb, _ = np.histogram(b, edges)
    return float(0.5 * np.abs(pa / a.size - pb / b.size).sum())


def contraction_budget(r_t: float, L_t: float, N: float):
    """Contraction factor ``r + L/N`` of d_N, valid when r <= 1/3 and N >= 2L.

    Inputs may be :class:`~fractions.Fraction` for exact arithmetic.
    """
    if r_t > Fraction(1, 3):
        return Reject("r(t) > 1/3")
    if N < 2.0 * L_t:
        return Reject("N < 2 L(t)")
    return r_t + L_t / N


def smallness_budget_b1(delta_hit: float, N: float, eps: float | None = None) -> float:
    """``1 - delta^2 / 2`` from a hitting probability delta (with eps = 1/(2N))."""
    if not 0 < delta_hit <= 1:
        raise DomainError("delta_hit must lie in (0, 1]")
    if N <= 0:
        raise DomainError("N must be positive")
    if eps is not None and not math.isclose(eps, 1.0 / (2.0 * N)):
        raise DomainError("the budget assumes eps = 1/(2N)")
    return 1.0 - 0.5 * delta_hit**2


def smallness_budget_b2(N: float, R_t: float, eps: float):
    """``1 - eps/2`` when ``N R(t) <= eps/2``."""
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    if N * R_t > eps / 2.0:
        return Reject("N R(t) > eps/2")
    return 1.0 - eps / 2.0
