r"""Closed-form rate, certificate and divergence bounds.

Every TV-type bound returns a :class:`Bound`, a float subclass that also
records whether the raw formula had to be clamped into ``[0, 1]`` and the
identifier of the inequality it evaluates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfeasibleError

LOG2 = math.log(2.0)


class Bound(float):
    """A numeric bound carrying ``raw`` (unclamped value), ``clamped`` and ``tag``."""

    def __new__(cls, value: float, raw: float | None = None, tag: str = ""):
        obj = super().__new__(cls, value)
        obj.raw = float(value) if raw is None else float(raw)
        obj.clamped = obj.raw != float(value)
        obj.tag = tag
        return obj

    def __repr__(self):
        flag = ", clamped" if self.clamped else ""
        return f"Bound({float(self)!r}{flag}, {self.tag})"


def _clamp01(raw: float, tag: str) -> Bound:
    return Bound(min(max(raw, 0.0), 1.0), raw, tag)


def _nonneg(x: float, name: str) -> float:
    x = float(x)
    if not x >= 0:
        raise DomainError(f"{name} must be nonnegative, got {x}")
    return x


def _delta(delta: float) -> float:
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    return float(delta)


# ---------------------------------------------------------------------------
# H1-H2 constants and the exponential-rate certificate


@dataclass(frozen=True)
class HConstants:
    """``(zeta, kappa, mu, b, b1, b2)``: dissipativity and energy constants."""

    zeta: float
    kappa: float
    mu: float
    b: float
    b1: float = 0.0
    b2: float = 0.0

    def __post_init__(self):
        for name in ("zeta", "kappa", "mu", "b", "b1", "b2"):
            if not getattr(self, name) >= 0:
                raise DomainError(f"{name} must be nonnegative")
        if not self.mu > 0:
            raise DomainError("mu must be positive")
        if not self.zeta > 0:
            raise DomainError("zeta must be positive")


@dataclass(frozen=True)
class Certificate:
    gamma: float
    upsilon: float
    chi: float
    alpha0: float
    lam: float
    Q: float


def check_condtheta(h: HConstants) -> bool:
    """``zeta > kappa b / mu``."""
    return h.zeta > h.kappa * h.b / h.mu


def certificate_at(h: HConstants, gamma: float) -> Certificate:
    """The certificate fields for one auxiliary ``gamma`` (no feasibility check)."""
    denom = h.mu - gamma * h.b1
    upsilon = h.kappa / denom
    chi = h.zeta - h.kappa * (h.b + gamma * h.b2) / denom
    alpha0 = min(gamma / upsilon, 0.5) if upsilon > 0 else 0.5
    lam = alpha0 * chi
    return Certificate(gamma, upsilon, chi, alpha0, lam, alpha0 * upsilon)


def default_gamma_grid(h: HConstants, n: int = 64) -> np.ndarray:
    """Geometric grid from ``1e-4`` to ``(mu/b1)(1 - 1e-6)``; the top is ``1e4`` when ``b1 = 0``."""
    top = h.mu / h.b1 * (1.0 - 1e-6) if h.b1 > 0 else np.inf
    if not np.isfinite(top):
        top = 1e4  # b1 = 0, or subnormal b1 overflowing mu / b1
    if top <= 1e-4:
        return np.geomspace(top * 1e-3, top, n)
    return np.geomspace(1e-4, top, n)


def derive_certificate(h: HConstants, gamma_grid=None) -> Certificate:
    """Best certificate on the grid: maximal ``lambda = alpha0 chi`` with ``chi > 0``.

    Ties go to the smaller ``gamma``. Raises InfeasibleError naming the
    binding constraint when no grid point qualifies.
    """
    if not check_condtheta(h):
        raise InfeasibleError(
            f"zeta <= kappa b / mu ({h.zeta:g} <= {h.kappa * h.b / h.mu:g}); no gamma gives chi > 0"
        )
    grid = default_gamma_grid(h) if gamma_grid is None else np.asarray(gamma_grid, float)
    best = None
    for gamma in sorted(float(g) for g in grid):
        if not gamma > 0:
            raise DomainError("gamma grid must be positive")
        if h.b1 > 0 and gamma >= h.mu / h.b1:
            continue
        c = certificate_at(h, gamma)
        if c.chi > 0 and c.lam > 0 and (best is None or c.lam > best.lam):
            best = c
    if best is None:
        raise InfeasibleError("chi <= 0 at every grid point inside (0, mu/b1); refine the gamma grid")
    return best


def nse_h_constants(nu: float, f_norm_Ahalf: float, sigma_norm2: float, lambda_Np1: float) -> HConstants:
    """Constants for the 2D NSE: ``zeta = nu lambda_{N+1}``, ``kappa = 4/nu``,
    ``mu = nu``, ``b = ||A^{-1/2} f||^2 / nu + ||sigma||^2``, ``b1 = 4 ||sigma||^2``,
    ``b2 = 0`` (Poincare constant 1 on the torus)."""
    if not nu > 0:
        raise DomainError("nu must be positive")
    f2 = _nonneg(f_norm_Ahalf, "f_norm_Ahalf") ** 2
    s2 = _nonneg(sigma_norm2, "sigma_norm2")
    return HConstants(
        zeta=nu * lambda_Np1, kappa=4.0 / nu, mu=nu, b=f2 / nu + s2, b1=4.0 * s2, b2=0.0
    )


def nse_threshold(nu: float, f_norm_Ahalf: float, sigma_norm2: float) -> float:
    """Right-hand side ``4 nu^-4 ||A^{-1/2} f||^2 + 4 nu^-3 ||sigma||^2``."""
    if not nu > 0:
        raise DomainError("nu must be positive")
    return 4.0 * f_norm_Ahalf**2 / nu**4 + 4.0 * sigma_norm2 / nu**3


def check_nse_threshold(nu: float, f_norm_Ahalf: float, sigma_norm2: float, lambda_Np1: float) -> bool:
    return lambda_Np1 > nse_threshold(nu, f_norm_Ahalf, sigma_norm2)


# ---------------------------------------------------------------------------
# KL and TV calculus


def pinsker_tv(kl: float) -> Bound:
    """``sqrt(kl / 2)`` clamped to 1."""
    kl = _nonneg(kl, "kl")
    return _clamp01(math.sqrt(kl / 2.0), "pinsker")


def tv_exp_bound(kl: float) -> Bound:
    """``1 - exp(-kl) / 2``."""
    kl = _nonneg(kl, "kl")
    return _clamp01(1.0 - 0.5 * math.exp(-kl), "kl-exp")


def measure_lower_bound(muA: float, kl: float, N: float) -> Bound:
    """``nu(A) >= mu(A)/N - (kl + log 2) / (N log N)``, floored at 0."""
    if not N > 1:
        raise DomainError("N must exceed 1")
    if not 0 <= muA <= 1:
        raise DomainError("mu(A) must lie in [0, 1]")
    kl = _nonneg(kl, "kl")
    raw = muA / N - (kl + LOG2) / (N * math.log(N))
    return _clamp01(raw, "kl-measure-lb")


def kl_girsanov(expected_cost: float) -> Bound:
    """``E int |beta|^2 dt / 2``."""
    return Bound(0.5 * _nonneg(expected_cost, "expected cost"), tag="girsanov-kl")


def tv_delta_upper(m_delta: float, delta: float) -> Bound:
    """``2^{(1-delta)/(1+delta)} M_delta^{1/(1+delta)}`` clamped to 1."""
    d = _delta(delta)
    m = _nonneg(m_delta, "M_delta")
    return _clamp01(2.0 ** ((1 - d) / (1 + d)) * m ** (1 / (1 + d)), "tv-delta-upper")


def tv_delta_floor(m_delta: float, delta: float) -> Bound:
    """``1 - min(1/8, exp(-(2^{2-delta} M_delta)^{1/delta})) / 6``, always below 1."""
    d = _delta(delta)
    m = _nonneg(m_delta, "M_delta")
    e = math.exp(-((2.0 ** (2 - d) * m) ** (1 / d)))
    return Bound(1.0 - min(0.125, e) / 6.0, tag="tv-delta-floor")


def wiener_lower_bound(mu_xi_A: float, m_delta: float, delta: float, N: float) -> Bound:
    """``(mu_xi(A) - 2^{1-delta} M_delta / (log N)^delta - log 2 / log N) / N``, floored at 0."""
    d = _delta(delta)
    if not N > 1:
        raise DomainError("N must exceed 1")
    if not 0 <= mu_xi_A <= 1:
        raise DomainError("mu_xi(A) must lie in [0, 1]")
    m = _nonneg(m_delta, "M_delta")
    L = math.log(N)
    raw = (mu_xi_A - 2.0 ** (1 - d) * m / L**d - LOG2 / L) / N
    return _clamp01(raw, "wiener-lb")


# ---------------------------------------------------------------------------
# subgeometric rate machinery


@dataclass(frozen=True)
class PhiSpec:
    """Concave rate function: ``linear`` is ``gamma u``, ``power`` is ``u^p`` with ``0 < p < 1``."""

    kind: str = "linear"
    gamma: float = 1.0
    p: float = 0.5

    def __post_init__(self):
        if self.kind == "linear":
            if not self.gamma > 0:
                raise DomainError("gamma must be positive")
        elif self.kind == "power":
            if not 0 < self.p < 1:
                raise DomainError("p must lie in (0, 1)")
        else:
            raise DomainError(f"unknown phi kind {self.kind!r}")

    def __call__(self, u):
        u = np.asarray(u, float)
        out = self.gamma * u if self.kind == "linear" else u**self.p
        return out if out.ndim else float(out)


def h_phi(x, phi: PhiSpec):
    """``H_phi(x) = int_1^x du / phi(u)`` in closed form."""
    x = np.asarray(x, float)
    if np.any(x < 1):
        raise DomainError("H_phi is defined for x >= 1")
    if phi.kind == "linear":
        out = np.log(x) / phi.gamma
    else:
        out = (x ** (1 - phi.p) - 1.0) / (1 - phi.p)
    return out if out.ndim else float(out)


def h_phi_inverse(t, phi: PhiSpec):
    t = np.asarray(t, float)
    if np.any(t < 0):
        raise DomainError("H_phi^{-1} takes t >= 0")
    if phi.kind == "linear":
        out = np.exp(phi.gamma * t)
    else:
        out = (1.0 + (1 - phi.p) * t) ** (1.0 / (1 - phi.p))
    return out if out.ndim else float(out)


def rate_curve(V_x: float, delta: float, C1: float, C2: float, t, phi: PhiSpec):
    """``C1 (1 + phi(V(x))^delta) / phi(H_phi^{-1}(C2 t))^delta``."""
    d = _delta(delta)
    if not C1 > 0 or not C2 > 0:
        raise DomainError("C1 and C2 must be positive")
    V = _nonneg(V_x, "V(x)")
    return C1 * (1.0 + phi(V) ** d) / phi(h_phi_inverse(np.multiply(C2, t), phi)) ** d
