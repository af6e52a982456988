r"""Concrete Markov models: a Galerkin-truncated dissipative SDE, an SFDE with
delay, and the 2D stochastic Navier--Stokes equation on the torus.

Every model works on batched states (leading axis = trajectory) and exposes

* ``step(state, dW, beta, dt)`` -- one step driven by ``dW + beta dt``;
* ``pair_init / pair_beta / pair_step`` -- the generalized-coupling pair
  ``(X, Y)`` where ``Y`` receives the control drift ``beta`` in noise space;
* ``q``, ``U``, ``S`` and ``lyapunov`` functionals.

For additive-noise models (:class:`DissipativeSDE`, :class:`NSE2D`) a pair is
stored as ``(X, D)`` with ``D = X - Y``; the shared noise cancels in the
difference equation, which is integrated directly. The control acts on ``D``
through the diagonal operator ``G`` (``gain * P_N``), and is folded into the
exponential factor together with the linear part.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import spectral as sp
from .errors import (
    BlowUpError,
    DimensionError,
    DomainError,
    NonInvertibleError,
    RangeConditionError,
)
from .spectral import SpectralField

BLOWUP_THRESHOLD = 1e12
RANGE_TOL = 1e-10


class Pair(NamedTuple):
    X: object
    Z: object  # D = X - Y for additive models, Y otherwise


def _phi1(z: np.ndarray) -> np.ndarray:
    out = np.ones_like(z, dtype=float)
    nz = z != 0
    out[nz] = np.expm1(z[nz]) / z[nz]
    return out


def check_finite(norms: np.ndarray, t: float) -> None:
    norms = np.asarray(norms)
    bad = ~np.isfinite(norms) | (norms > BLOWUP_THRESHOLD)
    if np.any(bad):
        worst = norms[bad][0]
        raise BlowUpError(t, worst if np.isfinite(worst) else np.inf)


# ---------------------------------------------------------------------------
# Dissipative SDE on R^n (Galerkin-truncated Hilbert-space SDE)


def _b_zero(x, c):
    return np.zeros_like(x)


def _b_cubic_sat(x, c):
    return c * x**3 / (1.0 + x**2)


def _b_rotation(x, c):
    out = np.zeros_like(x)
    n2 = x.shape[-1] // 2 * 2
    out[..., 0:n2:2] = -c * x[..., 1:n2:2]
    out[..., 1:n2:2] = c * x[..., 0:n2:2]
    return out


# name -> (map, Lipschitz constant per unit coefficient)
NONLINEARITIES: dict[str, tuple[Callable, float]] = {
    "zero": (_b_zero, 0.0),
    "cubic_sat": (_b_cubic_sat, 9.0 / 8.0),
    "rotation": (_b_rotation, 1.0),
}


@dataclass(frozen=True)
class Control:
    """Control drift ``gain * P_N (X - Y)`` for the dissipative SDE.

    ``n_modes=None`` controls every coordinate.
    """

    gain: float = 1.0
    n_modes: int | None = None


class DissipativeSDE:
    r"""``dX = -diag(lambda) X dt + B(X) dt + Sigma dW`` on :math:`\mathbb R^n`."""

    kind = "sde"

    def __init__(self, eigenvalues, Sigma, nonlinearity: str = "zero", coefficient: float = 0.0):
        lam = np.asarray(eigenvalues, float)
        if lam.ndim != 1 or lam.size == 0 or np.any(lam <= 0):
            raise DomainError("eigenvalues must be a nonempty list of positive reals")
        if np.any(np.diff(lam) < 0):
            raise DomainError("eigenvalues must be sorted ascending")
        if nonlinearity not in NONLINEARITIES:
            raise DomainError(f"unknown nonlinearity {nonlinearity!r}; choose from {sorted(NONLINEARITIES)}")
        Sig = np.atleast_2d(np.asarray(Sigma, float))
        if Sig.shape[0] != lam.size:
            raise DimensionError(f"Sigma must have {lam.size} rows")
        self.lam = lam
        self.n = lam.size
        self.Sigma = Sig
        self.m = Sig.shape[1]
        self.nonlinearity = nonlinearity
        self.coefficient = float(coefficient)
        self._B = NONLINEARITIES[nonlinearity][0]
        self.lipschitz = abs(self.coefficient) * NONLINEARITIES[nonlinearity][1]
        self.Sigma_pinv = np.linalg.pinv(Sig)

    @property
    def noise_dim(self) -> int:
        return self.m

    def B(self, x):
        return self._B(x, self.coefficient)

    def init_state(self, x0, n: int) -> np.ndarray:
        x0 = np.asarray(x0, float)
        if x0.shape != (self.n,):
            raise DimensionError(f"state must have shape ({self.n},)")
        return np.broadcast_to(x0, (n, self.n)).copy()

    def step(self, x, dW, beta, dt: float):
        if dt <= 0:
            raise DomainError("dt must be positive")
        z = -self.lam * dt
        drift = self.B(x) + beta @ self.Sigma.T
        return np.exp(z) * x + _phi1(z) * dt * drift + dW @ self.Sigma.T

    def state_norm(self, x):
        return np.sqrt(np.sum(x * x, axis=-1))

    def U(self, x):
        return np.sum(x * x, axis=-1)

    def S(self, x):
        return np.sum(self.lam * x * x, axis=-1)

    def lyapunov(self, x):
        return self.U(x)

    def q(self, x, y):
        return np.sum((x - y) ** 2, axis=-1)

    # -- coupling
    def _projector(self, control: Control | None) -> np.ndarray:
        if control is None:
            return np.zeros(self.n)
        k = self.n if control.n_modes is None else control.n_modes
        if not 0 <= k <= self.n:
            raise DimensionError("n_modes out of range")
        p = np.zeros(self.n)
        p[:k] = 1.0
        resid = (np.eye(self.n) - self.Sigma @ self.Sigma_pinv) @ np.diag(p)
        if np.max(np.abs(resid), initial=0.0) > RANGE_TOL:
            raise RangeConditionError("range of Sigma must contain the controlled coordinates")
        return p

    def control_matrix(self, control: Control | None) -> np.ndarray:
        """Linear map ``D -> beta``."""
        if control is None:
            return np.zeros((self.m, self.n))
        return control.gain * self.Sigma_pinv * self._projector(control)

    def reimbursement_constant(self, control: Control | None) -> float:
        """``c`` with ``|beta|^2 <= c q``."""
        return float(np.linalg.norm(self.control_matrix(control), 2) ** 2)

    def pair_init(self, x0, y0, n: int) -> Pair:
        X = self.init_state(x0, n)
        return Pair(X, X - self.init_state(y0, n))

    def pair_beta(self, pair: Pair, control: Control | None):
        return pair.Z @ self.control_matrix(control).T

    def pair_step(self, pair: Pair, dW, beta, dt: float, control: Control | None) -> Pair:
        X, D = pair
        Y = X - D
        G = 0.0 if control is None else control.gain * self._projector(control)
        zD = -(self.lam + G) * dt
        D_new = np.exp(zD) * D + _phi1(zD) * dt * (self.B(X) - self.B(Y))
        return Pair(self.step(X, dW, np.zeros_like(dW), dt), D_new)

    def pair_X(self, pair):
        return pair.X

    def pair_Y(self, pair):
        return pair.X - pair.Z

    def pair_q(self, pair):
        return np.sum(pair.Z**2, axis=-1)


class DriftedBrownian:
    """``X = x + W`` paired with ``Y = y + W + beta t`` for a constant ``beta``.

    The simplest Girsanov shift: the controlled law is a Gaussian translate of
    the uncontrolled one, so KL and TV have closed forms.
    """

    kind = "drift"

    def __init__(self, beta):
        self.beta = np.atleast_1d(np.asarray(beta, float))
        self.m = self.n = self.beta.size

    @property
    def noise_dim(self) -> int:
        return self.m

    def init_state(self, x0, n: int) -> np.ndarray:
        x0 = np.asarray(x0, float)
        if x0.shape != (self.n,):
            raise DimensionError(f"state must have shape ({self.n},)")
        return np.broadcast_to(x0, (n, self.n)).copy()

    def step(self, x, dW, beta, dt: float):
        if dt <= 0:
            raise DomainError("dt must be positive")
        return x + dW + beta * dt

    def state_norm(self, x):
        return np.sqrt(np.sum(x * x, axis=-1))

    def U(self, x):
        return np.sum(x * x, axis=-1)

    def S(self, x):
        return np.zeros(x.shape[0])

    lyapunov = U

    def q(self, x, y):
        return np.sum((x - y) ** 2, axis=-1)

    def pair_init(self, x0, y0, n: int) -> Pair:
        return Pair(self.init_state(x0, n), self.init_state(y0, n))

    def pair_beta(self, pair: Pair, control=True):
        b = self.beta if control else np.zeros(self.m)
        return np.broadcast_to(b, pair.X.shape).copy()

    def pair_step(self, pair: Pair, dW, beta, dt: float, control=True) -> Pair:
        return Pair(self.step(pair.X, dW, 0.0, dt), self.step(pair.Z, dW, beta, dt))

    def pair_X(self, pair):
        return pair.X

    def pair_Y(self, pair):
        return pair.Z

    def pair_q(self, pair):
        return self.q(pair.X, pair.Z)


# ---------------------------------------------------------------------------
# Stochastic functional differential equation with delay


class Segment:
    """Discretized path on ``[-r, 0]`` held in a ring buffer.

    ``buf`` has shape ``(batch, L, n)`` with ``L = r/dt + 1``; ``head`` indexes
    the newest value ``X(t)``. The oldest value is ``X(t - r)``.
    """

    __slots__ = ("buf", "head", "dt")

    def __init__(self, buf: np.ndarray, head: int, dt: float):
        self.buf = buf
        self.head = head
        self.dt = dt

    @classmethod
    def constant(cls, value, r: float, dt: float, batch: int = 1) -> "Segment":
        value = np.atleast_1d(np.asarray(value, float))
        L = _segment_length(r, dt)
        return cls(np.broadcast_to(value, (batch, L, value.size)).copy(), L - 1, dt)

    @classmethod
    def from_path(cls, values, dt: float, batch: int = 1) -> "Segment":
        """``values`` ordered oldest -> newest, shape ``(L, n)`` or ``(L,)``."""
        v = np.asarray(values, float)
        if v.ndim == 1:
            v = v[:, None]
        return cls(np.broadcast_to(v, (batch,) + v.shape).copy(), v.shape[0] - 1, dt)

    @property
    def L(self) -> int:
        return self.buf.shape[1]

    @property
    def now(self) -> np.ndarray:
        return self.buf[:, self.head]

    def lag(self, steps: int) -> np.ndarray:
        """``X(t - steps*dt)``; ``steps = L - 1`` is the far end of the window."""
        if not 0 <= steps < self.L:
            raise DimensionError("lag outside the delay window")
        return self.buf[:, (self.head - steps) % self.L]

    def values(self) -> np.ndarray:
        """Ordered values oldest -> newest, shape ``(batch, L, n)``."""
        return np.roll(self.buf, self.L - 1 - self.head, axis=1)

    def sup_norm(self) -> np.ndarray:
        return np.max(np.sqrt(np.sum(self.buf**2, axis=-1)), axis=-1)

    def copy(self) -> "Segment":
        return Segment(self.buf.copy(), self.head, self.dt)

    def push_(self, value: np.ndarray) -> None:
        """Append ``X(t + dt)`` in place, dropping ``X(t - r)``."""
        self.head = (self.head + 1) % self.L
        self.buf[:, self.head] = value


def _segment_length(r: float, dt: float) -> int:
    steps = r / dt
    if abs(steps - round(steps)) > 1e-9 * max(1.0, steps) or round(steps) < 1:
        raise DomainError("delay r must be a positive integer multiple of dt")
    return int(round(steps)) + 1


@dataclass(frozen=True)
class LinearDelayDrift:
    """``f(x) = a x(0) + b x(-r)``."""

    a: float
    b: float

    def __call__(self, seg: Segment):
        return self.a * seg.now + self.b * seg.lag(seg.L - 1)


class SFDE:
    """``dX(t) = f(X_t) dt + g(X_t) dW(t)`` with segment state ``X_t``.

    ``g`` is either a constant ``(n, m)`` matrix or a callable returning
    ``(batch, n, m)`` from a :class:`Segment`; ``g_inv_bound`` declares
    ``sup ||g^{-1}||``.
    """

    kind = "sfde"

    def __init__(self, r: float, drift: Callable, g, n: int = 1, g_inv_bound: float | None = None,
                 lyapunov_option: str = "ii"):
        if not r > 0:
            raise DomainError("delay r must be positive")
        if lyapunov_option not in ("i", "ii"):
            raise DomainError("lyapunov_option is 'i' (sup norm) or 'ii' (endpoint)")
        self.r = float(r)
        self.drift = drift
        self.n = int(n)
        self.lyapunov_option = lyapunov_option
        if callable(g):
            self._g_const = None
            self._g = g
            if g_inv_bound is None:
                raise DomainError("state-dependent g needs a declared g_inv_bound")
            self.m = None
        else:
            G = np.atleast_2d(np.asarray(g, float))
            if G.shape[0] != self.n:
                raise DimensionError(f"g must have {self.n} rows")
            if np.linalg.matrix_rank(G) < self.n:
                raise NonInvertibleError("g has no right inverse")
            self._g_const = G
            self._g_pinv = np.linalg.pinv(G)
            self.m = G.shape[1]
            g_inv_bound = np.linalg.norm(self._g_pinv, "fro")
        self.g_inv_bound = float(g_inv_bound)

    @property
    def noise_dim(self) -> int:
        if self.m is None:
            raise DomainError("noise dimension of a state-dependent g is set at first use")
        return self.m

    def g(self, seg: Segment) -> np.ndarray:
        if self._g_const is not None:
            return np.broadcast_to(self._g_const, (seg.buf.shape[0],) + self._g_const.shape)
        return np.asarray(self._g(seg), float)

    def g_right_inverse(self, seg: Segment) -> np.ndarray:
        if self._g_const is not None:
            return np.broadcast_to(self._g_pinv, (seg.buf.shape[0],) + self._g_pinv.shape)
        G = self.g(seg)
        if np.any(np.linalg.matrix_rank(G) < G.shape[-2]):
            raise NonInvertibleError("g(Y_t) is singular")
        return np.linalg.pinv(G)

    def init_state(self, x0, n: int, dt: float) -> Segment:
        if isinstance(x0, Segment):
            if x0.buf.shape[1] != _segment_length(self.r, dt):
                raise DimensionError("segment grid does not match r/dt")
            vals = x0.values()[0]
            return Segment.from_path(vals, dt, batch=n)
        return Segment.constant(x0, self.r, dt, batch=n)

    def step(self, seg: Segment, dW, beta, dt: float) -> Segment:
        out = seg.copy()
        self.advance_(out, dW, beta, dt)
        return out

    def advance_(self, seg: Segment, dW, beta, dt: float) -> None:
        """Euler--Maruyama on the endpoint followed by a segment shift, in place."""
        x = seg.now
        noise = dW + beta * dt
        new = x + self.drift(seg) * dt + np.einsum("bij,bj->bi", self.g(seg), noise)
        seg.push_(new)

    def state_norm(self, seg: Segment):
        return np.sqrt(np.sum(seg.now**2, axis=-1))

    def U(self, seg):
        return self.lyapunov(seg)

    def S(self, seg):
        return np.zeros(seg.buf.shape[0])

    def lyapunov(self, seg: Segment):
        if self.lyapunov_option == "i":
            return seg.sup_norm() ** 2
        return np.sum(seg.now**2, axis=-1)

    def q(self, X: Segment, Y: Segment):
        return np.max(np.sum((X.buf - Y.buf) ** 2, axis=-1), axis=-1)

    def control_drift(self, X: Segment, Y: Segment, gain: float):
        """``beta = gain * g(Y_t)^{-1} (X(t) - Y(t))``."""
        if X.buf.shape != Y.buf.shape:
            raise DimensionError("segments must share a grid")
        return gain * np.einsum("bij,bj->bi", self.g_right_inverse(Y), X.now - Y.now)

    def reimbursement_constant(self, gain) -> float:
        if gain is None:
            return 0.0
        return float((gain * self.g_inv_bound) ** 2)

    def pair_init(self, x0, y0, n: int, dt: float) -> Pair:
        return Pair(self.init_state(x0, n, dt), self.init_state(y0, n, dt))

    def pair_beta(self, pair: Pair, gain):
        if not gain:
            return np.zeros((pair.X.buf.shape[0], self.noise_dim))
        return self.control_drift(pair.X, pair.Z, gain)

    def pair_step(self, pair: Pair, dW, beta, dt: float, gain) -> Pair:
        self.advance_(pair.X, dW, np.zeros_like(dW), dt)
        self.advance_(pair.Z, dW, beta, dt)
        return pair

    def pair_X(self, pair):
        return pair.X

    def pair_Y(self, pair):
        return pair.Z

    def pair_q(self, pair):
        return self.q(pair.X, pair.Z)


# ---------------------------------------------------------------------------
# 2D stochastic Navier--Stokes (vorticity form, periodic)


class NSE2D:
    r"""Truncated 2D stochastic Navier--Stokes on the torus.

    ``d omega = (-nu A omega - (u.grad) omega + f) dt + sum_j sigma_j dW_j``.
    The coupling control is ``(nu lambda_{N+1} / 2) sigma^{-1} P_N (X - Y)``
    with ``N`` the largest count such that ``P_N H`` lies in the span of the
    noise directions (or the declared ``N``).
    """

    kind = "nse"

    def __init__(self, nu: float, sigma: list[SpectralField], K_max: int,
                 forcing: SpectralField | None = None, N: int | None = None, scheme: str = "euler"):
        if not nu >= 0:
            raise DomainError("viscosity must be nonnegative")
        if scheme not in ("euler", "rk4"):
            raise DomainError("scheme must be 'euler' or 'rk4'")
        self.nu = float(nu)
        self.K_max = int(K_max)
        self.g = sp.grid(self.K_max)
        self.scheme = scheme
        self.forcing = forcing if forcing is not None else SpectralField.zeros(self.K_max)
        if self.forcing.K_max != self.K_max or any(s.K_max != self.K_max for s in sigma):
            raise DimensionError("forcing and noise must share K_max")
        self.sigma = list(sigma)
        self.m = len(self.sigma)
        M = self.g.M
        self.sig = np.stack([s.coeffs for s in self.sigma]) if self.m else np.zeros((0, M, M), complex)
        self._build_coordinates()
        N_max = self._max_range_N()
        if N is None:
            N = N_max
        elif N > N_max:
            raise RangeConditionError(
                f"P_N H must lie in Range(sigma) (H_N subset of span sigma_k); holds only up to N={N_max}, not N={N}"
            )
        self.proj = sp.ModeProjector(N, self.K_max)
        self.N = N
        self.lambda_next = self.proj.lambda_next
        self.gain = 0.5 * self.nu * self.lambda_next
        forced = self._forced_coords()
        self._beta_map = self.gain * self.sig_pinv[:, forced] if N else np.zeros((self.m, 0))
        self._forced = forced
        self._P = self.proj.weights(self.K_max)

    # -- real orthonormal coordinates of H on the retained modes
    def _build_coordinates(self):
        reps = [k for _, k in sp.stokes_eigenvalues(self.K_max) if k.in_upper_half()]
        self._reps = reps
        self._rep_idx = tuple(np.array(a) for a in zip(*(self.g.index(k) for k in reps)))
        self._rep_scale = np.array([np.sqrt(2.0 * sp.AREA / k.k2) for k in reps])
        self._coord_of = {}
        P = len(reps)
        for i, k in enumerate(reps):
            self._coord_of[k] = i          # cos(k.x)
            self._coord_of[-k] = P + i     # sin(k.x)
        S = self.coords(self.sig).T if self.m else np.zeros((2 * P, 0))
        self.S_matrix = S
        self.sig_pinv = np.linalg.pinv(S) if self.m else np.zeros((0, 2 * P))
        self._proj_resid = np.eye(2 * P) - S @ self.sig_pinv

    def coords(self, coeffs: np.ndarray) -> np.ndarray:
        """H-orthonormal real coordinates ``(..., 2P)``: cos parts then sin parts."""
        c = coeffs[(...,) + self._rep_idx]
        return np.concatenate([self._rep_scale * c.real, self._rep_scale * c.imag], axis=-1)

    def _max_range_N(self) -> int:
        if self.m == 0:
            return 0
        resid = np.linalg.norm(self._proj_resid, axis=0)
        N = 0
        for _, k in sp.stokes_eigenvalues(self.K_max):
            if resid[self._coord_of[k]] > RANGE_TOL:
                break
            N += 1
        return N

    def _forced_coords(self) -> np.ndarray:
        return np.array([self._coord_of[k] for k in self.proj.modes], dtype=int)

    # -- constants
    @property
    def noise_dim(self) -> int:
        return self.m

    @property
    def sigma_norm2(self) -> float:
        return float(sum(s.h_norm**2 for s in self.sigma))

    @property
    def f_norm_Ahalf2(self) -> float:
        """``||A^{-1/2} f||_H^2``."""
        c = self.forcing.coeffs
        return float(sp.AREA * np.sum((c.real**2 + c.imag**2) * self.g.inv_k2**2))

    @property
    def control_constant(self) -> float:
        """``C`` with ``|beta| <= C ||P_N (X - Y)||_H``."""
        return float(np.linalg.norm(self._beta_map, 2)) if self.N else 0.0

    def reimbursement_constant(self, gain=None) -> float:
        return self.control_constant**2

    # -- dynamics
    def init_state(self, x0, n: int) -> np.ndarray:
        c = x0.coeffs if isinstance(x0, SpectralField) else np.asarray(x0, complex)
        if c.shape[-2:] != (self.g.M, self.g.M):
            raise DimensionError("initial field has the wrong cutoff")
        return np.broadcast_to(c * self.g.mask, (n, self.g.M, self.g.M)).copy()

    def noise_field(self, dW: np.ndarray) -> np.ndarray:
        return np.tensordot(dW, self.sig, axes=([-1], [0]))

    def _drift(self, w, beta):
        out = sp.nonlinear_coeffs(w, self.g) + self.forcing.coeffs
        if beta is not None and self.m:
            out = out + self.noise_field(beta)
        return out

    def step(self, w, dW, beta, dt: float):
        """Exponential Euler (or integrating-factor RK4) plus the additive noise increment."""
        if dt <= 0:
            raise DomainError("dt must be positive")
        z = -self.nu * self.g.k2 * dt
        E = np.exp(z) * self.g.mask
        if self.scheme == "euler":
            new = E * w + _phi1(z) * dt * self._drift(w, beta)
        else:
            E2 = np.exp(z / 2) * self.g.mask
            k1 = self._drift(w, beta)
            k2 = self._drift(E2 * (w + 0.5 * dt * k1), beta)
            k3 = self._drift(E2 * w + 0.5 * dt * k2, beta)
            k4 = self._drift(E * w + dt * E2 * k3, beta)
            new = E * w + dt / 6.0 * (E * k1 + 2.0 * E2 * (k2 + k3) + k4)
        if self.m:
            new = new + self.noise_field(dW)
        return new

    def state_norm(self, w):
        return np.sqrt(sp.h_norm2(w, self.g))

    def U(self, w):
        return sp.h_norm2(w, self.g)

    def S(self, w):
        return sp.v_norm2(w, self.g)

    def lyapunov(self, w):
        return self.U(w)

    def energy_terms(self, w):
        """``(U, S) = (||u||_H^2, ||u||_V^2)``."""
        return self.U(w), self.S(w)

    def q(self, x, y):
        return sp.h_norm2(x - y, self.g)

    def control_drift(self, X, Y) -> np.ndarray:
        """``beta`` solving ``sigma beta = (nu lambda_{N+1}/2) P_N (X - Y)`` in least squares."""
        x = X.coeffs if isinstance(X, SpectralField) else X
        y = Y.coeffs if isinstance(Y, SpectralField) else Y
        return self._beta_from_diff(x - y)

    def _beta_from_diff(self, d):
        if not self.N:
            return np.zeros(d.shape[:-2] + (self.m,))
        return self.coords(d)[..., self._forced] @ self._beta_map.T

    def pair_init(self, x0, y0, n: int) -> Pair:
        X = self.init_state(x0, n)
        return Pair(X, X - self.init_state(y0, n))

    def pair_beta(self, pair: Pair, control=True):
        if not control:
            return np.zeros(pair.Z.shape[:-2] + (self.m,))
        return self._beta_from_diff(pair.Z)

    def pair_step(self, pair: Pair, dW, beta, dt: float, control=True) -> Pair:
        """Exponential Euler for ``X`` and for ``D = X - Y``.

        Pairs always use the first-order scheme, whatever ``scheme`` says, so
        that ``X`` and ``D`` share one discretization.
        """
        if dt <= 0:
            raise DomainError("dt must be positive")
        X, D = pair
        z = -self.nu * self.g.k2 * dt
        NX, NY = sp.nonlinear_coeffs(np.stack([X, X - D]), self.g)
        R = NX - NY
        if control and self.N:
            full, cos_only, sin_only = self._P
            # G acts diagonally on full pairs; half-projected pairs are split
            # into real/imaginary parts with their own decay
            zf = z - self.gain * dt * full
            zr = zf - self.gain * dt * cos_only
            zi = zf - self.gain * dt * sin_only
            D_new = (np.exp(zr) * D.real + _phi1(zr) * dt * R.real) \
                + 1j * (np.exp(zi) * D.imag + _phi1(zi) * dt * R.imag)
        else:
            D_new = np.exp(z) * D + _phi1(z) * dt * R
        E = np.exp(z) * self.g.mask
        X_new = E * X + _phi1(z) * dt * (NX + self.forcing.coeffs)
        if self.m:
            X_new = X_new + self.noise_field(dW)
        return Pair(X_new, D_new * self.g.mask)

    def pair_X(self, pair):
        return pair.X

    def pair_Y(self, pair):
        return pair.X - pair.Z

    def pair_q(self, pair):
        return sp.h_norm2(pair.Z, self.g)


def control_drift_sfde(spec: SFDE, X_seg: Segment, Y_seg: Segment, lambda_gain: float):
    return spec.control_drift(X_seg, Y_seg, lambda_gain)


def control_drift_nse(spec: NSE2D, X, Y):
    return spec.control_drift(X, Y)


def lyapunov_eval(model, state):
    return model.lyapunov(state)


def energy_terms_nse(state: SpectralField):
    g = state.grid
    return sp.h_norm2(state.coeffs, g), sp.v_norm2(state.coeffs, g)


def unit_mode_directions(K_max: int, max_k2: int, amplitude: float = 1.0) -> list[SpectralField]:
    """Real cos/sin noise directions on every wave vector with ``|k|^2 <= max_k2``."""
    out = []
    for _, k in sp.stokes_eigenvalues(K_max):
        if k.k2 > max_k2:
            break
        if k.in_upper_half():
            out.append(SpectralField.velocity_mode(K_max, k, amplitude, "cos"))
            out.append(SpectralField.velocity_mode(K_max, k, amplitude, "sin"))
    return out
