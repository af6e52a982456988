r"""Truncated Fourier representation of 2D divergence-free flow on the torus.

Fields live on :math:`[0, 2\pi)^2` and are stored through their scalar vorticity
coefficients :math:`\hat\omega_k` in FFT layout on an ``M x M`` grid, with
``M >= 3 K_max + 1`` so that quadratic products are alias-free on the retained
disc ``0 < |k| <= K_max`` (the 2/3 rule).

Velocity is recovered by :func:`biot_savart`,
:math:`\hat u_k = i k^\perp \hat\omega_k / |k|^2` with :math:`k^\perp = (-k_y, k_x)`.
Norms are the unnormalized :math:`L^2` norms of the induced velocity,

.. math::

    \|u\|_H^2 = (2\pi)^2 \sum_k |\hat\omega_k|^2 / |k|^2, \qquad
    \|u\|_V^2 = (2\pi)^2 \sum_k |\hat\omega_k|^2,

so the enstrophy equals :math:`\|u\|_V^2` and the Stokes eigenvalues are
:math:`|k|^2` with :math:`\lambda_1 = 1`.

Coefficient arrays may carry leading batch axes; every kernel here acts on the
last two axes.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .errors import DimensionError, EmptySpectrumError

AREA = (2.0 * np.pi) ** 2


@dataclass(frozen=True, order=True)
class WaveVector:
    kx: int
    ky: int

    @property
    def k2(self) -> int:
        return self.kx * self.kx + self.ky * self.ky

    def __neg__(self):
        return WaveVector(-self.kx, -self.ky)

    def in_upper_half(self) -> bool:
        """Representative half-plane used for the real (cos/sin) basis."""
        return self.ky > 0 or (self.ky == 0 and self.kx > 0)


class Grid:
    """Wavenumber bookkeeping for a cutoff ``K_max``. Use :func:`grid`."""

    def __init__(self, K_max: int):
        if K_max < 1:
            raise EmptySpectrumError(f"K_max must be >= 1, got {K_max}")
        self.K_max = int(K_max)
        self.M = sfft.next_fast_len(3 * self.K_max + 1)
        k = np.rint(np.fft.fftfreq(self.M, 1.0 / self.M)).astype(np.int64)
        self.kx = np.broadcast_to(k[:, None], (self.M, self.M)).copy()
        self.ky = np.broadcast_to(k[None, :], (self.M, self.M)).copy()
        self.k2 = self.kx**2 + self.ky**2
        self.mask = (self.k2 > 0) & (self.k2 <= self.K_max**2)
        self.inv_k2 = np.zeros(self.k2.shape)
        self.inv_k2[self.mask] = 1.0 / self.k2[self.mask]
        self.kxf = self.kx.astype(float)
        self.kyf = self.ky.astype(float)
        # bits needed by the largest |k| component; see biot_savart
        self._kbits = int(np.ceil(np.log2(self.K_max + 1)))
        self.n_modes = int(self.mask.sum())
        for a in (self.kx, self.ky, self.k2, self.mask, self.inv_k2, self.kxf, self.kyf):
            a.flags.writeable = False

    def index(self, k: WaveVector) -> tuple[int, int]:
        if not 0 < k.k2 <= self.K_max**2:
            raise DimensionError(f"{k} is not a retained mode for K_max={self.K_max}")
        return k.kx % self.M, k.ky % self.M

    def to_physical(self, coeffs: np.ndarray) -> np.ndarray:
        return sfft.ifft2(coeffs, norm="forward").real

    def hermitian_extend(self, half: np.ndarray) -> np.ndarray:
        """Full FFT array from the ``ky >= 0`` half returned by ``rfft2``."""
        h = half.shape[-1]
        out = np.empty(half.shape[:-1] + (self.M,), complex)
        out[..., :h] = half
        rows = (-np.arange(self.M)) % self.M
        cols = self.M - np.arange(h, self.M)
        out[..., h:] = np.conj(half[..., rows, :][..., cols])
        return out

    def to_spectral(self, values: np.ndarray) -> np.ndarray:
        return sfft.fft2(values, norm="forward") * self.mask


@lru_cache(maxsize=None)
def grid(K_max: int) -> Grid:
    return Grid(K_max)


def stokes_eigenvalues(K_max: int) -> list[tuple[int, WaveVector]]:
    """Retained wave vectors sorted by ``|k|^2``, ties broken by ``(kx, ky)``.

    Raises EmptySpectrumError for ``K_max < 1``.
    """
    if K_max < 1:
        raise EmptySpectrumError(f"K_max must be >= 1, got {K_max}")
    modes = [
        WaveVector(kx, ky)
        for kx in range(-K_max, K_max + 1)
        for ky in range(-K_max, K_max + 1)
        if 0 < kx * kx + ky * ky <= K_max * K_max
    ]
    modes.sort(key=lambda k: (k.k2, k.kx, k.ky))
    return [(k.k2, k) for k in modes]


def _round_mantissa(x: np.ndarray, bits: int) -> np.ndarray:
    # Veltkamp split: keep the leading `bits` significant bits of each double.
    c = float(2 ** (53 - bits) + 1)
    t = x * c
    return t - (t - x)


class SpectralField:
    """Vorticity coefficients of a real, zero-mean field (optionally batched).

    ``coeffs`` has shape ``(..., M, M)`` in FFT layout. Entries outside the
    retained disc are zero. The array is copied and frozen on construction.
    """

    __slots__ = ("K_max", "coeffs")

    def __init__(self, coeffs, K_max: int):
        g = grid(K_max)
        c = np.array(coeffs, dtype=complex)
        if c.shape[-2:] != (g.M, g.M):
            raise DimensionError(f"expected trailing shape {(g.M, g.M)}, got {c.shape}")
        c = c * g.mask
        c.flags.writeable = False
        self.K_max = int(K_max)
        self.coeffs = c

    @property
    def grid(self) -> Grid:
        return grid(self.K_max)

    @classmethod
    def zeros(cls, K_max: int, batch: tuple = ()) -> "SpectralField":
        g = grid(K_max)
        return cls(np.zeros(batch + (g.M, g.M), complex), K_max)

    @classmethod
    def from_modes(cls, K_max: int, modes: dict) -> "SpectralField":
        """Build from ``{(kx, ky): coefficient}``; conjugate partners are filled in."""
        g = grid(K_max)
        c = np.zeros((g.M, g.M), complex)
        for key, val in modes.items():
            k = key if isinstance(key, WaveVector) else WaveVector(*key)
            i, j = g.index(k)
            c[i, j] = val
            i, j = g.index(-k)
            c[i, j] = np.conj(val)
        return cls(c, K_max)

    @classmethod
    def velocity_mode(cls, K_max: int, k, amplitude: float = 1.0, kind: str = "cos") -> "SpectralField":
        """Real eigenfunction ``cos(k.x)`` or ``sin(k.x)`` scaled to ``||u||_H = amplitude``."""
        k = k if isinstance(k, WaveVector) else WaveVector(*k)
        # ||u||_H^2 = AREA * 2|c|^2 / |k|^2 for the pair {k, -k}
        c = amplitude * np.sqrt(k.k2 / (2.0 * AREA))
        if kind == "cos":
            return cls.from_modes(K_max, {k: c})
        if kind == "sin":
            return cls.from_modes(K_max, {k: -1j * c})
        raise ValueError(f"kind must be 'cos' or 'sin', got {kind!r}")

    @classmethod
    def random(cls, K_max: int, rng: np.random.Generator, slope: float = 2.0,
               batch: tuple = ()) -> "SpectralField":
        """Random real field with coefficient variance ~ ``|k|^-slope``."""
        g = grid(K_max)
        w = rng.standard_normal(batch + (g.M, g.M)) * (1.0 + g.k2) ** (-slope / 2)
        c = g.to_spectral(w)
        return cls(c, K_max)

    @classmethod
    def from_physical(cls, values, K_max: int) -> "SpectralField":
        g = grid(K_max)
        return cls(g.to_spectral(np.asarray(values, float)), K_max)

    def to_physical(self) -> np.ndarray:
        return self.grid.to_physical(self.coeffs)

    def coeff(self, k) -> complex:
        k = k if isinstance(k, WaveVector) else WaveVector(*k)
        return self.coeffs[(...,) + self.grid.index(k)]

    def _check(self, other):
        if not isinstance(other, SpectralField):
            return NotImplemented
        if other.K_max != self.K_max:
            raise DimensionError(f"cutoff mismatch: {self.K_max} vs {other.K_max}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return SpectralField(self.coeffs + other.coeffs, self.K_max)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return SpectralField(self.coeffs - other.coeffs, self.K_max)

    def __mul__(self, a):
        return SpectralField(self.coeffs * a, self.K_max)

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(-self.coeffs, self.K_max)

    def __repr__(self):
        return f"SpectralField(K_max={self.K_max}, batch={self.coeffs.shape[:-2]})"

    def is_hermitian(self, tol: float = 0.0) -> bool:
        c = self.coeffs
        flipped = np.roll(np.flip(c, axis=(-2, -1)), 1, axis=(-2, -1))
        return bool(np.max(np.abs(c - np.conj(flipped)), initial=0.0) <= tol)

    @property
    def h_norm(self):
        return np.sqrt(h_norm2(self.coeffs, self.grid))

    @property
    def v_norm(self):
        return np.sqrt(v_norm2(self.coeffs, self.grid))


def h_norm2(coeffs: np.ndarray, g: Grid) -> np.ndarray:
    """``||u||_H^2`` of the velocity induced by vorticity ``coeffs``."""
    return AREA * np.sum((coeffs.real**2 + coeffs.imag**2) * g.inv_k2, axis=(-2, -1))


def v_norm2(coeffs: np.ndarray, g: Grid) -> np.ndarray:
    """``||u||_V^2``, equal to the enstrophy."""
    return AREA * np.sum((coeffs.real**2 + coeffs.imag**2) * g.mask, axis=(-2, -1))


def h_inner(a: np.ndarray, b: np.ndarray, g: Grid) -> np.ndarray:
    """Real inner product ``(u_a, u_b)_H`` of the induced velocities."""
    return AREA * np.sum((np.conj(a) * b).real * g.inv_k2, axis=(-2, -1))


def norms(field: SpectralField):
    """Return ``(h_norm, v_norm)``."""
    return field.h_norm, field.v_norm


def _velocity(coeffs: np.ndarray, g: Grid, cols: int | None = None):
    # `cols` restricts the wavenumber arrays to a leading block of ky columns
    sl = (slice(None), slice(0, cols))
    z = 1j * coeffs * g.inv_k2[sl]
    # Round so that kx*(ky*z) and ky*(kx*z) are both exact; the discrete
    # divergence of the returned velocity is then identically zero.
    z = _round_mantissa(z.real, 53 - 2 * g._kbits) + 1j * _round_mantissa(z.imag, 53 - 2 * g._kbits)
    return -g.kyf[sl] * z, g.kxf[sl] * z


def biot_savart(omega: SpectralField) -> tuple[SpectralField, SpectralField]:
    """Velocity components ``(u_x, u_y)`` as coefficient fields.

    The returned objects reuse :class:`SpectralField` as a container for the
    velocity component coefficients; they are not vorticities.
    """
    ux, uy = _velocity(omega.coeffs, omega.grid)
    return SpectralField(ux, omega.K_max), SpectralField(uy, omega.K_max)


def divergence(ux: SpectralField, uy: SpectralField) -> np.ndarray:
    """Coefficients of ``k . u_hat`` (the divergence up to a factor ``i``)."""
    g = ux.grid
    return g.kxf * ux.coeffs + g.kyf * uy.coeffs


def nonlinear_coeffs(coeffs: np.ndarray, g: Grid) -> np.ndarray:
    """Dealiased ``-(u . grad) omega`` on raw coefficient arrays."""
    h = g.M // 2 + 1
    c = coeffs[..., :h]
    ux, uy = _velocity(c, g, h)
    stack = np.stack([ux, uy, 1j * g.kxf[:, :h] * c, 1j * g.kyf[:, :h] * c])
    u, v, wx, wy = sfft.irfft2(stack, s=(g.M, g.M), norm="forward", axes=(-2, -1))
    half = sfft.rfft2(u * wx + v * wy, norm="forward")
    return -g.hermitian_extend(half) * g.mask


def nonlinear_term(omega: SpectralField) -> SpectralField:
    """Advection term ``-(u . grad) omega``, pseudo-spectral with 2/3 dealiasing."""
    return SpectralField(nonlinear_coeffs(omega.coeffs, omega.grid), omega.K_max)


def trilinear(v: SpectralField, u: SpectralField) -> np.ndarray:
    r"""``b(v, u, v) = \int (v . grad) u . v dz`` for the induced velocities."""
    g = v.grid
    vx, vy = _velocity(v.coeffs, g)
    ux, uy = _velocity(u.coeffs, g)
    stack = np.stack([vx, vy, 1j * g.kxf * ux, 1j * g.kyf * ux, 1j * g.kxf * uy, 1j * g.kyf * uy])
    px, py, uxx, uxy, uyx, uyy = sfft.ifft2(stack, norm="forward", axes=(-2, -1)).real
    integrand = (px * uxx + py * uxy) * px + (px * uyx + py * uyy) * py
    return AREA * integrand.mean(axis=(-2, -1))


@dataclass(frozen=True)
class ModeProjector:
    """Orthogonal projector onto the ``N`` lowest real Stokes eigenfunctions.

    The ordering is that of :func:`stokes_eigenvalues`. A wave vector ``k`` in
    the upper half-plane labels ``cos(k.x)``; its partner ``-k`` labels
    ``sin(k.x)``, so any ``N`` gives a real-valued projection.
    """

    N: int
    K_max: int

    def __post_init__(self):
        if self.N < 0:
            raise DimensionError("N must be >= 0")
        if self.N > grid(self.K_max).n_modes:
            raise DimensionError(f"N={self.N} exceeds the {grid(self.K_max).n_modes} retained modes")

    @property
    def modes(self) -> list[WaveVector]:
        return [k for _, k in stokes_eigenvalues(self.K_max)[: self.N]]

    @property
    def lambda_next(self) -> int:
        """``lambda_{N+1}`` read from the lattice spectrum."""
        spec = stokes_eigenvalues(self.K_max)
        if self.N >= len(spec):
            raise DimensionError("lambda_{N+1} lies beyond the cutoff")
        return spec[self.N][0]

    def weights(self, K_max: int | None = None):
        """Arrays ``(keep_full, keep_cos, keep_sin)`` in FFT layout for a field grid."""
        K_field = self.K_max if K_max is None else K_max
        if self.N > 0 and self.modes[-1].k2 > K_field**2:
            raise DimensionError("projector cutoff exceeds field cutoff")
        return _projector_weights(self.N, self.K_max, K_field)

    def apply_coeffs(self, coeffs: np.ndarray, g: Grid) -> np.ndarray:
        full, cos_only, sin_only = self.weights(g.K_max)
        return full * coeffs + cos_only * coeffs.real + sin_only * (1j * coeffs.imag)


@lru_cache(maxsize=None)
def _projector_weights(N: int, K_proj: int, K_field: int):
    g = grid(K_field)
    chosen = {k for _, k in stokes_eigenvalues(K_proj)[:N]}
    full = np.zeros((g.M, g.M))
    cos_only = np.zeros((g.M, g.M))
    sin_only = np.zeros((g.M, g.M))
    for k in chosen:
        if (-k) in chosen:
            target = full
        else:
            target = cos_only if k.in_upper_half() else sin_only
        for idx in (g.index(k), g.index(-k)):
            target[idx] = 1.0
    for a in (full, cos_only, sin_only):
        a.flags.writeable = False
    return full, cos_only, sin_only


def project_low_modes(field: SpectralField, proj: ModeProjector) -> SpectralField:
    """``P_N field``; raises DimensionError when the projector outgrows the field."""
    return SpectralField(proj.apply_coeffs(field.coeffs, field.grid), field.K_max)
