"""Counter-based Brownian increments and the Girsanov ledger.

Increments are a pure function of ``(master_seed, stream_index, step)``: the
Philox key is ``(master_seed, stream_index)`` and the counter is derived from
the step number, so any step can be regenerated without replaying the stream
and parallel workers never share generator state.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, DomainError

_TWO_PI = 2.0 * np.pi
_INV_2_53 = 2.0**-53


class Estimate(NamedTuple):
    value: float
    stderr: float


@dataclass(frozen=True)
class NoiseStream:
    master_seed: int
    stream_index: int
    m: int
    dt: float

    def __post_init__(self):
        if self.m < 1:
            raise DomainError("noise dimension must be >= 1")
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if not 0 <= self.master_seed < 2**64 or not 0 <= self.stream_index < 2**64:
            raise DomainError("seed and stream index must fit in 64 unsigned bits")

    @property
    def _words(self) -> int:
        # uniforms consumed per step; a multiple of 4 keeps steps block-aligned
        return 4 * -(-self.m // 4)

    def increments(self, start: int, count: int) -> np.ndarray:
        """Increments for steps ``start .. start+count-1``, shape ``(count, m)``."""
        if start < 0 or count < 0:
            raise DomainError("steps must be nonnegative")
        w = self._words
        bits = np.random.Philox(
            key=[self.master_seed, self.stream_index], counter=[start * (w // 4), 0, 0, 0]
        ).random_raw(count * w).reshape(count, w // 2, 2)
        u1 = ((bits[..., 0] >> np.uint64(11)).astype(float) + 1.0) * _INV_2_53
        u2 = (bits[..., 1] >> np.uint64(11)).astype(float) * _INV_2_53
        r = np.sqrt(-2.0 * np.log(u1))
        z = np.concatenate([r * np.cos(_TWO_PI * u2), r * np.sin(_TWO_PI * u2)], axis=-1)
        return z[:, : self.m] * np.sqrt(self.dt)


def sample_increment(stream: NoiseStream, step: int) -> np.ndarray:
    """The ``N(0, dt I_m)`` increment of ``stream`` at ``step``."""
    return stream.increments(step, 1)[0]


def ensemble_increments(master_seed: int, stream_indices: Sequence[int], m: int, dt: float,
                        start: int, count: int) -> np.ndarray:
    """Increments for many streams, shape ``(len(stream_indices), count, m)``."""
    return np.stack(
        [NoiseStream(master_seed, int(i), m, dt).increments(start, count) for i in stream_indices]
    )


def _neumaier(s, c, x):
    t = s + x
    c = c + np.where(np.abs(s) >= np.abs(x), (s - t) + x, (x - t) + s)
    return t, c


@dataclass(frozen=True)
class GirsanovLedger:
    """Running ``int |beta|^2 dt`` and ``int beta . dW`` (left-point), compensated.

    Fields may be scalars or arrays over an ensemble axis.
    """

    cost_sum: np.ndarray | float = 0.0
    cost_comp: np.ndarray | float = 0.0
    ito_sum_: np.ndarray | float = 0.0
    ito_comp: np.ndarray | float = 0.0
    t_sum: float = 0.0
    t_comp: float = 0.0

    @classmethod
    def zeros(cls, n: int | None = None) -> "GirsanovLedger":
        z = 0.0 if n is None else np.zeros(n)
        return cls(z, z, z, z)

    @property
    def t(self) -> float:
        return self.t_sum + self.t_comp

    @property
    def cost(self):
        return self.cost_sum + self.cost_comp

    @property
    def ito_sum(self):
        return self.ito_sum_ + self.ito_comp

    @property
    def logweight(self):
        return -self.ito_sum - 0.5 * self.cost

    def update(self, beta, dW, dt: float) -> "GirsanovLedger":
        beta = np.asarray(beta, float)
        dW = np.asarray(dW, float)
        if beta.shape != dW.shape:
            raise DimensionError(f"beta {beta.shape} and dW {dW.shape} differ")
        if not dt > 0:
            raise DomainError("dt must be positive")
        cs, cc = _neumaier(self.cost_sum, self.cost_comp, np.sum(beta * beta, axis=-1) * dt)
        isum, icomp = _neumaier(self.ito_sum_, self.ito_comp, np.sum(beta * dW, axis=-1))
        if np.ndim(cs) == 0:
            cs, cc, isum, icomp = float(cs), float(cc), float(isum), float(icomp)
        ts, tc = _neumaier(self.t_sum, self.t_comp, float(dt))
        return GirsanovLedger(cs, cc, isum, icomp, float(ts), float(tc))

    def snapshot(self) -> dict:
        return {"t": self.t, "cost": self.cost, "ito_sum": self.ito_sum, "logweight": self.logweight}


def ledger_update(ledger: GirsanovLedger, beta_t, dW, dt: float) -> GirsanovLedger:
    return ledger.update(beta_t, dW, dt)


def _costs(ledgers) -> np.ndarray:
    if isinstance(ledgers, GirsanovLedger):
        return np.atleast_1d(np.asarray(ledgers.cost, float))
    if isinstance(ledgers, np.ndarray):
        if ledgers.size == 0:
            raise DomainError("ensemble is empty")
        return ledgers.astype(float).ravel()
    out = np.concatenate([np.atleast_1d(np.asarray(l.cost, float)) for l in ledgers]) if len(ledgers) else np.array([])
    if out.size == 0:
        raise DomainError("ensemble is empty")
    return out


def _mean_se(x: np.ndarray) -> Estimate:
    se = float(x.std(ddof=1) / np.sqrt(x.size)) if x.size > 1 else 0.0
    return Estimate(float(x.mean()), se)


def ledger_kl_bound(ledgers) -> Estimate:
    """``(1/2) E int |beta|^2 dt`` with its Monte-Carlo standard error.

    ``ledgers`` is a ledger (scalar or ensemble), a list of ledgers or an
    array of terminal costs.
    """
    est = _mean_se(_costs(ledgers))
    return Estimate(0.5 * est.value, 0.5 * est.stderr)


def ledger_m_delta(ledgers, delta: float) -> Estimate:
    """Monte-Carlo ``M_delta = E (int |beta|^2 dt)^delta``."""
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    return _mean_se(_costs(ledgers) ** delta)
