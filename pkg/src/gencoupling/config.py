"""Experiment configuration: TOML loading, validation and model construction.

Validation collects every problem before reporting, and unknown keys are
errors. A validated :class:`ExperimentConfig` can build its model without
further checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from . import models as md
from .errors import ConfigError, GenCouplingError, RangeConditionError
from .spectral import SpectralField

MODEL_KEYS = {
    "drift": {"kind", "beta"},
    "sde": {"kind", "eigenvalues", "sigma", "nonlinearity", "coefficient"},
    "sfde": {"kind", "r", "a", "b", "g", "lyapunov"},
    "nse": {"kind", "nu", "K_max", "sigma_max_k2", "sigma_amplitude", "forcing", "N", "scheme"},
}
SECTION_KEYS = {
    "coupling": {"gain", "T", "dt", "ensemble", "x0", "y0", "mode", "refine", "record_every", "fit_from", "tv_bins"},
    "seeds": {"master_seed"},
    "outputs": {"directory", "formats", "per_run_csv"},
    "bounds": {"deltas", "N", "kl", "m_delta"},
    "certificate": {"zeta", "kappa", "mu", "b", "b1", "b2", "gamma_grid"},
    "hitprob": {"t0", "n_traj", "B", "D_radius", "dt"},
    "wasserstein": {"n_samples", "cap", "cost_cap"},
}
TOP_KEYS = {"model"} | set(SECTION_KEYS)
FORMATS = {"csv", "summary"}


@dataclass
class ExperimentConfig:
    model: dict
    coupling: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    certificate: dict = field(default_factory=dict)
    hitprob: dict = field(default_factory=dict)
    wasserstein: dict = field(default_factory=dict)
    source: str = ""

    @property
    def kind(self) -> str:
        return self.model["kind"]

    @property
    def master_seed(self) -> int:
        return int(self.seeds.get("master_seed", 0))

    @property
    def out_dir(self) -> Path:
        return Path(self.outputs.get("directory", "artifacts"))

    def build_model(self):
        return build_model(self.model)

    def initial_states(self):
        return initial_state(self.model, self.coupling.get("x0")), initial_state(self.model, self.coupling.get("y0"))

    def control(self, model):
        c = self.coupling
        if self.kind == "sde":
            return md.Control(float(c.get("gain", 1.0)))
        if self.kind == "sfde":
            return c.get("gain", 1.0)  # may be "auto"
        return True


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _matrix(x):
    a = np.asarray(x, float)
    return np.atleast_2d(a)


def build_model(m: dict):
    kind = m["kind"]
    if kind == "drift":
        return md.DriftedBrownian(m["beta"])
    if kind == "sde":
        lam = [float(v) for v in m["eigenvalues"]]
        sig = m.get("sigma", "identity")
        Sigma = np.eye(len(lam)) if sig == "identity" else _matrix(sig)
        return md.DissipativeSDE(lam, Sigma, m.get("nonlinearity", "zero"), float(m.get("coefficient", 0.0)))
    if kind == "sfde":
        g = m.get("g", [[1.0]])
        G = _matrix(g)
        return md.SFDE(float(m.get("r", 1.0)), md.LinearDelayDrift(float(m["a"]), float(m["b"])), G,
                       n=G.shape[0], lyapunov_option=m.get("lyapunov", "ii"))
    K = int(m.get("K_max", 16))
    sigma = md.unit_mode_directions(K, int(m.get("sigma_max_k2", 2)), float(m.get("sigma_amplitude", 0.25)))
    forcing = SpectralField.zeros(K)
    for entry in m.get("forcing", []):
        kx, ky, amp = entry[0], entry[1], entry[2]
        kind_f = entry[3] if len(entry) > 3 else "cos"
        forcing = forcing + SpectralField.velocity_mode(K, (int(kx), int(ky)), float(amp), kind_f)
    N = m.get("N")
    return md.NSE2D(float(m["nu"]), sigma, K, forcing, None if N is None else int(N), m.get("scheme", "euler"))


def initial_state(m: dict, spec):
    """``x0``/``y0`` from config: a vector (sde, sfde) or ``[[kx, ky, amp, kind], ...]`` (nse)."""
    kind = m["kind"]
    if kind in ("sde", "sfde", "drift"):
        return np.asarray(spec, float)
    K = int(m.get("K_max", 16))
    f = SpectralField.zeros(K)
    for entry in spec:
        kd = entry[3] if len(entry) > 3 else "cos"
        f = f + SpectralField.velocity_mode(K, (int(entry[0]), int(entry[1])), float(entry[2]), kd)
    return f


def _validate(raw: dict) -> list[str]:
    errs = []
    for key in raw:
        if key not in TOP_KEYS:
            errs.append(f"unknown section {key!r}")
    model = raw.get("model")
    if not isinstance(model, dict):
        errs.append("model section is required")
        return errs
    kind = model.get("kind")
    if kind not in MODEL_KEYS:
        errs.append(f"model.kind must be one of {sorted(MODEL_KEYS)}")
        return errs
    for key in model:
        if key not in MODEL_KEYS[kind]:
            errs.append(f"unknown key model.{key}")
    for sec, keys in SECTION_KEYS.items():
        val = raw.get(sec, {})
        if not isinstance(val, dict):
            errs.append(f"{sec} must be a section")
            continue
        for key in val:
            if key not in keys:
                errs.append(f"unknown key {sec}.{key}")

    def pos(sec, key, d, required=False, integer=False):
        if key not in d:
            if required:
                errs.append(f"{sec}.{key} is required")
            return
        v = d[key]
        if not _is_num(v) or (integer and not isinstance(v, int)):
            errs.append(f"{sec}.{key} must be a {'integer' if integer else 'number'}")
        elif not v > 0:
            errs.append(f"{sec}.{key} must be > 0")

    # model parameters
    if kind == "drift":
        beta = model.get("beta")
        if not isinstance(beta, list) or not beta or not all(_is_num(v) for v in beta):
            errs.append("model.beta must be a nonempty list of numbers")
    elif kind == "sde":
        lam = model.get("eigenvalues")
        if not isinstance(lam, list) or not lam or not all(_is_num(v) and v > 0 for v in lam):
            errs.append("model.eigenvalues must be a nonempty list of positive numbers")
        elif any(b < a for a, b in zip(lam, lam[1:])):
            errs.append("model.eigenvalues must be sorted ascending")
        if model.get("nonlinearity", "zero") not in md.NONLINEARITIES:
            errs.append(f"model.nonlinearity must be one of {sorted(md.NONLINEARITIES)}")
    elif kind == "sfde":
        pos("model", "r", model)
        for key in ("a", "b"):
            if not _is_num(model.get(key)):
                errs.append(f"model.{key} must be a number")
        if model.get("lyapunov", "ii") not in ("i", "ii"):
            errs.append("model.lyapunov must be 'i' or 'ii'")
    else:
        pos("model", "nu", model, required=True)
        pos("model", "K_max", model, integer=True)
        pos("model", "sigma_max_k2", model, integer=True)
        pos("model", "sigma_amplitude", model)
        if model.get("scheme", "euler") not in ("euler", "rk4"):
            errs.append("model.scheme must be 'euler' or 'rk4'")

    c = raw.get("coupling", {})
    if isinstance(c, dict):
        pos("coupling", "T", c, required=True)
        pos("coupling", "dt", c, required=True)
        pos("coupling", "ensemble", c, integer=True)
        pos("coupling", "refine", c, integer=True)
        pos("coupling", "record_every", c, integer=True)
        pos("coupling", "tv_bins", c, integer=True)
        if "fit_from" in c and (not _is_num(c["fit_from"]) or c["fit_from"] < 0):
            errs.append("coupling.fit_from must be >= 0")
        if c.get("mode", "coupled") not in ("coupled", "true"):
            errs.append("coupling.mode must be 'coupled' or 'true'")
        g = c.get("gain", 1.0)
        if not (g == "auto" and kind == "sfde") and not (_is_num(g) and g > 0):
            errs.append("coupling.gain must be > 0" + (" or 'auto'" if kind == "sfde" else ""))
        for key in ("x0", "y0"):
            if key not in c:
                errs.append(f"coupling.{key} is required")
        T, dt = c.get("T"), c.get("dt")
        if _is_num(T) and _is_num(dt) and T > 0 and dt > 0 and abs(round(T / dt) * dt - T) > 1e-9 * T:
            errs.append("coupling.T must be an integer multiple of coupling.dt")
        elif _is_num(T) and _is_num(dt) and T > 0 and dt > 0:
            k = c.get("record_every", 1)
            if isinstance(k, int) and k > 0 and round(T / dt) % k:
                errs.append("coupling.record_every must divide T / dt")
    s = raw.get("seeds", {})
    if isinstance(s, dict) and "master_seed" in s:
        v = s["master_seed"]
        if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < 2**64:
            errs.append("seeds.master_seed must be an unsigned 64-bit integer")
    o = raw.get("outputs", {})
    if isinstance(o, dict):
        if "formats" in o and (not isinstance(o["formats"], list) or not set(o["formats"]) <= FORMATS):
            errs.append(f"outputs.formats must be a subset of {sorted(FORMATS)}")
    b = raw.get("bounds", {})
    if isinstance(b, dict):
        for d in b.get("deltas", []):
            if not (_is_num(d) and 0 < d < 1):
                errs.append("bounds.deltas entries must lie in (0, 1)")
        for n in b.get("N", []):
            if not (_is_num(n) and n > 1):
                errs.append("bounds.N entries must exceed 1")
    cert = raw.get("certificate", {})
    if isinstance(cert, dict) and cert:
        for key in ("zeta", "mu"):
            pos("certificate", key, cert, required=True)
        for key in ("kappa", "b", "b1", "b2"):
            if key in cert and not (_is_num(cert[key]) and cert[key] >= 0):
                errs.append(f"certificate.{key} must be >= 0")
    h = raw.get("hitprob", {})
    if isinstance(h, dict) and h:
        pos("hitprob", "t0", h, required=True)
        pos("hitprob", "n_traj", h, integer=True)
        pos("hitprob", "D_radius", h, required=True)
        pos("hitprob", "dt", h)
    w = raw.get("wasserstein", {})
    if isinstance(w, dict) and w:
        pos("wasserstein", "n_samples", w, integer=True)
        pos("wasserstein", "cap", w, integer=True)

    # model construction checks (range condition, invertibility) only once
    # the parameters themselves are sound
    if not errs:
        try:
            mdl = build_model(model)
            if kind == "nse" and mdl.N == 0:
                errs.append("model: noise directions must cover the lowest mode (P_N H in Range(sigma) fails for N=1)")
        except RangeConditionError as e:
            errs.append(f"model: range condition P_N H in Range(sigma) violated: {e}")
        except GenCouplingError as e:
            errs.append(f"model: {e}")
        if isinstance(c, dict):
            for key in ("x0", "y0"):
                try:
                    v = initial_state(model, c[key])
                    dim = {"sde": len(model.get("eigenvalues", [])), "drift": len(model.get("beta", []))}
                    if kind in dim and np.shape(v) != (dim[kind],):
                        errs.append(f"coupling.{key} must have {dim[kind]} entries")
                except (GenCouplingError, TypeError, ValueError, IndexError) as e:
                    errs.append(f"coupling.{key} is malformed: {e}")
    return errs


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError([f"{source}: parse error: {e}"]) from None
    errs = _validate(raw)
    if errs:
        raise ConfigError(errs)
    return ExperimentConfig(source=source, **raw)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError([f"cannot read {path}: {e.strerror}"]) from None
    return parse_config(text, str(path))
