"""Command-line harness.

Subcommands ``certify``, ``couple``, ``bounds``, ``wasserstein``, ``hitprob``
and ``report`` each read one TOML config (``--config``) and write into
``--out``. Flags may also come from ``GENCOUPLING_CONFIG``,
``GENCOUPLING_SEED``, ``GENCOUPLING_WORKERS`` and ``GENCOUPLING_OUT``; explicit
flags win.

Exit codes: 0 ok, 2 config error, 3 infeasible certificate, 4 blow-up, 5 I/O.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from . import bounds as bd
from . import coupling as cp
from .artifacts import fmt, summary_text, write_atomic, write_csv
from .config import ExperimentConfig, build_model, initial_state, load_config
from .errors import BlowUpError, ConfigError, InfeasibleError
from .metrics import EmpiricalMeasure, empirical_wasserstein, tv_histogram
from .models import SFDE, Segment
from .noise import ledger_kl_bound, ledger_m_delta

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_BLOWUP, EXIT_IO = 0, 2, 3, 4, 5
ENV_PREFIX = "GENCOUPLING_"
SUMMARY = "summary.toml"


class ReportError(Exception):
    """Artifact directory is missing files or holds an empty ensemble."""


# ---------------------------------------------------------------------------
# helpers shared by subcommands


def projection(model, state) -> np.ndarray:
    """Scalar observable used for projected TV estimates."""
    if isinstance(state, Segment):
        return state.now[:, 0]
    if model.kind == "nse":
        return model.coords(state)[:, 0]
    return np.asarray(state)[:, 0]


def distance(model, a, b) -> np.ndarray:
    """Batched state distance (H norm for the NSE, endpoint norm for the SFDE)."""
    if isinstance(a, Segment):
        a, b = a.now, b.now
    if model.kind == "nse":
        return np.sqrt(model.q(a, b))
    return np.sqrt(np.sum((np.asarray(a) - np.asarray(b)) ** 2, axis=-1))


def _split(streams, workers):
    k = max(1, min(workers, len(streams)))
    return [tuple(c) for c in np.array_split(np.asarray(streams), k) if len(c)]


def _pair_job(args):
    cfg_model, x0, y0, control, T, dt, seed, streams, refine, every, mode = args
    model = build_model(cfg_model)
    kw = dict(streams=streams, refine=refine, record_every=every)
    if mode == "true":
        return cp.run_true_pair(model, x0, y0, T, dt, seed, **kw)
    return cp.run_coupled_pair(model, x0, y0, control, T, dt, seed, **kw)


def _map(fn, jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


def run_ensemble(cfg: ExperimentConfig, workers: int = 1, control=None):
    """Coupled (or synchronous) ensemble described by ``cfg``; returns ``(run, control)``."""
    c = cfg.coupling
    model = cfg.build_model()
    x0, y0 = cfg.initial_states()
    if control is None:
        control = cfg.control(model)
    n = int(c.get("ensemble", 256))
    streams = tuple(range(n))
    jobs = [(cfg.model, x0, y0, control, float(c["T"]), float(c["dt"]), cfg.master_seed, s,
             int(c.get("refine", 1)), int(c.get("record_every", 1)), c.get("mode", "coupled"))
            for s in _split(streams, workers)]
    runs = _map(_pair_job, jobs, workers)
    if len(runs) == 1:
        return runs[0], control
    run = cp.merge_runs(runs)
    X = _concat_states([r.X_final for r in runs])
    Y = _concat_states([r.Y_final for r in runs])
    return cp.CoupledRun(**{**run.__dict__, "X_final": X, "Y_final": Y}), control


def _concat_states(states):
    if isinstance(states[0], Segment):
        s0 = states[0]
        return Segment(np.concatenate([s.buf for s in states]), s0.head, s0.dt)
    return np.concatenate(states)


def _single_job(args):
    cfg_model, x0, T, dt, seed, streams = args
    model = build_model(cfg_model)
    state, alive = cp._simulate_single(model, x0, T, dt, seed, streams)
    return state, alive


def sample_law(cfg: ExperimentConfig, x0, n: int, offset: int, workers: int = 1):
    """``n`` samples of ``P_T(x0, .)`` using streams ``offset .. offset+n-1``."""
    c = cfg.coupling
    streams = tuple(range(offset, offset + n))
    jobs = [(cfg.model, x0, float(c["T"]), float(c["dt"]), cfg.master_seed, s)
            for s in _split(streams, workers)]
    out = _map(_single_job, jobs, workers)
    states = _concat_states([s for s, _ in out])
    alive = np.concatenate([a for _, a in out])
    if not np.all(alive):
        raise BlowUpError(float(c["T"]), float("inf"), "a reference trajectory blew up")
    return states


# ---------------------------------------------------------------------------
# certificate


def certificate_sections(cfg: ExperimentConfig, model=None) -> dict:
    """Constants, threshold verdict and certificate. Raises InfeasibleError."""
    out = {}
    if cfg.certificate:
        c = cfg.certificate
        h = bd.HConstants(float(c["zeta"]), float(c.get("kappa", 0.0)), float(c["mu"]),
                          float(c.get("b", 0.0)), float(c.get("b1", 0.0)), float(c.get("b2", 0.0)))
        grid = c.get("gamma_grid")
    elif cfg.kind == "nse":
        model = model or cfg.build_model()
        f = float(np.sqrt(model.f_norm_Ahalf2))
        h = bd.nse_h_constants(model.nu, f, model.sigma_norm2, model.lambda_next)
        thr = bd.nse_threshold(model.nu, f, model.sigma_norm2)
        out["nse"] = {
            "nu": model.nu, "N": model.N, "lambda_next": model.lambda_next,
            "sigma_norm2": model.sigma_norm2, "f_norm_Ahalf": f,
            "threshold": thr, "threshold_holds": bool(model.lambda_next > thr),
            "tag": "nse-threshold",
        }
        grid = None
    else:
        return out
    out["constants"] = {k: getattr(h, k) for k in ("zeta", "kappa", "mu", "b", "b1", "b2")}
    out["constants"]["condtheta"] = bd.check_condtheta(h)
    out["constants"]["tag"] = "condtheta"
    cert = bd.derive_certificate(h, grid)
    out["certificate"] = {
        "gamma": cert.gamma, "upsilon": cert.upsilon, "chi": cert.chi,
        "alpha0": cert.alpha0, "lambda": cert.lam, "Q": cert.Q, "tag": "certificate",
    }
    return out


# ---------------------------------------------------------------------------
# bound evaluation next to empirical estimates


def bound_rows(costs: np.ndarray, Y_proj, ref_proj, deltas, Ns, bins: int) -> list[dict]:
    """Upper bounds on ``TV(Law Y_T, P_T(y, .))`` and lower bounds on event
    probabilities, each with its empirical counterpart."""
    n = costs.size
    kl = ledger_kl_bound(costs).value
    tv_hat = tv_histogram(Y_proj, ref_proj, bins=bins)
    tol = float(np.sqrt(bins / min(len(Y_proj), len(ref_proj))))
    rows = []

    def upper(name, b):
        rows.append({"name": name, "tag": b.tag, "kind": "upper", "bound": float(b), "raw": b.raw,
                     "clamped": b.clamped, "empirical": tv_hat, "tol": tol,
                     "violated": bool(tv_hat > float(b) + tol)})

    upper("pinsker", bd.pinsker_tv(kl))
    upper("kl_exp", bd.tv_exp_bound(kl))
    for d in deltas:
        M = ledger_m_delta(costs, d).value
        upper(f"tv_delta_upper[{d:g}]", bd.tv_delta_upper(M, d))
        upper(f"tv_delta_floor[{d:g}]", bd.tv_delta_floor(M, d))
    # event A: projection below the median of the controlled law
    thr = float(np.median(Y_proj))
    muA = float(np.mean(Y_proj <= thr))
    nuA = float(np.mean(ref_proj <= thr))
    se = float(np.sqrt(max(nuA * (1 - nuA), 1e-12) / len(ref_proj)))
    for N in Ns:
        b = bd.measure_lower_bound(muA, kl, N)
        rows.append({"name": f"measure_lb[{N:g}]", "tag": b.tag, "kind": "lower", "bound": float(b),
                     "raw": b.raw, "clamped": b.clamped, "empirical": nuA, "tol": 3 * se,
                     "violated": bool(nuA < float(b) - 3 * se)})
        for d in deltas:
            b = bd.wiener_lower_bound(muA, ledger_m_delta(costs, d).value, d, N)
            rows.append({"name": f"wiener_lb[{N:g},{d:g}]", "tag": b.tag, "kind": "lower",
                         "bound": float(b), "raw": b.raw, "clamped": b.clamped, "empirical": nuA,
                         "tol": 3 * se, "violated": bool(nuA < float(b) - 3 * se)})
    rows.append({"name": "kl_girsanov", "tag": "girsanov-kl", "kind": "value", "bound": kl,
                 "raw": kl, "clamped": False, "empirical": float("nan"), "tol": 0.0,
                 "violated": False, "n": n})
    return rows


# ---------------------------------------------------------------------------
# experiment


def run_experiment(cfg: ExperimentConfig, out: Path, workers: int = 1) -> Path:
    """Certificate, coupled ensemble, diagnostics and bounds; returns ``out``."""
    out = Path(out)
    model = cfg.build_model()
    sections = {"run": {"config": cfg.source, "model": cfg.kind, "master_seed": cfg.master_seed}}
    try:
        cert = certificate_sections(cfg, model)
    except InfeasibleError as e:
        write_atomic(out / "certificate.txt", f"infeasible: {e}\n")
        raise
    sections.update(cert)

    control = cfg.control(model)
    c = cfg.coupling
    if cfg.kind == "sfde" and control == "auto":
        x0, y0 = cfg.initial_states()
        tuning = cp.tune_sfde_gain(model, x0, y0, float(c["T"]), float(c["dt"]), cfg.master_seed)
        control = tuning.gain
        sections["gain_tuning"] = {"gain": tuning.gain, "rate": tuning.rate,
                                   "history_gain": [g for g, _ in tuning.history],
                                   "history_rate": [r for _, r in tuning.history]}
    run, control = run_ensemble(cfg, workers, control)
    sections["run"].update({"n_traj": run.n_traj, "T": float(run.times[-1]), "dt": run.dt,
                            "mode": c.get("mode", "coupled")})

    # decay of E q (SFDE: E sup-distance, fitted after one delay window)
    t = run.times
    if cfg.kind == "sfde":
        series = np.mean(np.sqrt(run.q), axis=0)
        t0 = float(c.get("fit_from", model.r))
        label = "E sup|X_t - Y_t|"
    else:
        series = np.mean(run.q, axis=0)
        t0 = float(c.get("fit_from", 0.0))
        label = "E q(X_t, Y_t)"
    sel = (t >= t0) & (series > 0)
    if cfg.kind != "drift" and sel.sum() >= 2:
        fit = cp.fit_decay_rate(t[sel], series[sel])
        sections["fit"] = {"series": label, "from": t0, "rate": fit.rate,
                           "intercept": fit.intercept, "r2": fit.r2}

    if cfg.kind == "nse":
        h = sections["constants"]
        rep = cp.verify_dissipativity(run, h["zeta"], h["kappa"])
        sections["dissipativity"] = {"zeta": h["zeta"], "kappa": h["kappa"], "tol": rep.tol,
                                     "violations": rep.violations, "worst_margin": rep.worst_margin,
                                     "tag": "H1"}
        en = cp.verify_energy(run, h["mu"], h["b"], h["b1"], h["b2"])
        sections["energy"] = {"mu": h["mu"], "b": h["b"], "mean": en.mean, "stderr": en.stderr,
                              "z": en.z, "within_3se": en.within_3se, "qv_slope": en.qv_slope,
                              "qv_bound_slope": en.qv_bound_slope, "tag": "H2"}
    if cfg.kind != "drift":  # a constant drift is not bounded by q
        reimb = model.reimbursement_constant(control)
        sections["reimbursement"] = {"c": reimb, "violations": cp.check_reimbursement(run, reimb),
                                     "tag": "reimbursement"}

    costs = run.cost[:, -1]
    kl = ledger_kl_bound(costs)
    sections["ledger"] = {"mean_cost": float(costs.mean()), "kl_bound": kl.value,
                          "kl_bound_stderr": kl.stderr, "tag": "girsanov-kl"}

    # empirical TV between Law(Y_T) and P_T(y0, .) from fresh streams
    b = cfg.bounds
    if c.get("mode", "coupled") == "coupled":
        _, y0 = cfg.initial_states()
        ref = sample_law(cfg, y0, run.n_traj, run.n_traj, workers)
        rows = bound_rows(costs, projection(model, run.Y_final), projection(model, ref),
                          b.get("deltas", [0.5]), b.get("N", [8.0]), int(c.get("tv_bins", 64)))
        sections["bounds"] = rows

    fmts = cfg.outputs.get("formats", ["csv", "summary"])
    if "csv" in fmts:
        write_csv(out / "ensemble.csv", {
            "t": t, "mean_q": np.mean(run.q, axis=0), "mean_U_x": np.mean(run.U, axis=0),
            "mean_S_int": np.mean(run.S_integral, axis=0), "mean_cost": np.mean(run.cost, axis=0),
            "mean_logweight": np.mean(run.logweight, axis=0),
        })
        if cfg.outputs.get("per_run_csv", True):
            for i in range(run.n_traj):
                write_csv(out / "runs" / f"run_{run.streams[i]:05d}.csv", run.csv_columns(i))
    write_atomic(out / SUMMARY, summary_text(sections))
    return out


# ---------------------------------------------------------------------------
# report


def load_summary(directory) -> dict:
    p = Path(directory) / SUMMARY
    if not p.is_file():
        raise ReportError(f"missing {p}")
    try:
        data = tomllib.loads(p.read_text())
    except tomllib.TOMLDecodeError as e:
        raise ReportError(f"corrupt {p}: {e}") from None
    if "run" in data and data["run"].get("n_traj", 1) < 1:
        raise ReportError("empty ensemble")
    return data


def report_summary(directory) -> str:
    """Human-readable digest; every bound line carries its provenance tag."""
    s = load_summary(directory)
    lines = []
    r = s.get("run", {})
    if r:
        lines.append(f"model {r.get('model')}  n_traj={r.get('n_traj')}  T={fmt(r.get('T', float('nan')))}"
                     f"  dt={fmt(r.get('dt', float('nan')))}  seed={r.get('master_seed')}")
    if "nse" in s:
        n = s["nse"]
        verdict = "holds" if n["threshold_holds"] else "FAILS"
        lines.append(f"[{n['tag']}] lambda_N+1={fmt(n['lambda_next'])} > {fmt(n['threshold'])}: {verdict}")
    if "constants" in s:
        h = s["constants"]
        lines.append(f"[{h['tag']}] zeta={fmt(h['zeta'])} kappa={fmt(h['kappa'])} mu={fmt(h['mu'])}"
                     f" b={fmt(h['b'])} b1={fmt(h['b1'])} b2={fmt(h['b2'])} zeta>kappa*b/mu: {h['condtheta']}")
    if "certificate" in s:
        c = s["certificate"]
        lines.append(f"[{c['tag']}] gamma={fmt(c['gamma'])} chi={fmt(c['chi'])} alpha0={fmt(c['alpha0'])}"
                     f" lambda={fmt(c['lambda'])} Q={fmt(c['Q'])}")
    if "fit" in s:
        f = s["fit"]
        lines.append(f"[fit] {f['series']}: rate={fmt(f['rate'])} r2={fmt(f['r2'])}")
    if "dissipativity" in s:
        d = s["dissipativity"]
        lines.append(f"[{d['tag']}] violations={d['violations']} worst_margin={fmt(d['worst_margin'])}"
                     f" tol={fmt(d['tol'])}")
    if "energy" in s:
        e = s["energy"]
        lines.append(f"[{e['tag']}] mean M_T={fmt(e['mean'])} +/- {fmt(e['stderr'])} (z={fmt(e['z'])})"
                     f" qv slope={fmt(e['qv_slope'])} vs bound {fmt(e['qv_bound_slope'])}")
    if "reimbursement" in s:
        m = s["reimbursement"]
        lines.append(f"[{m['tag']}] |beta|^2 <= {fmt(m['c'])} q: violations={m['violations']}")
    if "ledger" in s:
        g = s["ledger"]
        lines.append(f"[{g['tag']}] KL <= {fmt(g['kl_bound'])} +/- {fmt(g['kl_bound_stderr'])}")
    rows = s.get("bounds", [])
    if rows:
        lines.append(f"{'bound':<28}{'tag':<16}{'value':>12}{'empirical':>12}  status")
        for b in rows:
            if b.get("kind") == "value":
                continue
            status = "VIOLATED" if b["violated"] else "ok"
            if b.get("clamped"):
                status += " (clamped)"
            lines.append(f"{b['name']:<28}[{b['tag']}]".ljust(44)
                         + f"{b['bound']:>12.6g}{b['empirical']:>12.6g}  {status}")
    if not lines:
        raise ReportError("summary holds no results")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def cmd_certify(cfg, args):
    try:
        sections = certificate_sections(cfg)
    except InfeasibleError as e:
        write_atomic(args.out / "certificate.txt", f"infeasible: {e}\n")
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    if not sections:
        raise ConfigError(["certify needs a certificate section or an nse model"])
    write_atomic(args.out / SUMMARY, summary_text(sections))
    print(report_summary(args.out), end="")
    return EXIT_OK


def cmd_couple(cfg, args):
    try:
        run_experiment(cfg, args.out, args.workers)
    except InfeasibleError as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    print(report_summary(args.out), end="")
    return EXIT_OK


def cmd_bounds(cfg, args):
    b = cfg.bounds
    deltas = b.get("deltas", [0.5])
    Ns = b.get("N", [8.0])
    rows = {"name": [], "tag": [], "input": [], "delta": [], "N": [], "value": [], "clamped": []}

    def add(name, bound, x, d=float("nan"), N=float("nan")):
        for k, v in zip(rows, (name, bound.tag, x, d, N, float(bound), bound.clamped)):
            rows[k].append(v)

    for kl in b.get("kl", [0.5]):
        add("pinsker_tv", bd.pinsker_tv(kl), kl)
        add("tv_exp_bound", bd.tv_exp_bound(kl), kl)
        for N in Ns:
            add("measure_lower_bound", bd.measure_lower_bound(1.0, kl, N), kl, N=N)
    for M in b.get("m_delta", [0.1]):
        for d in deltas:
            add("tv_delta_upper", bd.tv_delta_upper(M, d), M, d)
            add("tv_delta_floor", bd.tv_delta_floor(M, d), M, d)
            for N in Ns:
                add("wiener_lower_bound", bd.wiener_lower_bound(1.0, M, d, N), M, d, N)
    write_csv(args.out / "bounds.csv", rows)
    for i in range(len(rows["name"])):
        print(f"{rows['name'][i]:<20} [{rows['tag'][i]}] input={fmt(rows['input'][i])} "
              f"delta={fmt(rows['delta'][i])} N={fmt(rows['N'][i])} -> {fmt(rows['value'][i])}"
              + (" (clamped)" if rows["clamped"][i] else ""))
    return EXIT_OK


def cmd_wasserstein(cfg, args):
    w = cfg.wasserstein
    n = int(w.get("n_samples", 128))
    cap = int(w.get("cap", 512))
    cost_cap = float(w.get("cost_cap", 1.0))
    model = cfg.build_model()
    x0, y0 = cfg.initial_states()
    X = sample_law(cfg, x0, n, 0, args.workers)
    Y = sample_law(cfg, y0, n, n, args.workers)
    idx = list(range(n))

    def d(i, j):
        return min(float(_pair_distance(model, X, Y, i, j)), cost_cap)

    W = empirical_wasserstein(EmpiricalMeasure(idx), EmpiricalMeasure(idx), d, cap=cap)
    write_csv(args.out / "wasserstein.csv", {"T": [float(cfg.coupling["T"])], "n": [n], "W": [W]})
    print(f"W_(d^{fmt(cost_cap)})(P_T(x0,.), P_T(y0,.)) = {fmt(W)}  (n={n})")
    return EXIT_OK


def _pair_distance(model, X, Y, i, j):
    if isinstance(X, Segment):
        return np.sqrt(np.sum((X.now[i] - Y.now[j]) ** 2))
    if model.kind == "nse":
        return np.sqrt(model.q(X[i], Y[j]))
    return np.sqrt(np.sum((X[i] - Y[j]) ** 2))


def cmd_hitprob(cfg, args):
    h = cfg.hitprob
    if not h:
        raise ConfigError(["hitprob section is required for the hitprob subcommand"])
    model = cfg.build_model()
    radius = float(h["D_radius"])
    pts = [initial_state(cfg.model, p) for p in h.get("B", [cfg.coupling.get("x0")])]

    def inside(state):
        if isinstance(state, Segment):
            return np.sqrt(np.sum(state.now**2, axis=-1)) <= radius
        return model.state_norm(state) <= radius

    rep = cp.estimate_hitting_prob(model, pts, inside, float(h["t0"]), int(h.get("n_traj", 256)),
                                   cfg.master_seed, float(h.get("dt", cfg.coupling.get("dt", 1e-3))))
    write_csv(args.out / "hitprob.csv", {"point": np.arange(len(pts)), "p": rep.per_point,
                                         "stderr": rep.per_point_se})
    print(f"inf_x P_t0(x, D) ~ {fmt(rep.probability)} +/- {fmt(rep.stderr)}  blowups={rep.blowups}")
    return EXIT_OK


def cmd_report(cfg, args):
    print(report_summary(args.out), end="")
    return EXIT_OK


COMMANDS = {
    "certify": cmd_certify,
    "couple": cmd_couple,
    "bounds": cmd_bounds,
    "wasserstein": cmd_wasserstein,
    "hitprob": cmd_hitprob,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gencoupling", description="Generalized-coupling experiments.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", type=Path, default=None, help="TOML experiment config")
    p.add_argument("--seed", type=int, default=None, help="override seeds.master_seed")
    p.add_argument("--workers", type=int, default=None, help="parallel trajectory workers")
    p.add_argument("--out", type=Path, default=None, help="artifact directory")
    return p


def _env(name):
    return os.environ.get(ENV_PREFIX + name)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is None and _env("CONFIG"):
            args.config = Path(_env("CONFIG"))
        if args.seed is None and _env("SEED"):
            args.seed = int(_env("SEED"))
        if args.workers is None:
            args.workers = int(_env("WORKERS") or 1)
        if args.out is None and _env("OUT"):
            args.out = Path(_env("OUT"))
    except ValueError as e:
        print(f"config error: bad environment override: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "report":
            if args.out is None:
                raise ConfigError(["report needs --out pointing at an artifact directory"])
            return cmd_report(None, args)
        if args.config is None:
            raise ConfigError(["--config is required"])
        cfg = load_config(args.config)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError(["--seed must be an unsigned 64-bit integer"])
            cfg.seeds["master_seed"] = args.seed
        if args.out is None:
            args.out = cfg.out_dir
        args.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as e:
        for msg in e.errors:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowUpError as e:
        print(f"blow-up: {e}", file=sys.stderr)
        return EXIT_BLOWUP
    except ReportError as e:
        print(f"report error: {e}", file=sys.stderr)
        return EXIT_IO
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
