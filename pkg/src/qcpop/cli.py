"""Command-line front end: single solves and the two benchmark studies.

Configs are flat JSON with complex matrices given as row-major arrays of
[re, im] pairs (see README for the field list).  Benchmark output is a
samples.csv (one record per row, byte-identical across reruns with the
same seed) plus a summary.json with aggregates and timings.
"""

from __future__ import annotations

import csv
import json
import math
import time
from pathlib import Path

import click
import numpy as np

from . import __version__
from .chebexp import cheb_exp
from .magnus import ControlAnsatz, QuantumSystem, convergence_functional, magnus_omega
from .objective import (
    CouplingPattern,
    GateTarget,
    StatePair,
    gate_objective,
    identification_objective,
    min_time_gate,
    min_time_state,
    state_objective,
)
from .oracle import DEFAULT_STEPS, frob_distance_sq, propagate, state_distance_sq
from .popsolve import (
    build_relaxation,
    extract_minimizer,
    multistart,
    relaxation_sdp,
    solve_sdp,
    with_ball,
)

MODES = (
    "gate",
    "state",
    "min-time-gate",
    "min-time-state",
    "identify",
    "bench-coherent",
    "bench-identify",
)


# ---------------------------------------------------------------------------
# Config ingestion
# ---------------------------------------------------------------------------

def _parse_complex_matrix(rows, name):
    try:
        m = np.array(
            [[complex(e[0], e[1]) for e in row] for row in rows], dtype=complex
        )
    except (TypeError, IndexError, ValueError) as exc:
        raise ValueError(f"{name}: entries must be [re, im] pairs ({exc})")
    return m


def _parse_complex_vector(entries, name):
    try:
        return np.array([complex(e[0], e[1]) for e in entries], dtype=complex)
    except (TypeError, IndexError, ValueError) as exc:
        raise ValueError(f"{name}: entries must be [re, im] pairs ({exc})")


class RunConfig:
    """Validated run configuration; every module invariant is checked here."""

    def __init__(self, raw):
        self.raw = raw
        self.mode = raw.get("mode")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")

        ansatz_cfg = raw.get("ansatz", {})
        m = int(ansatz_cfg.get("m", 3))
        horizon = ansatz_cfg.get("horizon", 0.5)
        symbolic = self.mode in ("min-time-gate", "min-time-state")
        self.ansatz = ControlAnsatz(m=m, horizon=None if symbolic else float(horizon))
        self.fixed_horizon = float(horizon)

        trunc = raw.get("truncation", {})
        self.magnus_order = int(trunc.get("magnus_order", 3))
        self.cheb_order = int(trunc.get("cheb_order", 5))
        self.relax_cheb_order = int(trunc.get("relax_cheb_order", 2))

        solver = raw.get("solver", {})
        self.relaxation_order = solver.get("relaxation_order", 4)
        if self.relaxation_order is not None:
            self.relaxation_order = int(self.relaxation_order)
        self.multistart_k = int(solver.get("multistart", 16))
        self.seed = int(solver.get("seed", 0))
        self.refine_max_iter = int(solver.get("refine_max_iter", 400))

        exp = raw.get("experiment", {})
        self.samples = int(exp.get("samples", 100))
        self.box = float(exp.get("box", 1.0))

        self.oracle_steps = int(raw.get("oracle", {}).get("steps", DEFAULT_STEPS))

        sys_cfg = raw.get("system")
        if sys_cfg is None:
            raise ValueError("config needs a 'system' section")
        h0 = _parse_complex_matrix(sys_cfg["h0"], "system.h0")
        if self.mode in ("identify", "bench-identify"):
            ident = raw.get("identify")
            if ident is None:
                raise ValueError(f"mode {self.mode} needs an 'identify' section")
            known = ident.get("known")
            self.pattern = CouplingPattern(
                dim=h0.shape[0],
                pairs=[tuple(p) for p in ident["pairs"]],
                known=_parse_complex_matrix(known, "identify.known")
                if known is not None
                else None,
            )
            self.true_z = np.array([float(z) for z in ident["true_z"]])
            if self.true_z.shape != (self.pattern.n_unknown,):
                raise ValueError("identify.true_z length must match identify.pairs")
            known_x = ident.get("known_x")
            self.known_x = (
                np.array([float(v) for v in known_x]) if known_x is not None else None
            )
            v_true = self.pattern.coupling_matrix(self.true_z)
            self.system = QuantumSystem(h0=h0, v=v_true)
        else:
            if "v" not in sys_cfg:
                raise ValueError("system.v is required outside identification modes")
            self.system = QuantumSystem(h0=h0, v=_parse_complex_matrix(sys_cfg["v"], "system.v"))
            self.pattern = None

        tgt = raw.get("target", {})
        self.target_from_x = tgt.get("from_x")
        self.u_star = (
            _parse_complex_matrix(tgt["u_star"], "target.u_star")
            if "u_star" in tgt
            else None
        )

        st = raw.get("state", {})
        self.psi0 = (
            _parse_complex_vector(st["psi0"], "state.psi0") if "psi0" in st else None
        )
        self.psi_star = (
            _parse_complex_vector(st["psi_star"], "state.psi_star")
            if "psi_star" in st
            else None
        )

        mt = raw.get("min_time", {})
        self.eps = float(mt.get("eps", 0.1))
        self.mt_box_radius = float(mt.get("box_radius", 2.0))
        self.t_max = float(mt.get("t_max", 4.0 * self.fixed_horizon))

    def override(self, seed=None, samples=None, relaxation_order=None, multistart_k=None):
        if seed is not None:
            self.seed = int(seed)
        if samples is not None:
            self.samples = int(samples)
        if relaxation_order is not None:
            self.relaxation_order = int(relaxation_order)
        if multistart_k is not None:
            self.multistart_k = int(multistart_k)


def load_config(path) -> RunConfig:
    with open(path) as fh:
        raw = json.load(fh)
    return RunConfig(raw)


# ---------------------------------------------------------------------------
# Shared pipeline pieces
# ---------------------------------------------------------------------------

def _sample_seed(seed, i):
    return (seed * 1_000_003 + i) % 2**63


def _gate_pieces(cfg, p):
    """exp_p(+Omega/2) and exp_p(-Omega/2) for the configured system."""
    omega = magnus_omega(cfg.system, cfg.ansatz, cfg.magnus_order).omega
    return cheb_exp(omega, p, +1).result, cheb_exp(omega, p, -1).result


def _objective_from_pieces(pieces, u_star, dim):
    plus, minus = pieces
    return (
        plus.right_mul(np.eye(dim)) - minus.right_mul(u_star)
    ).frobenius_square()


def _fmt(value):
    """Shortest round-trip decimal form; keeps reruns byte-identical."""
    if isinstance(value, float):  # includes numpy scalars
        return repr(float(value))
    return str(value)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _percentile(values, q):
    vals = sorted(v for v in values if math.isfinite(v))
    if not vals:
        return math.nan
    return float(np.percentile(vals, q))


def _solve_one(full_prob, relax_prob, cfg, sample_seed):
    """Reduced-order relaxation warm start, then multistart on the full POP."""
    rel = build_relaxation(with_ball(relax_prob), cfg.relaxation_order)
    sol = solve_sdp(relaxation_sdp(rel))
    ext = extract_minimizer(rel, sol)
    extra = [
        pt
        for pt in ext.points
        if np.all(np.isfinite(pt)) and np.linalg.norm(pt) <= 2 * full_prob.box_radius
    ]
    report = multistart(
        full_prob,
        cfg.multistart_k,
        sample_seed,
        extra_starts=extra,
        max_iter=cfg.refine_max_iter,
    )
    return rel, sol, ext, report


# ---------------------------------------------------------------------------
# Benchmarks
# ---------------------------------------------------------------------------

def run_bench_coherent(cfg: RunConfig, out_dir: Path):
    """Coherent-control study: sample x*, manufacture U*, solve, validate."""
    t0 = time.perf_counter()
    m = cfg.ansatz.m
    dim = cfg.system.dim
    rng = np.random.default_rng(cfg.seed)
    xstars = rng.uniform(-cfg.box, cfg.box, size=(cfg.samples, m))

    full_pieces = _gate_pieces(cfg, cfg.cheb_order)
    relax_pieces = _gate_pieces(cfg, cfg.relax_cheb_order)

    header = (
        ["sample"]
        + [f"xstar_{k+1}" for k in range(m)]
        + ["conv_at_xstar", "conv_ok_at_xstar", "lower_bound", "relaxation_status",
           "rank_ratio", "f_relax_at_xstar", "f_relax_at_xhat"]
        + [f"xhat_{k+1}" for k in range(m)]
        + ["conv_at_xhat", "conv_ok_at_xhat", "objective_at_xstar",
           "objective_at_xhat", "true_residual", "status"]
    )
    rows = []
    for i in range(cfg.samples):
        xstar = xstars[i]
        u_star = propagate(cfg.system, cfg.ansatz, xstar, cfg.oracle_steps).u_t
        conv_star = convergence_functional(cfg.system, cfg.ansatz, xstar)
        full_prob = _wrap(_objective_from_pieces(full_pieces, u_star, dim))
        relax_prob = _wrap(_objective_from_pieces(relax_pieces, u_star, dim))
        try:
            rel, sol, ext, report = _solve_one(
                full_prob, relax_prob, cfg, _sample_seed(cfg.seed, i)
            )
            status = "ok" if sol.optimal else f"sdp-{sol.status}"
        except Exception as exc:  # recorded, never fatal per sample
            rows.append(
                [i] + list(xstar) + [conv_star, int(conv_star < math.pi)]
                + [math.nan, "failed", math.nan, math.nan, math.nan]
                + [math.nan] * m
                + [math.nan, 0, math.nan, math.nan, math.nan, f"error:{exc}"]
            )
            continue
        xhat = report.refined_point
        conv_hat = convergence_functional(cfg.system, cfg.ansatz, xhat)
        u_hat = propagate(cfg.system, cfg.ansatz, xhat, cfg.oracle_steps).u_t
        rows.append(
            [i]
            + [float(v) for v in xstar]
            + [conv_star, int(conv_star < math.pi), sol.primal_objective, sol.status,
               ext.rank_ratio,
               float(relax_prob.objective.evaluate(xstar)),
               float(relax_prob.objective.evaluate(xhat))]
            + [float(v) for v in xhat]
            + [conv_hat, int(conv_hat < math.pi),
               float(full_prob.objective.evaluate(xstar)),
               float(report.objective_at_refined),
               math.sqrt(frob_distance_sq(u_hat, u_star)),
               status]
        )
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(out_dir / "samples.csv", header, rows)

    idx = {name: k for k, name in enumerate(header)}
    resid = [r[idx["true_residual"]] for r in rows]
    summary = {
        "mode": "bench-coherent",
        "version": __version__,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "convergence_violations_at_xstar": sum(
            1 for r in rows if not r[idx["conv_ok_at_xstar"]]
        ),
        "convergence_violations_at_xhat": sum(
            1 for r in rows if not r[idx["conv_ok_at_xhat"]]
        ),
        "solver_failures": sum(1 for r in rows if str(r[idx["status"]]).startswith("error")),
        "median_true_residual": _percentile(resid, 50),
        "p90_true_residual": _percentile(resid, 90),
        "max_true_residual": max((v for v in resid if math.isfinite(v)), default=math.nan),
        "median_objective_at_xhat": _percentile(
            [r[idx["objective_at_xhat"]] for r in rows], 50
        ),
        "bound_minus_f_at_xstar_max": max(
            (
                r[idx["lower_bound"]] - r[idx["f_relax_at_xstar"]]
                for r in rows
                if math.isfinite(r[idx["lower_bound"]])
            ),
            default=math.nan,
        ),
        "wall_time_s": time.perf_counter() - t0,
    }
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def _wrap(objective):
    from .objective import PopProblem

    return PopProblem(objective=objective)


def run_bench_identify(cfg: RunConfig, out_dir: Path):
    """Single-pair coupling recovery study over random known controls."""
    t0 = time.perf_counter()
    m = cfg.ansatz.m
    nz = cfg.pattern.n_unknown
    rng = np.random.default_rng(cfg.seed)
    xs = rng.uniform(-cfg.box, cfg.box, size=(cfg.samples, m))
    target_cache = {}

    header = (
        ["sample"]
        + [f"x_{k+1}" for k in range(m)]
        + ["lower_bound", "relaxation_status", "rank_ratio",
           "f_relax_at_ztrue", "f_relax_at_zhat"]
        + [f"zhat_{q+1}" for q in range(nz)]
        + ["objective_at_ztrue", "objective_at_zhat"]
        + [f"err_z{q+1}" for q in range(nz)]
        + ["max_err", "orbit_symmetric", "status"]
    )
    rows = []
    for i in range(cfg.samples):
        x_known = xs[i]
        u_star = propagate(cfg.system, cfg.ansatz, x_known, cfg.oracle_steps).u_t
        target = GateTarget(u_star=_project_unitary(u_star))
        full_prob = identification_objective(
            cfg.system.h0, cfg.pattern, x_known, cfg.ansatz, target,
            cfg.magnus_order, cfg.cheb_order,
        )
        relax_prob = identification_objective(
            cfg.system.h0, cfg.pattern, x_known, cfg.ansatz, target,
            cfg.magnus_order, cfg.relax_cheb_order,
        )
        try:
            rel, sol, ext, report = _solve_one(
                full_prob, relax_prob, cfg, _sample_seed(cfg.seed, i)
            )
            status = "ok" if sol.optimal else f"sdp-{sol.status}"
        except Exception as exc:
            rows.append(
                [i] + list(x_known)
                + [math.nan, "failed", math.nan, math.nan, math.nan]
                + [math.nan] * nz + [math.nan, math.nan]
                + [math.nan] * nz + [math.nan, 0, f"error:{exc}"]
            )
            continue
        zhat = report.refined_point
        obj = full_prob.objective
        # Some patterns leave the dynamics invariant under z -> -z; when
        # the objective confirms that, report errors on the best orbit
        # member.
        symmetric = abs(obj.evaluate(-zhat) - obj.evaluate(zhat)) <= 1e-9 * (
            1.0 + abs(obj.evaluate(zhat))
        )
        orbit = [zhat, -zhat] if symmetric else [zhat]
        best = min(orbit, key=lambda z: np.max(np.abs(z - cfg.true_z)))
        errs = np.abs(best - cfg.true_z)
        rows.append(
            [i]
            + [float(v) for v in x_known]
            + [sol.primal_objective, sol.status, ext.rank_ratio,
               float(relax_prob.objective.evaluate(cfg.true_z)),
               float(relax_prob.objective.evaluate(best))]
            + [float(v) for v in best]
            + [float(obj.evaluate(cfg.true_z)), float(obj.evaluate(best))]
            + [float(e) for e in errs]
            + [float(np.max(errs)), int(symmetric), status]
        )
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(out_dir / "samples.csv", header, rows)

    idx = {name: k for k, name in enumerate(header)}
    max_errs = [r[idx["max_err"]] for r in rows]
    summary = {
        "mode": "bench-identify",
        "version": __version__,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "true_z": [float(z) for z in cfg.true_z],
        "solver_failures": sum(1 for r in rows if str(r[idx["status"]]).startswith("error")),
        "median_max_err": _percentile(max_errs, 50),
        "p90_max_err": _percentile(max_errs, 90),
        "max_max_err": max((v for v in max_errs if math.isfinite(v)), default=math.nan),
        "wall_time_s": time.perf_counter() - t0,
    }
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def _project_unitary(u):
    """Nearest unitary (polar projection); scrubs integrator dust."""
    w, _, vh = np.linalg.svd(u)
    return w @ vh


# ---------------------------------------------------------------------------
# Single solves
# ---------------------------------------------------------------------------

def run_single(cfg: RunConfig, out_dir: Path):
    """One problem of the configured mode, full report as JSON."""
    t0 = time.perf_counter()
    doc = {"mode": cfg.mode, "version": __version__, "seed": cfg.seed}
    if cfg.mode in ("gate", "state", "identify"):
        doc.update(_run_single_fixed_horizon(cfg))
    elif cfg.mode in ("min-time-gate", "min-time-state"):
        doc.update(_run_single_min_time(cfg))
    else:
        raise ValueError(f"mode {cfg.mode} is a benchmark; use the bench commands")
    doc["wall_time_s"] = time.perf_counter() - t0
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "solution.json", "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return doc


def _resolve_gate_target(cfg):
    if cfg.u_star is not None:
        return GateTarget(u_star=cfg.u_star)
    if cfg.target_from_x is not None:
        x = np.array([float(v) for v in cfg.target_from_x])
        # symbolic-horizon modes manufacture the target at the nominal T
        u = propagate(
            cfg.system, cfg.ansatz, x, cfg.oracle_steps, horizon=cfg.fixed_horizon
        ).u_t
        return GateTarget(u_star=_project_unitary(u))
    raise ValueError("config needs target.u_star or target.from_x")


def _run_single_fixed_horizon(cfg):
    if cfg.mode == "gate":
        target = _resolve_gate_target(cfg)
        full = gate_objective(
            cfg.system, cfg.ansatz, target, cfg.magnus_order, cfg.cheb_order
        )
        relax = gate_objective(
            cfg.system, cfg.ansatz, target, cfg.magnus_order, cfg.relax_cheb_order
        )
    elif cfg.mode == "state":
        if cfg.psi0 is None or cfg.psi_star is None:
            raise ValueError("state mode needs state.psi0 and state.psi_star")
        pair = StatePair(psi0=cfg.psi0, psi_star=cfg.psi_star)
        full = state_objective(
            cfg.system, cfg.ansatz, pair, cfg.magnus_order, cfg.cheb_order
        )
        relax = state_objective(
            cfg.system, cfg.ansatz, pair, cfg.magnus_order, cfg.relax_cheb_order
        )
    else:  # identify
        if cfg.known_x is None:
            raise ValueError("identify mode needs identify.known_x")
        target = _resolve_gate_target(cfg)
        args = (cfg.system.h0, cfg.pattern, cfg.known_x, cfg.ansatz, target,
                cfg.magnus_order)
        full = identification_objective(*args, cfg.cheb_order)
        relax = identification_objective(*args, cfg.relax_cheb_order)

    rel, sol, ext, report = _solve_one(full, relax, cfg, cfg.seed)
    doc = {
        "report": report.to_dict(),
        "lower_bound": sol.primal_objective,
        "relaxation_status": sol.status,
        "relaxation_order": cfg.relaxation_order,
        "f_relax_at_solution": float(
            relax.objective.evaluate(report.refined_point)
        ),
    }
    if cfg.mode == "gate":
        u_hat = propagate(cfg.system, cfg.ansatz, report.refined_point, cfg.oracle_steps).u_t
        doc["true_residual"] = math.sqrt(frob_distance_sq(u_hat, target.u_star))
        doc["convergence_integral"] = convergence_functional(
            cfg.system, cfg.ansatz, report.refined_point
        )
        doc["convergence_ok"] = bool(doc["convergence_integral"] < math.pi)
    elif cfg.mode == "state":
        u_hat = propagate(cfg.system, cfg.ansatz, report.refined_point, cfg.oracle_steps).u_t
        doc["true_residual_sq"] = state_distance_sq(u_hat, pair.psi0, pair.psi_star)
    else:
        doc["zhat"] = [float(v) for v in report.refined_point]
        doc["z_errors"] = [
            float(e) for e in np.abs(report.refined_point - cfg.true_z)
        ]
    return doc


def _run_single_min_time(cfg):
    if cfg.mode == "min-time-gate":
        target = _resolve_gate_target(cfg)
        prob = min_time_gate(
            cfg.system, cfg.ansatz, target, cfg.magnus_order, cfg.cheb_order,
            eps=cfg.eps, box_radius=cfg.mt_box_radius, t_max=cfg.t_max,
        )
    else:
        if cfg.psi0 is None or cfg.psi_star is None:
            raise ValueError("min-time-state needs state.psi0 and state.psi_star")
        pair = StatePair(psi0=cfg.psi0, psi_star=cfg.psi_star)
        prob = min_time_state(
            cfg.system, cfg.ansatz, pair, cfg.magnus_order, cfg.cheb_order,
            eps=cfg.eps, box_radius=cfg.mt_box_radius, t_max=cfg.t_max,
        )
    rel = build_relaxation(prob, cfg.relaxation_order)
    sol = solve_sdp(relaxation_sdp(rel))
    ext = extract_minimizer(rel, sol)
    doc = {
        "lower_bound_T": sol.primal_objective,
        "relaxation_status": sol.status,
        "relaxation_order": cfg.relaxation_order,
        "eps": cfg.eps,
        "rank_ratio": ext.rank_ratio,
    }
    if ext.points:
        pt = ext.points[0]
        doc["extracted_point"] = [float(v) for v in pt]
        doc["extracted_feasible"] = bool(prob.feasible(pt, tol=1e-6))
    return doc


# ---------------------------------------------------------------------------
# Click entry points
# ---------------------------------------------------------------------------

def _common_options(fn):
    fn = click.option("--config", "config_path", required=True,
                      type=click.Path(exists=True, dir_okay=False))(fn)
    fn = click.option("--seed", type=int, default=None)(fn)
    fn = click.option("--samples", type=int, default=None)(fn)
    fn = click.option("--out", "out_dir", type=click.Path(file_okay=False),
                      default="out")(fn)
    fn = click.option("--relaxation-order", type=int, default=None)(fn)
    fn = click.option("--multistart", "multistart_k", type=int, default=None)(fn)
    return fn


def _load(config_path, seed, samples, relaxation_order, multistart_k):
    try:
        cfg = load_config(config_path)
        cfg.override(seed=seed, samples=samples,
                     relaxation_order=relaxation_order,
                     multistart_k=multistart_k)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"config error: {exc}")
    return cfg


@click.group()
@click.version_option(__version__)
def main():
    """Quantum control and Hamiltonian identification via polynomial optimization."""


@main.command()
@_common_options
def solve(config_path, seed, samples, out_dir, relaxation_order, multistart_k):
    """Solve one problem instance; writes solution.json."""
    cfg = _load(config_path, seed, samples, relaxation_order, multistart_k)
    try:
        doc = run_single(cfg, Path(out_dir))
    except ValueError as exc:
        raise click.ClickException(str(exc))
    click.echo(json.dumps({k: doc[k] for k in sorted(doc) if k != "report"}, default=str))


@main.command("bench-coherent")
@_common_options
def bench_coherent(config_path, seed, samples, out_dir, relaxation_order, multistart_k):
    """Coherent-control benchmark; writes samples.csv and summary.json."""
    cfg = _load(config_path, seed, samples, relaxation_order, multistart_k)
    if cfg.mode != "bench-coherent":
        raise click.ClickException("config mode must be 'bench-coherent'")
    summary = run_bench_coherent(cfg, Path(out_dir))
    click.echo(json.dumps(summary))


@main.command("bench-identify")
@_common_options
def bench_identify(config_path, seed, samples, out_dir, relaxation_order, multistart_k):
    """Hamiltonian-identification benchmark; writes samples.csv and summary.json."""
    cfg = _load(config_path, seed, samples, relaxation_order, multistart_k)
    if cfg.mode != "bench-identify":
        raise click.ClickException("config mode must be 'bench-identify'")
    summary = run_bench_identify(cfg, Path(out_dir))
    click.echo(json.dumps(summary))


if __name__ == "__main__":
    main()
