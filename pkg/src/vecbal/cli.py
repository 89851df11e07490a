"""Command-line surface: instance/body generation, pipeline runs, statistical
verification and benchmarking.

Commands
    gen-komlos, gen-beck-fiala   write instance JSON files
    gen-cube-body                write a cube body of a target Gaussian measure
    solve-komlos                 run the PSD constructor on an instance
    walk                         sample colorings, optionally emit residual CSV
    recenter                     run the recentering procedure against a body
    color-asym                   asymmetric pipeline (walk as symmetric strategy)
    color-body-centric           deterministic body-centric pipeline
    verify-subgaussian           estimate the subgaussian parameter of samples
    bench                        trial matrix -> CSV of discrepancy statistics

Every command writes a JSON run report (schema_version, command, config,
instance hash, outputs, statistics, seed); rerunning with the same config and
seed reproduces outputs bit-exactly.  Exit codes: 0 success, 1 precondition
or contract errors, 2 exhausted statistical budgets; errors are emitted as
JSON on stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys as _sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy.special import ndtri

from . import __version__
from .bodies import cube, load_body, save_body
from .errors import BudgetError, PreconditionError, VecbalError
from .komlos import solve_komlos
from .pipelines import (
    AsymPipelineConfig,
    BodyCentricConfig,
    color_asymmetric,
    color_body_centric,
)
from .recenter import recenter
from .seeding import child_seed, rng_from
from .subgauss import estimate_subgaussian
from .walk import WalkStrategy, sample_coloring, walk_params
from .zonotope import VectorSystem, load_instance, save_instance

SCHEMA_VERSION = 1

BENCH_COLUMNS = [
    "algorithm", "family", "n", "m", "trials",
    "mean_linf", "median_linf", "max_linf",
    "mean_l2", "median_l2", "max_l2",
    "baseline_best_linf_mean", "restarts_mean", "seconds_total",
]


# ---------------------------------------------------------------------------
# generators


def gen_komlos(n: int, m: int, norm_bound: float, seed: int) -> VectorSystem:
    """Uniform-on-sphere columns scaled to norm_bound, zero certificate."""
    if n < 1 or m < 1 or norm_bound <= 0:
        raise PreconditionError("need n, m >= 1 and a positive norm bound")
    rng = rng_from(child_seed(seed, 1))
    V = rng.standard_normal((m, n))
    V /= np.linalg.norm(V, axis=0)
    V *= norm_bound
    return VectorSystem(V, np.zeros(n), norm_bound)


def gen_beck_fiala(n: int, m: int, t_sparsity: int, seed: int) -> VectorSystem:
    """Columns with exactly t_sparsity entries 1/sqrt(t), so unit norm."""
    if t_sparsity < 1 or t_sparsity > m:
        raise PreconditionError("need 1 <= t_sparsity <= m")
    rng = rng_from(child_seed(seed, 2))
    V = np.zeros((m, n))
    val = 1.0 / math.sqrt(t_sparsity)
    for i in range(n):
        rows = rng.choice(m, size=t_sparsity, replace=False)
        V[rows, i] = val
    return VectorSystem(V, np.zeros(n), 1.0 + 1e-12)


def gen_cube_body(dim: int, target_measure: float):
    """Cube [-a, a]^dim whose product of axis masses equals target_measure."""
    if not (0.0 < target_measure < 1.0):
        raise PreconditionError("target measure must be in (0, 1)")
    per_axis = target_measure ** (1.0 / dim)
    arg = (1.0 + per_axis) / 2.0
    if arg >= 1.0 - 1e-16:
        raise PreconditionError("target measure too close to 1 for this dimension")
    a = float(ndtri(arg))
    if not math.isfinite(a) or a > 40.0:
        raise PreconditionError("cube half-width diverged; lower the target measure")
    return cube(a, dim)


# ---------------------------------------------------------------------------
# reports


def _hash_file(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def write_report(path, command: str, config: dict, outputs: dict, statistics: dict, seed) -> dict:
    report = {
        "schema_version": SCHEMA_VERSION,
        "vecbal_version": __version__,
        "command": command,
        "config": config,
        "outputs": outputs,
        "statistics": statistics,
        "seed": seed,
    }
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, sort_keys=True, indent=1)
            fh.write("\n")
    return report


def _residual_stats(residuals: np.ndarray) -> dict:
    linf = np.max(np.abs(residuals), axis=1) if residuals.size else np.zeros(0)
    l2 = np.linalg.norm(residuals, axis=1) if residuals.size else np.zeros(0)
    return {
        "mean_linf": float(np.mean(linf)) if linf.size else 0.0,
        "median_linf": float(np.median(linf)) if linf.size else 0.0,
        "max_linf": float(np.max(linf)) if linf.size else 0.0,
        "mean_l2": float(np.mean(l2)) if l2.size else 0.0,
        "median_l2": float(np.median(l2)) if l2.size else 0.0,
        "max_l2": float(np.max(l2)) if l2.size else 0.0,
    }


# ---------------------------------------------------------------------------
# command implementations


def _cmd_gen_komlos(args) -> int:
    sysm = gen_komlos(args.n, args.m, args.norm_bound, args.seed)
    save_instance(sysm, args.out)
    print(f"wrote {args.out} (n={args.n}, m={args.m}, norm={args.norm_bound})")
    return 0


def _cmd_gen_beck_fiala(args) -> int:
    sysm = gen_beck_fiala(args.n, args.m, args.t_sparsity, args.seed)
    save_instance(sysm, args.out)
    print(f"wrote {args.out} (n={args.n}, m={args.m}, t={args.t_sparsity})")
    return 0


def _cmd_gen_cube_body(args) -> int:
    body = gen_cube_body(args.dim, args.target_measure)
    save_body(body, args.out)
    print(f"wrote {args.out} (dim={args.dim}, scale={body.doc['scale']:.6g})")
    return 0


def _cmd_solve_komlos(args) -> int:
    sysm = load_instance(args.instance)
    alpha = np.full(sysm.n, args.alpha)
    t0 = time.perf_counter()
    sol = solve_komlos(sysm.V, alpha)
    wall = time.perf_counter() - t0
    outputs = {
        "eig_max_VXVt": sol.eig_max_VXVt,
        "lambda_min_X": float(np.linalg.eigvalsh(sol.X)[0]) if sysm.n else 0.0,
        "diag_error": float(np.max(np.abs(np.diag(sol.X) - alpha), initial=0.0)),
        "recursion_depth": sol.depth,
    }
    write_report(args.out, "solve-komlos",
                 {"instance": str(args.instance), "alpha": args.alpha},
                 outputs, {"wall_seconds": wall, "instance_hash": _hash_file(args.instance)},
                 args.seed)
    print(f"eig_max(V X V^T) = {sol.eig_max_VXVt:.12f}, depth = {sol.depth}")
    return 0


def _run_walk_trial(payload):
    sysm, mode, seed, trial = payload
    params = walk_params(sysm.n, mode, seed=child_seed(seed, trial))
    trace = sample_coloring(sysm, params)
    return trace.chi_final, trace.residual, trace.restarts


def _cmd_walk(args) -> int:
    sysm = load_instance(args.instance)
    t0 = time.perf_counter()
    chis, residuals, restarts = [], [], []
    for trial in range(args.trials):
        chi, res, rs = _run_walk_trial((sysm, args.mode, args.seed, trial))
        chis.append(chi)
        residuals.append(res)
        restarts.append(rs)
    wall = time.perf_counter() - t0
    residuals = np.asarray(residuals)
    if args.emit_samples:
        np.savetxt(args.emit_samples, residuals, delimiter=",", fmt="%.17g")
    outputs = {
        "coloring_first": [float(c) for c in chis[0]],
        **_residual_stats(residuals),
    }
    stats = {
        "trials": args.trials,
        "restarts_mean": float(np.mean(restarts)),
        "wall_seconds": wall,
        "instance_hash": _hash_file(args.instance),
    }
    write_report(args.out, "walk",
                 {"instance": str(args.instance), "mode": args.mode, "trials": args.trials},
                 outputs, stats, args.seed)
    print(f"{args.trials} colorings, mean linf residual {outputs['mean_linf']:.4f}, "
          f"mean restarts {stats['restarts_mean']:.2f}")
    return 0


def _cmd_recenter(args) -> int:
    sysm = load_instance(args.instance)
    body = load_body(args.body)
    t0 = time.perf_counter()
    rc = recenter(body, sysm, args.delta, args.epsilon, child_seed(args.seed),
                  beta_paouris=args.beta_paouris, measure_samples=args.samples)
    wall = time.perf_counter() - t0
    outputs = {
        "status": rc.status,
        "fail_reason": rc.fail_reason,
        "q": [float(v) for v in rc.q],
        "iterations": rc.iterations,
        "dim_final": rc.face.dim,
        "barycenter_norm": rc.barycenter_norm if math.isfinite(rc.barycenter_norm) else None,
        "measure_before": rc.measure_before.p_hat,
        "measure_before_ci": rc.measure_before.ci_halfwidth,
        "measure_after": rc.measure_after.p_hat if rc.measure_after else None,
        "measure_after_ci": rc.measure_after.ci_halfwidth if rc.measure_after else None,
        "descents": rc.descents,
    }
    write_report(args.out, "recenter",
                 {"instance": str(args.instance), "body": str(args.body),
                  "delta": args.delta, "epsilon": args.epsilon,
                  "beta_paouris": args.beta_paouris},
                 outputs, {"wall_seconds": wall, "instance_hash": _hash_file(args.instance)},
                 args.seed)
    print(f"status {rc.status}, iterations {rc.iterations}, dim {rc.face.dim}")
    return 0


def _cmd_color_asym(args) -> int:
    sysm = load_instance(args.instance)
    body = load_body(args.body)
    strategy = WalkStrategy(mode=args.mode)
    cfg = AsymPipelineConfig(seed=args.seed, beta_paouris=args.beta_paouris,
                             measure_samples=args.samples)
    t0 = time.perf_counter()
    chi, report = color_asymmetric(body, sysm, strategy, cfg)
    wall = time.perf_counter() - t0
    outputs = {
        "coloring": [float(c) for c in chi],
        "point": [float(v) for v in report.point],
        "residual_l2": report.residual_l2,
        "residual_linf": report.residual_linf,
        "attempts": report.attempts,
        "recenter_fails": report.recenter_fails,
        "strategy_rejects": report.strategy_rejects,
        "measure_estimate": report.measure_estimate.p_hat,
    }
    write_report(args.out, "color-asym",
                 {"instance": str(args.instance), "body": str(args.body),
                  "mode": args.mode, "beta_paouris": args.beta_paouris},
                 outputs, {"wall_seconds": wall, "instance_hash": _hash_file(args.instance)},
                 args.seed)
    print(f"coloring found in {report.attempts} attempt(s), linf {report.residual_linf:.4f}")
    return 0


def _cmd_color_body_centric(args) -> int:
    sysm = load_instance(args.instance)
    body = load_body(args.body)
    cfg = BodyCentricConfig(n=sysm.n, seed=args.seed, beta_paouris=args.beta_paouris,
                            measure_samples=args.samples)
    t0 = time.perf_counter()
    chi, trace = color_body_centric(body, sysm, cfg)
    wall = time.perf_counter() - t0
    outputs = {
        "coloring": [float(c) for c in chi],
        "point": [float(v) for v in trace.point],
        "residual_l2": trace.residual_l2,
        "residual_linf": trace.residual_linf,
        "attempts": trace.attempts,
        "descents": trace.descents,
        "dims": [int(d) for d in trace.dims],
        "barycenter_norms": [float(b) for b in trace.barycenter_norms],
    }
    write_report(args.out, "color-body-centric",
                 {"instance": str(args.instance), "body": str(args.body),
                  "beta_paouris": args.beta_paouris},
                 outputs, {"wall_seconds": wall, "instance_hash": _hash_file(args.instance)},
                 args.seed)
    print(f"coloring found in {trace.attempts} attempt(s), {trace.descents} descents")
    return 0


def _cmd_verify_subgaussian(args) -> int:
    samples = np.loadtxt(args.samples, delimiter=",", ndmin=2)
    t0 = time.perf_counter()
    report = estimate_subgaussian(samples, n_directions=args.directions, seed=args.seed)
    wall = time.perf_counter() - t0
    outputs = {
        "s_hat": report.s_hat,
        "worst_direction": [float(v) for v in report.worst_direction],
        "worst_threshold": report.worst_threshold,
        "laplace_beta": report.laplace_beta,
        "directions": report.directions,
        "samples": report.samples,
    }
    write_report(args.out, "verify-subgaussian",
                 {"samples": str(args.samples), "directions": args.directions},
                 outputs, {"wall_seconds": wall}, args.seed)
    print(f"s_hat = {report.s_hat:.4f} over {report.directions} directions, "
          f"{report.samples} samples")
    return 0


def _bench_trial(payload):
    family, n, m, seed, trial, mode = payload
    if family == "komlos":
        sysm = gen_komlos(n, m, 1.0, seed + 1000 * trial)
    else:
        sysm = gen_beck_fiala(n, m, max(1, min(3, m)), seed + 1000 * trial)
    params = walk_params(n, mode, seed=child_seed(seed, trial))
    trace = sample_coloring(sysm, params)
    rng = rng_from(child_seed(seed, trial, 7))
    best = math.inf
    for _ in range(64):
        signs = rng.integers(0, 2, size=n) * 2.0 - 1.0
        best = min(best, float(np.max(np.abs(sysm.V @ signs - sysm.t), initial=0.0)))
    linf = float(np.max(np.abs(trace.residual), initial=0.0))
    l2 = float(np.linalg.norm(trace.residual))
    return trial, linf, l2, best, trace.restarts


def _cmd_bench(args) -> int:
    rows = []
    families = args.families.split(",")
    sizes = [int(s) for s in args.sizes.split(",")]
    for family in families:
        for n in sizes:
            m = n
            payloads = [(family, n, m, args.seed, trial, args.mode)
                        for trial in range(args.trials)]
            t0 = time.perf_counter()
            if args.jobs > 1:
                with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                    results = list(pool.map(_bench_trial, payloads))
            else:
                results = [_bench_trial(p) for p in payloads]
            wall = time.perf_counter() - t0
            results.sort(key=lambda r: r[0])
            linf = np.array([r[1] for r in results])
            l2 = np.array([r[2] for r in results])
            base = np.array([r[3] for r in results])
            restarts = np.array([r[4] for r in results])
            rows.append([
                "walk", family, n, m, args.trials,
                f"{linf.mean():.17g}", f"{np.median(linf):.17g}", f"{linf.max():.17g}",
                f"{l2.mean():.17g}", f"{np.median(l2):.17g}", f"{l2.max():.17g}",
                f"{base.mean():.17g}", f"{restarts.mean():.17g}", f"{wall:.6g}",
            ])
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(",".join(BENCH_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vecbal", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_default="report.json"):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=out_default)

    sp = sub.add_parser("gen-komlos", help="random unit-sphere instance")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--norm-bound", type=float, default=1.0)
    common(sp, "instance.json")
    sp.set_defaults(func=_cmd_gen_komlos)

    sp = sub.add_parser("gen-beck-fiala", help="sparse set-system instance")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--t-sparsity", type=int, required=True)
    common(sp, "instance.json")
    sp.set_defaults(func=_cmd_gen_beck_fiala)

    sp = sub.add_parser("gen-cube-body", help="cube of a target Gaussian measure")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--target-measure", type=float, required=True)
    common(sp, "body.json")
    sp.set_defaults(func=_cmd_gen_cube_body)

    sp = sub.add_parser("solve-komlos", help="diagonal-constrained PSD constructor")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--alpha", type=float, default=1.0)
    common(sp)
    sp.set_defaults(func=_cmd_solve_komlos)

    sp = sub.add_parser("walk", help="sample random-walk colorings")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--mode", choices=["paper", "practical"], default="practical")
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--emit-samples", default=None, help="CSV path for residual rows")
    common(sp)
    sp.set_defaults(func=_cmd_walk)

    sp = sub.add_parser("recenter", help="recentering procedure")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--body", required=True)
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--epsilon", type=float, default=0.25)
    sp.add_argument("--beta-paouris", type=float, default=1.0)
    sp.add_argument("--samples", type=int, default=200_000)
    common(sp)
    sp.set_defaults(func=_cmd_recenter)

    sp = sub.add_parser("color-asym", help="asymmetric-body pipeline")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--body", required=True)
    sp.add_argument("--mode", choices=["paper", "practical"], default="practical")
    sp.add_argument("--beta-paouris", type=float, default=0.1)
    sp.add_argument("--samples", type=int, default=100_000)
    common(sp)
    sp.set_defaults(func=_cmd_color_asym)

    sp = sub.add_parser("color-body-centric", help="deterministic body-centric pipeline")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--body", required=True)
    sp.add_argument("--beta-paouris", type=float, default=0.1)
    sp.add_argument("--samples", type=int, default=100_000)
    common(sp)
    sp.set_defaults(func=_cmd_color_body_centric)

    sp = sub.add_parser("verify-subgaussian", help="tail-based subgaussian estimate")
    sp.add_argument("--samples", required=True, help="CSV of sample rows")
    sp.add_argument("--directions", type=int, default=256)
    common(sp)
    sp.set_defaults(func=_cmd_verify_subgaussian)

    sp = sub.add_parser("bench", help="trial matrix -> discrepancy CSV")
    sp.add_argument("--families", default="komlos,beck-fiala")
    sp.add_argument("--sizes", default="8,16")
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--mode", choices=["paper", "practical"], default="practical")
    sp.add_argument("--jobs", type=int, default=1)
    common(sp, "bench.csv")
    sp.set_defaults(func=_cmd_bench)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as exc:
        _sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2
    except (VecbalError, OSError, json.JSONDecodeError, KeyError) as exc:
        _sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
