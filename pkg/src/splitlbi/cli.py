"""Command-line interface.

Subcommands: simulate (replicate AUC tables), path (run one problem and dump
the path), diagnose (condition report and irr curve), rank (pairwise
comparisons to grouped partial order), denoise (grid-gradient image paths).
Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict

import numpy as np

from . import conditions, designs, estimators, iss, lbi, metrics, serialize
from .errors import SplitLbiError
from .model import Hyperparams, Problem

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(Exception):
    pass


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad numeric list {text!r}: {exc}") from exc


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("SPLIT_LBI_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"bad SPLIT_LBI_THREADS value {env!r}") from exc
    return 1


def _load_problem(args) -> Problem:
    if args.problem_json:
        if not os.path.exists(args.problem_json):
            raise ConfigError(f"no such file: {args.problem_json}")
        return serialize.load_problem_json(args.problem_json)
    if args.problem_dir:
        for name in ("X.csv", "y.csv", "D.csv"):
            if not os.path.exists(os.path.join(args.problem_dir, name)):
                raise ConfigError(f"missing {name} in {args.problem_dir}")
        return serialize.load_problem_csv(args.problem_dir)
    raise ConfigError("provide --problem-dir or --problem-json")


def _out(args, name: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def cmd_simulate(args) -> int:
    if args.design not in ("lasso", "fused1d"):
        raise ConfigError(f"unknown design {args.design!r}")
    nus = _parse_float_list(args.nu)
    if not nus or args.reps < 1:
        raise ConfigError("need at least one nu and one replicate")
    spec = metrics.SimulationSpec(design=args.design, n=args.n, p=args.p)
    seeds = [int(s) for s in np.random.SeedSequence(args.seed).generate_state(args.reps, dtype=np.uint64)]
    hypers = [Hyperparams(nu=nu, kappa=args.kappa) for nu in nus]
    summary = metrics.replicate_harness(
        spec, seeds, hypers, t_max=args.t_max, threads=_threads(args)
    )
    if args.format == "json":
        with open(_out(args, "summary.json"), "w") as fh:
            json.dump([asdict(row) for row in summary.rows], fh)
    else:
        serialize.harness_summary_to_csv(summary, _out(args, "summary.csv"))
    if args.per_replicate:
        serialize.harness_replicates_to_csv(summary, _out(args, "replicates.csv"))
    print(f"design={args.design} kappa={args.kappa} reps={args.reps}")
    for row in summary.rows:
        line = (
            f"  nu={row.nu:g}: mean AUC = {row.mean_auc:.4f} "
            f"(sd {row.sd_auc:.4f}, n={row.n_replicates})"
        )
        if row.failed_seeds:
            line += f"  [{len(row.failed_seeds)} failed]"
        print(line)
    return EXIT_OK


def cmd_path(args) -> int:
    problem = _load_problem(args)
    nus = _parse_float_list(args.nu)
    if len(nus) != 1:
        raise ConfigError("path runs take exactly one nu")
    nu = nus[0]
    if args.solver == "iss":
        path = iss.solve_path(problem, nu, t_max=args.t_max)
        serialize.iss_segments_to_json(path, _out(args, "segments.json"))
        horizon = path.segments[-1].t_start if np.isinf(path.t_end) else path.t_end
        grid = np.linspace(0.0, horizon, args.samples)
        points = iss.sample_path(path, grid)
        entries = metrics.entry_times(path).times
    else:
        hyper = Hyperparams(nu=nu, kappa=args.kappa, alpha=args.alpha)
        run_path = lbi.run(problem, hyper, k_max=args.k_max, record_stride=args.stride)
        points = list(run_path.points)
        entries = metrics.entry_times(run_path).times
    if args.format == "json":
        with open(_out(args, "path.json"), "w") as fh:
            json.dump(serialize.path_points_to_json_doc(points), fh)
    else:
        serialize.path_points_to_csv(points, _out(args, "path.csv"))
    serialize.entry_times_to_csv(entries, _out(args, "entry_times.csv"))
    print(f"wrote {len(points)} path points to {args.out}")
    return EXIT_OK


def cmd_diagnose(args) -> int:
    problem = _load_problem(args)
    if args.support:
        S = [int(j) for j in args.support.split(",") if j.strip()]
    elif problem.truth is not None:
        S = problem.support().tolist()
    else:
        raise ConfigError("provide --support or a problem with ground truth")
    signs = None
    if args.signs:
        signs = np.array(_parse_float_list(args.signs))
    nus = _parse_float_list(args.nu)
    report = conditions.condition_report(problem, S, nus, sign_pattern=signs)
    serialize.condition_report_to_json(report, _out(args, "conditions.json"))
    curve = conditions.irr_curve(problem, S, np.array(sorted(nus)), sign_pattern=signs)
    serialize.irr_curve_to_csv(curve, _out(args, "irr_curve.csv"))
    shown = {nu: f"{v:.4f}" for nu, v in report.irr.items()}
    print(f"rsc={report.rsc:.4g} ic0={report.ic0:.4f} ic1={report.ic1} irr={shown}")
    if report.irr_errors:
        print(f"  irr failures: {report.irr_errors}")
    return EXIT_OK


def cmd_rank(args) -> int:
    if not os.path.exists(args.comparisons):
        raise ConfigError(f"no such file: {args.comparisons}")
    records = designs.ingest_comparisons_csv(args.comparisons)
    if not records:
        raise ConfigError("comparison file has no records")
    p = args.items or max(max(r.i, r.j) for r in records)
    X, y, D = designs.build_pairwise(records, p, d_from_x_scaled=True)
    problem = Problem(X=X, y=y, D=D)

    # warn on a disconnected comparison graph: strengths are only relative
    # within a connected component
    comp = _components(records, p)
    if len(comp) > 1:
        print(f"warning: comparison graph has {len(comp)} components: {comp}",
              file=sys.stderr)

    hyper = Hyperparams(nu=args.nu, kappa=args.kappa).resolved(problem)
    if args.auto_stop:
        if args.eta is None or args.sigma is None:
            raise ConfigError("--auto-stop needs --eta and --sigma")
        rule = estimators.stopping_rule(
            args.eta, args.sigma, problem.spectral_bounds(), problem.n, problem.m,
            hyper.alpha,
        )
        k_stop = max(rule.k_bar, 0)
    elif args.t is not None:
        k_stop = int(round(args.t / hyper.alpha))
    else:
        k_stop = args.k if args.k is not None else int(round(5.0 / hyper.alpha))
    path = lbi.run(problem, hyper, k_max=max(k_stop, 0),
                   record_stride=max(k_stop, 1))
    final = path.points[-1]
    support = np.flatnonzero(final.gamma)
    beta_proj = estimators.projection_estimator(problem, final.beta, support)
    groups, edges = designs.extract_groups(beta_proj, tol=args.group_tol)
    doc = {
        "k": final.k,
        "t": final.t,
        "groups": groups,
        "edges": edges,
        "beta_projected": beta_proj.tolist(),
    }
    with open(_out(args, "groups.json"), "w") as fh:
        json.dump(doc, fh)
    for rank_idx, grp in enumerate(groups, start=1):
        vals = ", ".join(str(i + 1) for i in grp)
        print(f"group {rank_idx}: items [{vals}]  value={beta_proj[grp[0]]:.4f}")
    return EXIT_OK


def _components(records, p: int) -> list[list[int]]:
    parent = list(range(p))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for rec in records:
        ra, rb = find(rec.i - 1), find(rec.j - 1)
        if ra != rb:
            parent[ra] = rb
    comps: dict[int, list[int]] = {}
    for v in range(p):
        comps.setdefault(find(v), []).append(v + 1)
    return sorted(comps.values())


def cmd_denoise(args) -> int:
    channels = []
    for path in args.channel:
        if not os.path.exists(path):
            raise ConfigError(f"no such file: {path}")
        channels.append(serialize._read_matrix_csv(path))
    shapes = {c.shape for c in channels}
    if len(shapes) != 1:
        raise ConfigError(f"channel shapes differ: {sorted(shapes)}")
    h, w = channels[0].shape
    nc = len(channels)
    y = np.concatenate([c.ravel() for c in channels])
    D = designs.build_grid_gradient(h, w, channels=nc)
    problem = Problem(X=np.eye(y.size), y=y, D=D)
    hyper = Hyperparams(nu=args.nu, kappa=args.kappa).resolved(problem)
    t_values = sorted(_parse_float_list(args.t))
    if not t_values:
        raise ConfigError("need at least one snapshot time")
    k_values = [int(round(t / hyper.alpha)) for t in t_values]
    path = lbi.run(problem, hyper, k_max=max(k_values), record_stride=1)
    recorded = {pt.k: pt for pt in path.points}
    for t, k in zip(t_values, k_values):
        pt = recorded[k]
        for c in range(nc):
            block = pt.beta[c * h * w : (c + 1) * h * w].reshape(h, w)
            serialize._write_matrix_csv(
                _out(args, f"channel{c}_t{t:g}.csv"), block
            )
    print(f"wrote {len(t_values)} snapshot(s) x {nc} channel(s) to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="split-lbi",
        description="Sparse regularization paths under linear transforms",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: SPLIT_LBI_THREADS or 1)")

    sp = sub.add_parser("simulate", help="replicate AUC table for a named design")
    sp.add_argument("--design", required=True, help="lasso or fused1d")
    sp.add_argument("--nu", required=True, help="comma-separated nu values")
    sp.add_argument("--kappa", type=float, default=200.0)
    sp.add_argument("--reps", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--n", type=int, default=50)
    sp.add_argument("--p", type=int, default=50)
    sp.add_argument("--t-max", type=float, default=50.0)
    sp.add_argument("--per-replicate", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("path", help="run one problem and export the path")
    sp.add_argument("--problem-dir", help="directory with X.csv, y.csv, D.csv")
    sp.add_argument("--problem-json", help="single-file JSON problem")
    sp.add_argument("--solver", choices=("lbi", "iss"), default="lbi")
    sp.add_argument("--nu", required=True)
    sp.add_argument("--kappa", type=float, default=200.0)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--k-max", type=int, default=1000)
    sp.add_argument("--stride", type=int, default=1)
    sp.add_argument("--t-max", type=float, default=50.0)
    sp.add_argument("--samples", type=int, default=200,
                    help="sample count for the iss path export")
    common(sp)
    sp.set_defaults(func=cmd_path)

    sp = sub.add_parser("diagnose", help="condition report and irr curve")
    sp.add_argument("--problem-dir")
    sp.add_argument("--problem-json")
    sp.add_argument("--support", help="comma-separated transform row indices (0-based)")
    sp.add_argument("--signs", help="comma-separated +-1 pattern for ic1")
    sp.add_argument("--nu", required=True, help="comma-separated nu grid")
    common(sp)
    sp.set_defaults(func=cmd_diagnose)

    sp = sub.add_parser("rank", help="group items from pairwise comparisons")
    sp.add_argument("--comparisons", required=True, help="CSV with header i,j,y")
    sp.add_argument("--items", type=int, default=None,
                    help="item count (default: max index seen)")
    sp.add_argument("--nu", type=float, default=1.0)
    sp.add_argument("--kappa", type=float, default=100.0)
    sp.add_argument("--t", type=float, default=None, help="path time to report")
    sp.add_argument("--k", type=int, default=None, help="iteration to report")
    sp.add_argument("--auto-stop", action="store_true",
                    help="use the early-stopping rule (needs --eta, --sigma)")
    sp.add_argument("--eta", type=float, default=None)
    sp.add_argument("--sigma", type=float, default=None)
    sp.add_argument("--group-tol", type=float, default=1e-9)
    common(sp)
    sp.set_defaults(func=cmd_rank)

    sp = sub.add_parser("denoise", help="grid-gradient path snapshots of an image")
    sp.add_argument("--channel", action="append", required=True,
                    help="CSV matrix per channel (repeatable)")
    sp.add_argument("--nu", type=float, default=180.0)
    sp.add_argument("--kappa", type=float, default=100.0)
    sp.add_argument("--t", required=True, help="comma-separated snapshot times")
    common(sp)
    sp.set_defaults(func=cmd_denoise)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SplitLbiError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
