"""File formats: CSV and JSON encodings of problems, paths, and reports.

CSV floats are written with full round-trip precision (repr), so identical
inputs produce byte-identical files. The JSON container mirrors the CSV
triplet (X.csv, y.csv, D.csv, truth.csv) in a single document with plain
base-10 numbers.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict

import numpy as np

from .conditions import ConditionReport, IrrCurve
from .designs import ComparisonRecord
from .errors import ParseError
from .estimators import ConsistencyReport
from .iss import IssPath
from .lbi import Path, PathPoint
from .metrics import HarnessSummary
from .model import Problem, Truth


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_matrix_csv(path, M: np.ndarray):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in np.atleast_2d(M):
            writer.writerow([_fmt(v) for v in row])


def _read_matrix_csv(path) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for line_no, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise ParseError(line_no, str(exc)) from exc
    return np.array(rows)


def save_problem_csv(problem: Problem, directory):
    """Write X.csv, y.csv, D.csv and (when truth is present) truth.csv.

    truth.csv has a `beta_star,sigma` header; sigma is repeated on each row.
    """
    os.makedirs(directory, exist_ok=True)
    _write_matrix_csv(os.path.join(directory, "X.csv"), problem.X)
    _write_matrix_csv(os.path.join(directory, "y.csv"), problem.y[:, None])
    _write_matrix_csv(os.path.join(directory, "D.csv"), problem.D)
    if problem.truth is not None:
        with open(os.path.join(directory, "truth.csv"), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["beta_star", "sigma"])
            for v in problem.truth.beta_star:
                writer.writerow([_fmt(v), _fmt(problem.truth.sigma)])


def load_problem_csv(directory) -> Problem:
    X = _read_matrix_csv(os.path.join(directory, "X.csv"))
    y = _read_matrix_csv(os.path.join(directory, "y.csv")).ravel()
    D = _read_matrix_csv(os.path.join(directory, "D.csv"))
    truth = None
    truth_path = os.path.join(directory, "truth.csv")
    if os.path.exists(truth_path):
        with open(truth_path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [c.strip() for c in header] != ["beta_star", "sigma"]:
                raise ParseError(1, f"expected header 'beta_star,sigma', got {header}")
            beta, sigma = [], 1.0
            for line_no, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    beta.append(float(row[0]))
                    sigma = float(row[1])
                except (ValueError, IndexError) as exc:
                    raise ParseError(line_no, str(exc)) from exc
        truth = Truth(np.array(beta), sigma)
    return Problem(X=X, y=y, D=D, truth=truth)


def problem_to_json(problem: Problem) -> dict:
    doc = {
        "X": problem.X.tolist(),
        "y": problem.y.tolist(),
        "D": problem.D.tolist(),
    }
    if problem.truth is not None:
        doc["truth"] = {
            "beta_star": problem.truth.beta_star.tolist(),
            "sigma": problem.truth.sigma,
        }
    return doc


def problem_from_json(doc: dict) -> Problem:
    truth = None
    if "truth" in doc and doc["truth"] is not None:
        truth = Truth(
            np.asarray(doc["truth"]["beta_star"], dtype=float),
            float(doc["truth"].get("sigma", 1.0)),
        )
    return Problem(
        X=np.asarray(doc["X"], dtype=float),
        y=np.asarray(doc["y"], dtype=float),
        D=np.asarray(doc["D"], dtype=float),
        truth=truth,
    )


def save_problem_json(problem: Problem, path):
    with open(path, "w") as fh:
        json.dump(problem_to_json(problem), fh)


def load_problem_json(path) -> Problem:
    with open(path) as fh:
        return problem_from_json(json.load(fh))


# --- paths -------------------------------------------------------------------


def _path_header(p: int, m: int) -> list[str]:
    return (
        ["k", "t", "loss"]
        + [f"beta_{i}" for i in range(p)]
        + [f"gamma_{j}" for j in range(m)]
    )


def path_points_to_csv(points: list[PathPoint], path):
    """Path export: one row per recorded point, k/t/loss then beta and gamma."""
    if not points:
        raise ValueError("no points to export")
    p, m = points[0].beta.size, points[0].gamma.size
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_path_header(p, m))
        for pt in points:
            writer.writerow(
                [str(pt.k), _fmt(pt.t), _fmt(pt.loss)]
                + [_fmt(v) for v in pt.beta]
                + [_fmt(v) for v in pt.gamma]
            )


def path_to_csv(path_obj: Path, path):
    path_points_to_csv(list(path_obj.points), path)


def path_points_to_json_doc(points: list[PathPoint]) -> list[dict]:
    return [
        {
            "k": pt.k,
            "t": pt.t,
            "loss": pt.loss,
            "beta": pt.beta.tolist(),
            "gamma": pt.gamma.tolist(),
        }
        for pt in points
    ]


def path_to_json(path_obj: Path, path):
    with open(path, "w") as fh:
        json.dump(path_points_to_json_doc(list(path_obj.points)), fh)


def entry_times_to_csv(times: np.ndarray, path):
    """Sidecar of first-activation times; inf marks never-activated."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["coordinate", "entry_time"])
        for j, t in enumerate(times):
            writer.writerow([str(j), "inf" if math.isinf(t) else _fmt(t)])


def iss_segments_to_json_doc(iss_path: IssPath) -> list[dict]:
    return [
        {
            "t_start": seg.t_start,
            "t_end": None if math.isinf(seg.t_end) else seg.t_end,
            "active": [int(j) for j in seg.active],
            "signs": [float(s) for s in seg.signs],
            "gamma": seg.gamma.tolist(),
            "beta": seg.beta.tolist(),
        }
        for seg in iss_path.segments
    ]


def iss_segments_to_json(iss_path: IssPath, path):
    with open(path, "w") as fh:
        json.dump(iss_segments_to_json_doc(iss_path), fh)


# --- reports -------------------------------------------------------------------


def condition_report_to_json_doc(report: ConditionReport) -> dict:
    doc = {
        "rsc": report.rsc,
        "lambda_h": {str(nu): v for nu, v in report.lambda_h.items()},
        "irr": {str(nu): v for nu, v in report.irr.items()},
        "irr_errors": {str(nu): msg for nu, msg in report.irr_errors.items()},
        "eta_implied": {
            str(nu): max(0.0, 1.0 - v) for nu, v in report.irr.items()
        },
        "ic0": report.ic0,
        "ic1": report.ic1,
        "r_prime": report.r_prime,
    }
    if report.spectral is not None:
        doc["spectral"] = asdict(report.spectral)
    return doc


def condition_report_to_json(report: ConditionReport, path):
    with open(path, "w") as fh:
        json.dump(condition_report_to_json_doc(report), fh)


def irr_curve_to_csv(curve: IrrCurve, path):
    """Plot-ready rows (nu, irr, ic0, ic1); failed points carry the message."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["nu", "irr", "ic0", "ic1", "error"])
        ic1 = "" if curve.ic1 is None else _fmt(curve.ic1)
        for pt in curve.points:
            writer.writerow(
                [
                    _fmt(pt.nu),
                    "" if pt.irr is None else _fmt(pt.irr),
                    _fmt(curve.ic0),
                    ic1,
                    pt.error or "",
                ]
            )


def consistency_report_to_json_doc(report: ConsistencyReport) -> dict:
    doc = asdict(report)
    if math.isinf(doc["signal_threshold"]):
        doc["signal_threshold"] = None
    return doc


def harness_summary_to_csv(summary: HarnessSummary, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["design", "nu", "kappa", "alpha", "n_replicates", "mean_auc", "sd_auc"]
        )
        for row in summary.rows:
            writer.writerow(
                [
                    row.design,
                    _fmt(row.nu),
                    _fmt(row.kappa),
                    _fmt(row.mean_alpha),
                    str(row.n_replicates),
                    _fmt(row.mean_auc),
                    _fmt(row.sd_auc),
                ]
            )


def harness_replicates_to_csv(summary: HarnessSummary, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seed", "nu", "kappa", "alpha", "auc", "error"])
        for rep in summary.replicates:
            writer.writerow(
                [
                    str(rep.seed),
                    _fmt(rep.nu),
                    _fmt(rep.kappa),
                    _fmt(rep.alpha),
                    "" if rep.auc is None else _fmt(rep.auc),
                    rep.error or "",
                ]
            )


def comparisons_to_csv(records: list[ComparisonRecord], path):
    """Round-trip partner of the `i,j,y` ingestion format."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "y"])
        for rec in records:
            writer.writerow([str(rec.i), str(rec.j), _fmt(rec.y)])
