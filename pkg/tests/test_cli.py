import json

import numpy as np
import pytest

from splitlbi import serialize
from splitlbi.cli import main
from splitlbi.designs import ComparisonRecord
from splitlbi.model import Problem, Truth
from splitlbi.serialize import comparisons_to_csv, save_problem_csv


@pytest.fixture()
def problem_dir(tmp_path):
    rng = np.random.default_rng(0)
    X = rng.standard_normal((10, 5))
    beta_star = np.array([2.0, -1.0, 0.0, 0.0, 0.0])
    y = X @ beta_star + 0.2 * rng.standard_normal(10)
    prob = Problem(X=X, y=y, D=np.eye(5), truth=Truth(beta_star, 0.2))
    d = tmp_path / "problem"
    save_problem_csv(prob, d)
    return d


def test_simulate_writes_summary_and_is_deterministic(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    args = [
        "simulate", "--design", "lasso", "--nu", "2,8", "--kappa", "100",
        "--reps", "3", "--seed", "7", "--n", "18", "--p", "20",
        "--t-max", "25",
    ]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    c1 = (out1 / "summary.csv").read_bytes()
    c2 = (out2 / "summary.csv").read_bytes()
    assert c1 == c2
    lines = c1.decode().strip().splitlines()
    assert len(lines) == 3


def test_simulate_single_replicate(tmp_path):
    out = tmp_path / "one"
    code = main([
        "simulate", "--design", "fused1d", "--nu", "4", "--kappa", "80",
        "--reps", "1", "--seed", "3", "--n", "18", "--p", "20",
        "--t-max", "20", "--per-replicate", "--out", str(out),
    ])
    assert code == 0
    reps = (out / "replicates.csv").read_text().strip().splitlines()
    assert len(reps) == 2


def test_simulate_csv_json_same_values(tmp_path):
    args = [
        "simulate", "--design", "lasso", "--nu", "3", "--kappa", "60",
        "--reps", "2", "--seed", "1", "--n", "18", "--p", "20",
        "--t-max", "20",
    ]
    out_c = tmp_path / "c"
    out_j = tmp_path / "j"
    assert main(args + ["--out", str(out_c), "--format", "csv"]) == 0
    assert main(args + ["--out", str(out_j), "--format", "json"]) == 0
    csv_line = (out_c / "summary.csv").read_text().strip().splitlines()[1].split(",")
    doc = json.loads((out_j / "summary.json").read_text())[0]
    assert abs(float(csv_line[5]) - doc["mean_auc"]) < 1e-12
    assert abs(float(csv_line[6]) - doc["sd_auc"]) < 1e-12


def test_simulate_config_error_exit_code(tmp_path):
    assert main([
        "simulate", "--design", "mystery", "--nu", "1",
        "--out", str(tmp_path),
    ]) == 2


def test_path_lbi_and_entry_sidecar(problem_dir, tmp_path):
    out = tmp_path / "path"
    code = main([
        "path", "--problem-dir", str(problem_dir), "--nu", "1",
        "--kappa", "50", "--k-max", "400", "--stride", "20",
        "--out", str(out),
    ])
    assert code == 0
    lines = (out / "path.csv").read_text().strip().splitlines()
    assert len(lines) == 22  # header + k=0 + every 20th through 400
    entries = (out / "entry_times.csv").read_text().strip().splitlines()
    assert len(entries) == 6


def test_path_json_format(problem_dir, tmp_path):
    out = tmp_path / "pj"
    assert main([
        "path", "--problem-dir", str(problem_dir), "--nu", "1",
        "--kappa", "50", "--k-max", "100", "--stride", "10",
        "--format", "json", "--out", str(out),
    ]) == 0
    docs = json.loads((out / "path.json").read_text())
    assert docs[0]["k"] == 0


def test_path_iss_solver(problem_dir, tmp_path):
    out = tmp_path / "iss"
    code = main([
        "path", "--problem-dir", str(problem_dir), "--solver", "iss",
        "--nu", "0.5", "--t-max", "20", "--samples", "50",
        "--out", str(out),
    ])
    assert code == 0
    docs = json.loads((out / "segments.json").read_text())
    assert docs[0]["t_start"] == 0.0
    lines = (out / "path.csv").read_text().strip().splitlines()
    assert len(lines) == 51


def test_path_missing_problem(tmp_path):
    assert main([
        "path", "--problem-dir", str(tmp_path / "nope"), "--nu", "1",
        "--out", str(tmp_path),
    ]) == 2


def test_diagnose(problem_dir, tmp_path):
    out = tmp_path / "diag"
    code = main([
        "diagnose", "--problem-dir", str(problem_dir), "--nu", "0.5,5",
        "--out", str(out),
    ])
    assert code == 0
    doc = json.loads((out / "conditions.json").read_text())
    assert "irr" in doc and "ic0" in doc
    lines = (out / "irr_curve.csv").read_text().strip().splitlines()
    assert lines[0] == "nu,irr,ic0,ic1,error"


def test_diagnose_needs_support(tmp_path):
    rng = np.random.default_rng(1)
    prob = Problem(X=rng.standard_normal((6, 3)), y=rng.standard_normal(6),
                   D=np.eye(3))
    d = tmp_path / "nt"
    save_problem_csv(prob, d)
    assert main(["diagnose", "--problem-dir", str(d), "--nu", "1",
                 "--out", str(tmp_path)]) == 2
    assert main(["diagnose", "--problem-dir", str(d), "--nu", "1",
                 "--support", "0,2", "--out", str(tmp_path / "ok")]) == 0


def synthetic_comparisons(tmp_path, strengths, games=60, seed=0, noise=0.5):
    rng = np.random.default_rng(seed)
    p = len(strengths)
    records = []
    for _ in range(games):
        i, j = rng.choice(p, size=2, replace=False)
        y = strengths[i] - strengths[j] + noise * rng.standard_normal()
        records.append(ComparisonRecord(int(i) + 1, int(j) + 1, float(y)))
    f = tmp_path / "games.csv"
    comparisons_to_csv(records, f)
    return f


def test_rank_two_items(tmp_path):
    f = tmp_path / "two.csv"
    f.write_text("i,j,y\n1,2,3.0\n2,1,-3.0\n")
    out = tmp_path / "rank"
    assert main(["rank", "--comparisons", str(f), "--nu", "1",
                 "--kappa", "100", "--t", "6", "--out", str(out)]) == 0
    doc = json.loads((out / "groups.json").read_text())
    assert len(doc["groups"]) == 2
    assert doc["groups"][0] == [0]  # item 1 stronger


def test_rank_t_zero_single_group(tmp_path):
    f = tmp_path / "two.csv"
    f.write_text("i,j,y\n1,2,3.0\n")
    out = tmp_path / "rank0"
    assert main(["rank", "--comparisons", str(f), "--t", "0",
                 "--out", str(out)]) == 0
    doc = json.loads((out / "groups.json").read_text())
    assert doc["groups"] == [[0, 1]]
    assert doc["edges"] == []


def test_rank_recovers_planted_levels(tmp_path):
    strengths = np.repeat([6.0, 3.0, 0.0], 4)  # 12 teams, 3 levels
    f = synthetic_comparisons(tmp_path, strengths, games=220, seed=5, noise=0.3)
    out = tmp_path / "planted"
    assert main(["rank", "--comparisons", str(f), "--nu", "1",
                 "--kappa", "100", "--t", "20.0", "--group-tol", "1e-6",
                 "--out", str(out)]) == 0
    doc = json.loads((out / "groups.json").read_text())
    by_value = [sorted(g) for g in doc["groups"]]
    assert by_value == [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 10, 11]]


def test_denoise_constant_image(tmp_path):
    img = np.full((4, 4), 3.0)
    ch = tmp_path / "c0.csv"
    serialize._write_matrix_csv(ch, img)
    out = tmp_path / "den"
    assert main(["denoise", "--channel", str(ch), "--nu", "8",
                 "--kappa", "20", "--t", "0.5,2", "--out", str(out)]) == 0
    rec = serialize._read_matrix_csv(out / "channel0_t2.csv")
    assert rec.shape == (4, 4)
    assert np.abs(rec - rec.mean()).max() < 1e-8  # constant stays constant


def test_denoise_shape_mismatch(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    serialize._write_matrix_csv(a, np.zeros((3, 3)))
    serialize._write_matrix_csv(b, np.zeros((2, 3)))
    assert main(["denoise", "--channel", str(a), "--channel", str(b),
                 "--nu", "8", "--kappa", "20", "--t", "1",
                 "--out", str(tmp_path)]) == 2


def test_denoise_two_pixel_analytic(tmp_path):
    # 1x2 image: single difference row; the two-pixel fused path has a
    # closed-form early phase where gamma stays zero and beta drifts toward y
    y = np.array([[4.0, 0.0]])
    ch = tmp_path / "two_pixel.csv"
    serialize._write_matrix_csv(ch, y)
    out = tmp_path / "tp"
    assert main(["denoise", "--channel", str(ch), "--nu", "2",
                 "--kappa", "10", "--t", "0.2", "--out", str(out)]) == 0
    rec = serialize._read_matrix_csv(out / "channel0_t0.2.csv").ravel()
    assert rec[0] > rec[1]
    assert 0 < rec[0] < 4.0
