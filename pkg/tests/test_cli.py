import json
import math

import numpy as np
import pytest

from inclined.cli import main
from inclined.serialize import vectors_to_obj, write_json

RHO_DEFAULT_BOUND = 19 / 20


def _write_vectors(path, vectors):
    write_json(path, vectors_to_obj(vectors))


@pytest.fixture
def basis2(tmp_path):
    path = tmp_path / "basis2.json"
    _write_vectors(path, list(np.eye(2, dtype=complex)))
    return str(path)


@pytest.fixture
def toy_stage_file(tmp_path):
    path = tmp_path / "toy2.json"
    write_json(path, {"regime": "toy", "levels": [{"m": 1, "d": 4}, {"m": 2, "d": 4}]})
    return str(path)


# ------------------------------------------------------------- params

def test_params_reports_minimum_and_trace(capsys):
    assert main(["params", "--m", "1"]) == 0
    out = json.loads(capsys.readouterr().out.splitlines()[0])
    assert out["d_min"] == 347
    trace = out["trace"]
    assert trace["last_fail"]["d"] == 346
    assert trace["first_success"]["d"] == 347
    assert int(trace["last_fail"]["lhs"]) >= int(trace["last_fail"]["rhs"])
    assert int(trace["first_success"]["lhs"]) < int(trace["first_success"]["rhs"])


def test_params_rejects_nonpositive_m(capsys):
    assert main(["params", "--m", "0"]) == 2


# ------------------------------------------------------------ incline

def test_incline_standard_basis(basis2, tmp_path, capsys):
    out_file = tmp_path / "cert.json"
    rc = main(["incline", basis2, "--bound", "0.9", "--seed", "1", "--out", str(out_file)])
    assert rc == 0
    payload = json.loads(out_file.read_text())
    cert = payload["certificate"]
    assert cert["status"] == "ok"
    assert 1 / math.sqrt(2) - 1e-9 <= cert["achieved"] <= 0.9
    assert payload["manifest"]["command"] == "incline"
    assert payload["manifest"]["root_seed"] == 1


def test_incline_infeasible_bound_exits_one(basis2, tmp_path):
    out_file = tmp_path / "cert.json"
    rc = main(["incline", basis2, "--bound", "0.0001", "--budget", "300",
               "--seed", "1", "--out", str(out_file)])
    assert rc == 1
    cert = json.loads(out_file.read_text())["certificate"]
    assert cert["status"] == "failed"
    assert cert["achieved"] >= 1 / math.sqrt(2) - 1e-9


def test_incline_malformed_input(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["incline", str(bad), "--bound", "0.9"]) == 2


def test_incline_reruns_are_byte_identical(tmp_path):
    rng = np.random.default_rng(5)
    fam = rng.standard_normal((50, 16)) + 1j * rng.standard_normal((50, 16))
    src = tmp_path / "family.json"
    _write_vectors(src, list(fam))
    out_a, out_b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["incline", str(src), "--bound", "0.9", "--seed", "42", "--out", str(out_a)]) == 0
    assert main(["incline", str(src), "--bound", "0.9", "--seed", "42", "--out", str(out_b)]) == 0
    # the certificates coincide; only the manifests' argv differ (the --out path)
    cert_a = json.loads(out_a.read_text())["certificate"]
    cert_b = json.loads(out_b.read_text())["certificate"]
    assert cert_a == cert_b
    # exact byte identity when the full argument vector matches
    first = out_a.read_bytes()
    assert main(["incline", str(src), "--bound", "0.9", "--seed", "42", "--out", str(out_a)]) == 0
    assert out_a.read_bytes() == first


# -------------------------------------------------------------- cover

def test_cover_single_point_finds_witness(tmp_path, capsys):
    src = tmp_path / "one.json"
    _write_vectors(src, [np.array([1.0, 0, 0], dtype=complex)])
    # a complex-typed point is realified; witness lives on the real sphere
    assert main(["cover", str(src), "--radius", "0.9", "--trials", "5000", "--seed", "0"]) == 0
    out = json.loads(capsys.readouterr().out.splitlines()[0])
    assert out["status"] == "witness"


def test_cover_radius_two_finds_nothing(tmp_path):
    src = tmp_path / "one.json"
    _write_vectors(src, [np.array([1.0, 0, 0], dtype=complex)])
    assert main(["cover", str(src), "--radius", "2.0", "--trials", "2000", "--seed", "0"]) == 1


# ------------------------------------------------------------- family

def _build(tmp_path, toy_stage_file, branch, seed="7"):
    out = tmp_path / f"fam{branch}.json"
    rc = main(["family", "build", "--stage", toy_stage_file, "--branch", branch,
               "--basis", "random", "--seed", seed, "--out", str(out)])
    return rc, out


def test_family_build_verify_round_trip(tmp_path, toy_stage_file, capsys):
    rc, fam = _build(tmp_path, toy_stage_file, "01")
    assert rc == 0
    payload = json.loads(fam.read_text())
    assert payload["certificate"]["max_diagonal"] <= RHO_DEFAULT_BOUND
    assert payload["certificate"]["regime"] == "toy"
    capsys.readouterr()
    assert main(["family", "verify", str(fam), "--bound", "0.95"]) == 0
    out = json.loads(capsys.readouterr().out.splitlines()[0])
    assert out["ok"] is True


def test_family_verify_tampered_direction_exits_one(tmp_path, toy_stage_file):
    _, fam = _build(tmp_path, toy_stage_file, "01")
    payload = json.loads(fam.read_text())
    entries = payload["levels"][1]["direction"]["entries"]
    payload["levels"][1]["direction"]["entries"] = [[1.0, 0.0]] + [[0.0, 0.0]] * (len(entries) - 1)
    fam.write_text(json.dumps(payload))
    assert main(["family", "verify", str(fam), "--bound", "0.95"]) == 1


def test_family_verify_tight_bound_exits_one(tmp_path, toy_stage_file):
    _, fam = _build(tmp_path, toy_stage_file, "01")
    max_diag = json.loads(fam.read_text())["certificate"]["max_diagonal"]
    assert main(["family", "verify", str(fam), "--bound", str(max_diag / 2)]) == 1


def test_family_build_from_basis_file_and_verify(tmp_path, toy_stage_file):
    from inclined import random_orthonormal_basis

    basis = random_orthonormal_basis(16 + 256, 9)
    basis_file = tmp_path / "basis.json"
    _write_vectors(basis_file, basis)
    fam = tmp_path / "fam.json"
    rc = main(["family", "build", "--stage", toy_stage_file, "--branch", "10",
               "--basis", str(basis_file), "--seed", "3", "--out", str(fam)])
    assert rc == 0
    # file-based basis must be supplied again for verification
    assert main(["family", "verify", str(fam)]) == 2
    assert main(["family", "verify", str(fam), "--basis", str(basis_file)]) == 0
    # a different basis is rejected as an input error
    other = tmp_path / "other.json"
    _write_vectors(other, random_orthonormal_basis(16 + 256, 10))
    assert main(["family", "verify", str(fam), "--basis", str(other)]) == 2


def test_family_build_budget_exhausted_exits_three(tmp_path, capsys):
    stage_file = tmp_path / "tiny.json"
    write_json(stage_file, {"regime": "toy", "levels": [{"m": 1, "d": 2}]})
    basis_file = tmp_path / "std.json"
    _write_vectors(basis_file, list(np.eye(4, dtype=complex)))
    fam = tmp_path / "fam.json"
    rc = main(["family", "build", "--stage", str(stage_file), "--branch", "0",
               "--basis", str(basis_file), "--rho", "0.25", "--budget", "200",
               "--seed", "0", "--out", str(fam)])
    assert rc == 3
    assert "level 1" in capsys.readouterr().err


def test_family_build_stage_basis_mismatch_exits_two(tmp_path, toy_stage_file):
    basis_file = tmp_path / "wrong.json"
    _write_vectors(basis_file, list(np.eye(8, dtype=complex)))
    fam = tmp_path / "fam.json"
    rc = main(["family", "build", "--stage", toy_stage_file, "--branch", "01",
               "--basis", str(basis_file), "--seed", "1", "--out", str(fam)])
    assert rc == 2


def test_family_intersect(tmp_path, toy_stage_file, capsys):
    _, fam_a = _build(tmp_path, toy_stage_file, "01")
    _, fam_b = _build(tmp_path, toy_stage_file, "10")
    out = tmp_path / "inter.json"
    capsys.readouterr()
    rc = main(["family", "intersect", str(fam_a), str(fam_b), "--out", str(out)])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert payload["separating_level"] == 1
    assert payload["max_residual"] <= 1e-10
    vec = payload["vector"]
    norm = math.sqrt(sum(re * re + im * im for re, im in vec["entries"]))
    assert norm == pytest.approx(1.0, abs=1e-10)


def test_family_intersect_duplicate_branch_exits_two(tmp_path, toy_stage_file):
    _, fam = _build(tmp_path, toy_stage_file, "01")
    assert main(["family", "intersect", str(fam), str(fam)]) == 2


def test_threads_flag_does_not_change_results(basis2, tmp_path):
    out_a, out_b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["incline", basis2, "--bound", "0.9", "--seed", "4", "--out", str(out_a)]) == 0
    assert main(["incline", basis2, "--bound", "0.9", "--seed", "4",
                 "--out", str(out_b), "--threads", "8"]) == 0
    cert_a = json.loads(out_a.read_text())["certificate"]
    cert_b = json.loads(out_b.read_text())["certificate"]
    assert cert_a == cert_b


# --------------------------------------------------------------- demo

def test_demo_writes_expected_files(tmp_path):
    outdir = tmp_path / "demo"
    assert main(["demo", "--seed", "5", "--outdir", str(outdir)]) == 0
    names = sorted(p.name for p in outdir.iterdir())
    assert "incline_certificate.json" in names
    assert "intersections.json" in names
    assert "demo_summary.json" in names
    assert sum(1 for n in names if n.startswith("family_")) == 8
    summary = json.loads((outdir / "demo_summary.json").read_text())
    assert summary["max_diagonal"] <= RHO_DEFAULT_BOUND
    assert summary["max_intersection_residual"] <= 1e-10
    assert summary["incline_achieved"] <= 0.9
