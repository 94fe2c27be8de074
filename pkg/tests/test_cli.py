import json

import numpy as np
import pytest

from conftest import worked_pencil
from structpencil import StructuredPencil, random_structured_pencil
from structpencil import backward_errors as be
from structpencil.cli import main
from structpencil.fileio import (
    FileFormatError,
    parse_lambda,
    read_pencil,
    read_pencil_metadata,
    read_vectors,
    write_pencil,
    write_vectors,
)


@pytest.fixture
def worked_files(tmp_path):
    pencil, vec = tmp_path / "pencil.json", tmp_path / "x.json"
    write_pencil(pencil, worked_pencil(3), {"description": "worked example"})
    write_vectors(vec, [0, 0], [1, 1], np.zeros(3))
    return str(pencil), str(vec)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ---------------------------------------------------------------- files


def test_pencil_round_trip(tmp_path):
    p = random_structured_pencil(4, 3, 9)
    path = tmp_path / "p.json"
    write_pencil(path, p, {"seed": 9})
    back = read_pencil(path)
    for name, A in p.blocks().items():
        np.testing.assert_array_equal(back.blocks()[name], A)
    assert read_pencil_metadata(path) == {"seed": 9}


def test_vector_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    x1, x2, x3 = (rng.standard_normal(k) + 1j * rng.standard_normal(k) for k in (3, 3, 2))
    write_vectors(tmp_path / "x.json", x1, x2, x3)
    for a, b in zip(read_vectors(tmp_path / "x.json", 3, 2), (x1, x2, x3)):
        np.testing.assert_array_equal(a, b)


def test_malformed_entry_reports_location(tmp_path):
    data = json.loads(json.dumps({
        "schema_version": 1, "n": 1, "m": 1,
        "J": [[[0, 0]]], "R": [[[1, 0]]], "E": [[[0, 0]]], "B": [[[0, "x"]]], "S": [[[1, 0]]],
    }))
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    with pytest.raises(FileFormatError, match=r"row 0, column 0"):
        read_pencil(path)


def test_structure_violation_in_file(tmp_path):
    p = StructuredPencil(J=[[0]], R=[[1]], E=[[0]], B=[[0]], S=[[1]])
    path = tmp_path / "p.json"
    write_pencil(path, p)
    data = json.loads(path.read_text())
    data["J"] = [[[1, 0]]]
    path.write_text(json.dumps(data))
    with pytest.raises(FileFormatError, match="J"):
        read_pencil(path)


@pytest.mark.parametrize("text,value", [("i0.25", 0.25j), ("-i2", -2j), ("i-2", -2j), ("0.5j", 0.5j), ("1e-3i", 1e-3j)])
def test_parse_lambda(text, value):
    assert parse_lambda(text) == value


def test_parse_lambda_rejects_garbage():
    with pytest.raises(FileFormatError):
        parse_lambda("eye")


# ---------------------------------------------------------------- compute


def test_compute_worked_example_all_scopes(capsys, worked_files):
    pencil, vec = worked_files
    code, out, _ = run(capsys, "compute", "--pencil", pencil, "--lambda", "i0.25", "--x", vec, "--structure", "both")
    assert code == 2  # symmetric JE is infinite
    assert "0.97014" in out
    assert "0.68599" in out


def test_compute_symmetric_bounds_csv(capsys, worked_files):
    pencil, vec = worked_files
    code, out, _ = run(capsys, "compute", "--pencil", pencil, "--lambda", "i0.25", "--x", vec,
                       "--scopes", "RE", "--structure", "sym", "--output", "csv")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header.startswith("scope,structure")
    assert row.split(",")[:7] == ["RE", "sym", "complex", "bounds", "", "0.70711", "1.5411"]


def test_compute_machine_output_is_exact(capsys, worked_files):
    pencil, vec = worked_files
    code, out, _ = run(capsys, "compute", "--pencil", pencil, "--lambda", "i0.25", "--x", vec,
                       "--scopes", "JR", "--output", "machine")
    assert code == 0
    assert "0.5" in out


def test_compute_rejects_non_imaginary_lambda(capsys, worked_files):
    pencil, vec = worked_files
    code, _, err = run(capsys, "compute", "--pencil", pencil, "--lambda", "1+1j", "--x", vec)
    assert code == 1
    assert "imaginary" in err


def test_compute_rejects_unavailable_scope(capsys, worked_files):
    pencil, vec = worked_files
    code, _, err = run(capsys, "compute", "--pencil", pencil, "--lambda", "i0.25", "--x", vec,
                       "--scopes", "JB", "--structure", "sym")
    assert code == 1
    assert "JB" in err


def test_compute_bad_file(capsys, tmp_path, worked_files):
    _, vec = worked_files
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "compute", "--pencil", str(bad), "--lambda", "i1", "--x", vec)
    assert code == 1
    assert "invalid JSON" in err


# ---------------------------------------------------------------- sweep


def test_sweep_single_point(capsys, tmp_path):
    path = tmp_path / "s.json"
    write_pencil(path, StructuredPencil(J=[[0]], R=[[1]], E=[[1]], B=[[1]], S=[[1]]))
    code, out, err = run(capsys, "sweep", "--pencil", str(path), "--grid", "1:1:1", "--scopes", "JE",
                         "--output", "machine")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines == ["t,eta_B_JE", "1.0,1.0"]
    assert "grid minimizer eta_B_JE" in err


def test_sweep_negative_grid_and_monotone_without_E(capsys, tmp_path):
    p = random_structured_pencil(3, 2, 0)
    q = StructuredPencil(J=p.J, R=p.R, E=np.zeros((3, 3)), B=p.B, S=p.S)
    path = tmp_path / "q.json"
    write_pencil(path, q)
    code, out, _ = run(capsys, "sweep", "--pencil", str(path), "--grid=-2:2:9", "--scopes", "JE",
                       "--output", "machine", "--jobs", "2")
    assert code == 0
    rows = [tuple(map(float, line.split(","))) for line in out.strip().splitlines()[1:]]
    assert [t for t, _ in rows] == [-2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0]
    # without E the value is sigma_min(J - R)/sqrt(1 + t^2)
    pos = [v for t, v in rows if t > 0]
    assert all(a > b for a, b in zip(pos, pos[1:]))


def test_sweep_bad_grid(capsys, worked_files):
    pencil, _ = worked_files
    code, _, err = run(capsys, "sweep", "--pencil", pencil, "--grid", "1:2")
    assert code == 1


# ---------------------------------------------------------------- compare, verify, generate


def test_compare_is_byte_deterministic(capsys):
    a = run(capsys, "compare", "--seed", "3", "--num-lambdas", "3", "--output", "csv")
    b = run(capsys, "compare", "--seed", "3", "--num-lambdas", "3", "--output", "csv", "--jobs", "3")
    assert a[0] == 0
    assert a[1] == b[1]
    c = run(capsys, "compare", "--seed", "4", "--num-lambdas", "3", "--output", "csv")
    assert c[1] != a[1]


def test_compare_with_definite_R_is_input_error(capsys, tmp_path):
    path = tmp_path / "p.json"
    write_pencil(path, random_structured_pencil(3, 2, 0, r_rank=3))
    code, _, err = run(capsys, "compare", "--pencil", str(path), "--num-lambdas", "2")
    assert code == 1
    assert "null" in err


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", "--instances", "2", "--n", "3", "--m", "2")
    assert code == 0
    assert "FAIL" not in out


def test_verify_passes_with_one_restart(capsys):
    code, out, _ = run(capsys, "verify", "--instances", "2", "--n", "3", "--m", "2", "--restarts", "1")
    assert code == 0


def test_verify_detects_corrupted_weight(capsys, monkeypatch):
    true_weight = be.block_weight
    monkeypatch.setattr(be, "block_weight", lambda blocks, lam: 1.5 * true_weight(blocks, lam))
    code, out, _ = run(capsys, "verify", "--instances", "2", "--n", "3", "--m", "2")
    assert code == 3
    assert "FAIL" in out


def test_generate_writes_readable_file(capsys, tmp_path):
    path = tmp_path / "g.json"
    assert run(capsys, "generate", "--n", "3", "--m", "2", "--seed", "5", "--out", str(path))[0] == 0
    p = read_pencil(path)
    assert (p.n, p.m) == (3, 2)
    assert read_pencil_metadata(path)["seed"] == 5
    code, out, _ = run(capsys, "generate", "--n", "2", "--m", "1", "--real")
    assert code == 0 and json.loads(out)["n"] == 2
