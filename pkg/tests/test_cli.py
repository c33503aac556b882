import json
import subprocess
import sys

import numpy as np
import pytest

from l1ops.cli import main
from l1ops.constructions import parrott_triple
from l1ops.linalg import matrix_from_dict, matrix_to_dict
from l1ops.opspace import LevelElement, tuple_to_dict

S3 = np.sqrt(3)


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return p


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


@pytest.fixture
def parrott_file(tmp_path):
    return write(tmp_path, "parrott.json", tuple_to_dict(parrott_triple().ops))


def test_min_norm_level_one(tmp_path, capsys):
    f = write(tmp_path, "v.json", LevelElement.from_vector([3, 4j]).to_dict())
    code, rep, _ = run(["min-norm", "--input", f, "--grid", 360], capsys)
    assert code == 0
    assert rep["results"]["lower"] == pytest.approx(7, abs=1e-9)
    assert rep["results"]["upper"] == pytest.approx(7, abs=1e-12)
    assert set(rep) == {"command", "parameters", "results", "elapsed_ms", "seed", "tool_version"}


def test_min_norm_parrott(parrott_file, capsys):
    code, rep, _ = run(["min-norm", "--input", parrott_file, "--grid", 720], capsys)
    assert code == 0
    assert 1 + S3 - 1e-12 <= rep["results"]["lower"] < 3
    assert len(rep["results"]["argmax"]) == 3


def test_min_norm_single(tmp_path, capsys):
    b = np.array([[1, 2], [0, 1j]])
    f = write(tmp_path, "b.json", tuple_to_dict((b,)))
    _, rep, _ = run(["min-norm", "--input", f], capsys)
    assert rep["results"]["lower"] == pytest.approx(np.linalg.svd(b, compute_uv=False)[0])


def test_parse_error(tmp_path, capsys):
    f = write(tmp_path, "bad.json", "{not json")
    code, rep, err = run(["min-norm", "--input", f], capsys)
    assert code == 2 and rep is None and "error" in err


def test_missing_input(capsys):
    code, _, _ = run(["defect"], capsys)
    assert code == 2


def test_dimension_error(tmp_path, capsys):
    d = tuple_to_dict((np.eye(2), np.eye(2)))
    d["matrices"][1] = matrix_to_dict(np.eye(3))
    f = write(tmp_path, "dim.json", d)
    code, _, err = run(["min-norm", "--input", f], capsys)
    assert code == 3 and "error" in err


def test_parrott_gap(capsys):
    code, rep, _ = run(["parrott-gap", "--m", 2, "--grid", 72], capsys)
    r = rep["results"]
    assert code == 0
    assert r["tensor_witness"] == pytest.approx(3, abs=1e-9)
    assert r["os_value"] >= 3 - 1e-9 and r["os_value_power"] >= 3 - 1e-9
    assert r["gap"] > 0


def test_parrott_gap_independent_of_m(capsys):
    vals = []
    for m in (2, 6):
        _, rep, _ = run(["parrott-gap", "--m", m, "--grid", 16, "--refine", 0], capsys)
        vals.append(rep["results"]["os_value"])
    assert abs(vals[0] - vals[1]) <= 1e-9


def test_certify_reflection(tmp_path, capsys):
    f = write(tmp_path, "r.json", tuple_to_dict((np.eye(2), np.diag([1.0, -1.0]))))
    code, rep, _ = run(["certify", "--input", f], capsys)
    assert code == 0
    assert rep["results"]["witness"]["margin"] == pytest.approx(1 - np.sqrt(2) / 2, abs=1e-12)
    assert rep["results"]["certified"] is True


def test_certify_pair_flag(parrott_file, capsys):
    code, rep, _ = run(["certify", "--input", parrott_file, "--pair", 2, 3], capsys)
    assert code == 0 and rep["results"]["witness"]["margin"] > 0
    assert rep["parameters"]["pair"] == [2, 3]


def test_certify_repeated_unitary(tmp_path, capsys):
    f = write(tmp_path, "u.json", tuple_to_dict((np.eye(2), np.eye(2))))
    code, rep, _ = run(["certify", "--input", f], capsys)
    assert code == 0 and rep["results"]["witness"]["margin"] == pytest.approx(1)


def test_certify_non_contraction(tmp_path, capsys):
    f = write(tmp_path, "big.json", tuple_to_dict((np.eye(2), 2 * np.eye(2))))
    code, _, _ = run(["certify", "--input", f], capsys)
    assert code == 2


def test_defect(tmp_path, capsys):
    f = write(tmp_path, "r.json", tuple_to_dict((np.eye(2), np.diag([1.0, -1.0]))))
    code, rep, _ = run(["defect", "--input", f, "--starts", 4, "--seed", 3], capsys)
    assert code == 0
    assert rep["results"]["achieved"] == pytest.approx(1 / np.sqrt(2), abs=1e-6)
    assert rep["seed"] == 3


def test_dilate(tmp_path, capsys):
    f = write(tmp_path, "t.json", matrix_to_dict([[0.5]]))
    code, rep, _ = run(["dilate", "--input", f], capsys)
    u = matrix_from_dict(rep["results"]["dilations"][0])
    assert code == 0
    assert np.max(np.abs(u - parrott_triple().ops[1])) <= 1e-15


def test_ampliation_check(capsys):
    code, rep, _ = run(["ampliation-check", "--m", 8, "--n", 3], capsys)
    r = rep["results"]
    assert code == 0 and r["equal"] is True
    assert all(v["within"] for v in r["isometry_bounds"].values())


def test_json_output_and_determinism(tmp_path, capsys):
    outs = []
    for i in range(2):
        dest = tmp_path / f"rep{i}.json"
        assert main(["ampliation-check", "--m", "4", "--n", "2", "--json", str(dest)]) == 0
        rep = json.loads(dest.read_text())
        rep.pop("elapsed_ms")
        outs.append(json.dumps(rep, sort_keys=True))
    assert outs[0] == outs[1]
    assert capsys.readouterr().out == ""


def test_module_entrypoint(tmp_path):
    f = write(tmp_path, "t.json", matrix_to_dict([[0.0]]))
    proc = subprocess.run([sys.executable, "-m", "l1ops", "dilate", "--input", str(f)],
                          capture_output=True, text=True, check=True)
    rep = json.loads(proc.stdout)
    assert matrix_from_dict(rep["results"]["dilations"][0]).tolist() == [[0, 1], [1, 0]]
