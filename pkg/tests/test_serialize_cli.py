import json
import random
import shutil
import subprocess
import sys
from fractions import Fraction

import pytest

from nnt import builders
from nnt.cli import main
from nnt.core import NeutralSpace, lambda_n, random_group_element
from nnt.exterior import GradedElement
from nnt.forms import parse_exppoly
from nnt.linalg import Mat
from nnt.serialize import (
    SchemaError,
    connection_from_json,
    connection_to_json,
    exppoly_from_json,
    exppoly_to_json,
    graded_from_json,
    graded_to_json,
    kform_from_json,
    kform_to_json,
    mat_from_json,
    mat_to_json,
    rational_from_json,
    structure_from_json,
    structure_to_json,
)
from nnt.forms import d
from nnt.structures import NilpotentStructure, reference_xi, theta_from_xi, theta_of

from conftest import M


def test_rationals():
    assert rational_from_json("3/6") == Fraction(1, 2)
    assert rational_from_json(-4) == -4
    for bad in (0.5, True, None, "1/0", "a"):
        with pytest.raises(SchemaError):
            rational_from_json(bad)


def test_matrix_roundtrip():
    A = M([1, "1/2"], [-3, 0])
    obj = mat_to_json(A)
    assert obj == {"rows": 2, "cols": 2, "entries": [["1", "1/2"], ["-3", "0"]]}
    assert mat_from_json(obj) == A


@pytest.mark.parametrize("obj", [
    {"rows": 2, "cols": 2, "entries": [["1", "2"]]},
    {"rows": 1, "cols": 2, "entries": [["1"]]},
    {"cols": 1, "entries": [["1"]]},
    {"rows": 0, "cols": 0, "entries": []},
    [1, 2],
])
def test_matrix_schema_errors(obj):
    with pytest.raises(SchemaError):
        mat_from_json(obj)


def test_graded_roundtrip():
    x = theta_from_xi(reference_xi(1))
    obj = graded_to_json(x)
    assert obj["degree"] == 2 and all(min(t["idx"]) >= 1 for t in obj["terms"])
    assert graded_from_json(obj, 4) == x
    swapped = {"degree": 2, "terms": [{"idx": [2, 1], "coeff": "1"}]}
    assert graded_from_json(swapped, 4) == GradedElement.basis(4, 0, 1).scale(-1)
    with pytest.raises(SchemaError):
        graded_from_json({"degree": 2, "terms": [{"idx": [1, 5], "coeff": "1"}]}, 4)


def test_forms_roundtrip():
    f = parse_exppoly("x1**2 - 1/3*exp(x1 - x2)", 2)
    assert exppoly_from_json(exppoly_to_json(f)) == f
    w = d(f)
    assert kform_from_json(kform_to_json(w), 2) == w
    flipped = {"degree": 2, "coeffs": [{"idx": [2, 1], "poly": exppoly_to_json(f)}]}
    assert kform_from_json(flipped, 2).component((0, 1)) == -f


def test_connection_and_structure_roundtrip():
    cg = builders.build_gen_n1("x1", "x2", "x1 + x2", "(x1 + x2)**2")
    back = connection_from_json(json.loads(json.dumps(connection_to_json(cg))))
    assert back.omega == cg.omega and back.eps == cg.eps
    A = random_group_element(NeutralSpace(1), "so", random.Random(2))
    ns = NilpotentStructure.from_endo(A @ lambda_n(1) @ A.inverse(), NeutralSpace(1))
    again = structure_from_json(json.loads(json.dumps(structure_to_json(ns))))
    assert again.N == ns.N and theta_of(again) == theta_of(ns)


def test_connection_schema_errors():
    cg = builders.build_wnp_n1("x1", "x2")
    obj = connection_to_json(cg)
    obj["omega"] = obj["omega"][:3]
    with pytest.raises(SchemaError):
        connection_from_json(obj)
    obj = connection_to_json(cg)
    obj["omega"][0][1] = obj["omega"][0][2]
    with pytest.raises(SchemaError):
        connection_from_json(obj)


# -- CLI ------------------------------------------------------------------------

def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def run(argv, capsys):
    rc = main(argv)
    out, err = capsys.readouterr()
    return rc, (json.loads(out) if out.strip() else None), err


def test_check_commands(tmp_path, capsys):
    f = write(tmp_path, "g.json", mat_to_json(Mat.identity(4)))
    rc, out, _ = run(["check", "group", "--which", "h", "--n", "1", f], capsys)
    assert rc == 0 and out["member"] is True
    f = write(tmp_path, "l.json", mat_to_json(lambda_n(1)))
    rc, out, _ = run(["check", "algebra", "--which", "g", "--n", "1", f], capsys)
    assert rc == 0
    rc, out, _ = run(["check", "group", "--which", "so", "--n", "1", f], capsys)
    assert rc == 1 and out["member"] is False
    rc, _, err = run(["check", "group", "--which", "so", "--n", "2", f], capsys)
    assert rc == 2 and "error" in json.loads(err)


def test_nilpotent_commands(tmp_path, capsys):
    f = write(tmp_path, "L.json", mat_to_json(lambda_n(1)))
    rc, out, _ = run(["nilpotent", "verify", "--n", "1", f], capsys)
    assert rc == 0 and out["axioms"] is True
    rc, out, _ = run(["nilpotent", "verify", "--n", "1", "--eps", "-", f], capsys)
    assert rc == 1
    rc, out, _ = run(["nilpotent", "theta", "--n", "1", f], capsys)
    assert rc == 0 and graded_from_json(out, 4) == theta_of(NilpotentStructure.model(1))
    rc, out, _ = run(["nilpotent", "frame", "--n", "1", f], capsys)
    assert rc == 0 and out["eps"] == "+"
    record = write(tmp_path, "rec.json", out)
    rc, out, _ = run(["nilpotent", "dual", "--n", "1", record], capsys)
    assert rc == 0 and mat_from_json(out["N"]) == M([0, -1, 0, -1], [1, 0, -1, 0], [0, -1, 0, -1], [-1, 0, 1, 0])
    rc, out, _ = run(["nilpotent", "split", "--n", "1", f], capsys)
    assert rc == 0 and set(out) == {"n", "I", "J1", "J2"}
    rc, out, _ = run(["nilpotent", "xi", "--n", "1", f], capsys)
    assert rc == 0 and out["degree"] == 2
    bad = write(tmp_path, "Z.json", mat_to_json(Mat.identity(4)))
    rc, out, _ = run(["nilpotent", "verify", "--n", "1", bad], capsys)
    assert rc == 1 and out["reason"]
    rc, out, _ = run(["nilpotent", "theta", "--n", "1", bad], capsys)
    assert rc == 1


def test_from_theta_command(tmp_path, capsys):
    L = write(tmp_path, "sub.json", mat_to_json(reference_xi(1)))
    T = write(tmp_path, "theta.json", graded_to_json(theta_from_xi(reference_xi(1))))
    rc, out, _ = run(["nilpotent", "from-theta", "--n", "1", "--subspace", L, "--theta", T], capsys)
    assert rc == 0 and mat_from_json(out["N"]) == lambda_n(1)
    Z = write(tmp_path, "zero.json", {"degree": 2, "terms": []})
    rc, out, _ = run(["nilpotent", "from-theta", "--n", "1", "--subspace", L, "--theta", Z], capsys)
    assert rc == 1 and out["ok"] is False


def test_conn_commands(tmp_path, capsys):
    f = write(tmp_path, "w.json", connection_to_json(builders.build_wnp_n1("x1", "x2")))
    rc, out, _ = run(["conn", "curvature", "--n", "1", "--eps", "+", f], capsys)
    assert rc == 0 and out["flat"]
    rc, out, _ = run(["conn", "walker", "--n", "1", "--eps", "+", f], capsys)
    assert rc == 0 and out["walker"] and out["witness"] is None
    rc, out, _ = run(["conn", "parallel", "--n", "1", "--eps", "+", f], capsys)
    assert rc == 1 and out["parallel"] is False
    rc, out, _ = run(["conn", "alpha", "--n", "1", "--eps", "+", f], capsys)
    assert rc == 0 and kform_from_json(out, 2) == d(parse_exppoly("x2 - x1", 2))
    rc, out, _ = run(["conn", "report", "--n", "1", "--eps", "+", f], capsys)
    assert rc == 0 and out["walker"] and not out["parallel"]
    rc, _, _ = run(["conn", "walker", "--n", "1", "--eps", "-", f], capsys)
    assert rc == 2
    g = write(tmp_path, "dF.json", connection_to_json(builders.build_dF(1, [["1/2*x1"]])))
    rc, out, _ = run(["conn", "walker", "--n", "1", "--eps", "+", g], capsys)
    assert rc == 1 and out["witness"]["identity"]


def test_example_command(tmp_path, capsys):
    report = tmp_path / "r.json"
    rc, out, _ = run(["example", "run", "wnp", "--out", str(report)], capsys)
    assert rc == 0 and out["verdict"] == "pass"
    assert json.loads(report.read_text()) == out
    p = write(tmp_path, "p.json", {"n": 2})
    rc, out, _ = run(["example", "run", "theorem_nh", "--params", p, "--samples", "3", "--seed", "1"], capsys)
    assert rc == 0 and out["params"]["samples"] == 3
    q = write(tmp_path, "q.json", [1])
    rc, _, _ = run(["example", "run", "wnp", "--params", q], capsys)
    assert rc == 2
    rc, _, _ = run(["example", "run", "wnp", "--params", str(tmp_path / "missing.json")], capsys)
    assert rc == 2


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["example", "run", "no_such_example"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_bad_json_input(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    rc, _, err = run(["nilpotent", "verify", "--n", "1", str(p)], capsys)
    assert rc == 2 and "not valid JSON" in json.loads(err)["error"]


def test_console_script(tmp_path):
    exe = shutil.which("nnt")
    cmd = [exe] if exe else [sys.executable, "-m", "nnt.cli"]
    f = write(tmp_path, "L.json", mat_to_json(lambda_n(1)))
    proc = subprocess.run(cmd + ["nilpotent", "verify", "--n", "1", f], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["axioms"] is True
