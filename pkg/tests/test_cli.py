import json
import math
import pathlib
import subprocess
import sys

import jsonschema
import pytest

from gamma_factor.cli import detect_kind, main, report_schema
from gamma_factor.scenarios import PRESETS

SAMPLES = pathlib.Path(__file__).resolve().parent.parent / "samples"
VALIDATOR = jsonschema.Draft202012Validator(report_schema())


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    rep = json.loads(out)
    VALIDATOR.validate(rep)
    return code, rep


def test_demo_inner_product(capsys):
    code, rep = report(capsys, "demo", "inner-product")
    assert code == 0 and rep["status"] == "ok"
    (res,) = rep["results"]
    assert 1 - 1e-6 <= res["lower"] <= res["upper"] <= math.sqrt(2) + 1e-6
    assert rep["seed"] == 0 and rep["budget"] == 64
    assert rep["tolerances"]["psd_rel_tol"] == 1e-8


@pytest.mark.parametrize("preset", ["sandwich", "duality", "metric-equivalence"])
def test_demo_checks_pass(capsys, preset):
    code, rep = report(capsys, "demo", preset)
    assert code == 0
    assert rep["checks"] and all(c["passed"] for c in rep["checks"])


def test_certify_zero_operator(capsys):
    code, rep = report(capsys, "certify", "-i", SAMPLES / "zero_certify.json")
    assert code == 0
    assert rep["results"][0]["value"] == 0.0
    assert rep["results"][0]["certificate"]["kind"] == "witness-lower"


def test_certify_refused_exit_1(capsys):
    code, rep = report(capsys, "certify", "-i", SAMPLES / "inner_product.json", "-i", SAMPLES / "bad_witness.json")
    assert code == 1 and rep["status"] == "refused"
    assert "domination" in rep["message"]


def test_schema_error_exit_2(capsys):
    code, out, err = run(capsys, "gamma", "-i", SAMPLES / "malformed_operator.json")
    assert code == 2 and out == ""
    assert "$.domain[0].dim" in err and "'dim'" in err
    assert "$.domain[1].p" in err


def test_other_input_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "gamma", "-i", bad)[0] == 2
    assert run(capsys, "gamma", "-i", tmp_path / "missing.json")[0] == 2
    assert run(capsys, "demo", "no-such-preset")[0] == 2
    assert run(capsys, "norms", "-i", SAMPLES / "poly_x1sq_minus_x2sq.json")[0] == 2
    assert run(capsys, "demo", "sandwich", "--budget", "0")[0] == 2
    shape = tmp_path / "shape.json"
    shape.write_text(json.dumps({"domain": [{"dim": 2, "p": 2}], "codomain": {"dim": 1, "p": 2}, "coeffs": [[1.0, 2.0, 3.0]]}))
    code, _, err = run(capsys, "gamma", "-i", shape)
    assert code == 2 and "shape" in err


def test_no_certificate_exit_3(capsys, tmp_path):
    # an l_p codomain with 1 < p < 2 and p != 2 domains still has routes, so
    # force the none route with a non-polyhedral, non-Euclidean n = 3 domain
    # whose embedding constant is unavailable: dims above the verification cap
    big = {"dim": 9, "p": 3}
    op = {"domain": [big, big, big], "codomain": {"dim": 1, "p": 2}, "coeffs": [[[[0.0]] * 9] * 9] * 9}
    op["coeffs"][0][0][0] = [1.0]
    path = tmp_path / "op.json"
    path.write_text(json.dumps(op))
    code, rep = report(capsys, "gamma", "-i", path, "--budget", "4")
    if rep["results"][0]["upper"] == "inf":
        assert code == 3 and rep["status"] == "no-certificate"
    else:
        assert code == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["norms", "-i", SAMPLES / "tensor_3x3.json"],
        ["norms", "-i", SAMPLES / "l1_bilinear.json"],
        ["search-witness", "-i", SAMPLES / "inner_product.json"],
        ["gamma", "-i", SAMPLES / "l1_bilinear.json"],
        ["gamma", "-i", SAMPLES / "gamma_exact.json"],
        ["poly", "-i", SAMPLES / "poly_x1sq_minus_x2sq.json"],
    ],
)
def test_commands_deterministic(capsys, argv):
    a = run(capsys, *argv)
    b = run(capsys, *argv)
    assert a[0] == 0 and a[1] == b[1]
    VALIDATOR.validate(json.loads(a[1]))


def test_gamma_exact_representation(capsys):
    _, rep = report(capsys, "gamma", "-i", SAMPLES / "gamma_exact.json")
    res = rep["results"][0]
    assert res["lower"] >= 2 - 1e-6 and res["upper"] <= 2 + 1e-6


def test_seed_is_recorded_and_matters(capsys):
    _, a = report(capsys, "search-witness", "-i", SAMPLES / "l1_bilinear.json", "--seed", "1")
    _, b = report(capsys, "search-witness", "-i", SAMPLES / "l1_bilinear.json", "--seed", "2")
    assert a["seed"] == 1 and b["seed"] == 2


def test_tolerance_override(capsys):
    _, rep = report(capsys, "demo", "inner-product", "--tol-psd", "1e-6", "--tol-norm", "1e-7")
    assert rep["tolerances"] == {"psd_rel_tol": 1e-6, "norm_rel_tol": 1e-7}


def test_timing_flag(capsys):
    _, rep = report(capsys, "demo", "sandwich", "--timing")
    assert rep["wall_time_s"] >= 0


def test_output_file_and_table(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert run(capsys, "demo", "polynomial", "-o", out)[0] == 0
    VALIDATOR.validate(json.loads(out.read_text()))
    code, text, _ = run(capsys, "demo", "polynomial", "--format", "table")
    assert code == 0 and "PASS" in text and "FAIL" not in text


def test_detect_kind():
    assert detect_kind({"xz": [], "st": [[[1, 0], [0, 1]]]}) == "poly_witness"
    assert detect_kind({"xz": [], "st": [[{"factors": [[1]]}, {"factors": [[0]]}]]}) == "witness"
    assert detect_kind({"spaces": [], "coeffs": []}) == "tensor"


def test_all_presets_listed():
    assert set(PRESETS) == {
        "inner-product", "canonical", "sandwich", "metric-equivalence", "hilbert-schmidt",
        "duality", "ideal", "kwapien", "polynomial",
    }


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "gamma_factor.cli", "demo", "metric-equivalence", "--format", "table"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.startswith("gamma-factor")
