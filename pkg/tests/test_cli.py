import json
import math

import pytest
from scipy.special import exp1

from gevreylab.cli import main
from gevreylab.io import corpus_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def euler_coeffs(M=20, sign=-1):
    return [0] + [sign ** (n - 1) * math.factorial(n - 1) for n in range(1, M + 1)]


def test_resonance_examples(capsys):
    code, out, _ = run(capsys, "resonance", corpus_path("euler2d"))
    rep = json.loads(out)
    assert code == 0 and rep["resonance"]["is_one_resonant"] and rep["resonance"]["r"] == [1, 1]
    assert rep["config"]["max_degree"] == 8 and len(rep["config_hash"]) == 64
    code, out, _ = run(capsys, "resonance", corpus_path("poincare"))
    assert not json.loads(out)["resonance"]["is_one_resonant"]


def test_resonance_missing_field(tmp_path, capsys):
    doc = json.loads(corpus_path("euler2d").read_text())
    del doc["lambda"]
    code, _, err = run(capsys, "resonance", write(tmp_path, "bad.json", doc))
    assert code == 1 and "lambda" in err


def test_resonance_malformed_json(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    code, _, err = run(capsys, "resonance", p)
    assert code == 1 and "malformed JSON" in err


def test_resonance_hypothesis_failure_still_reports(tmp_path, capsys):
    out = tmp_path / "rep.json"
    code, _, _ = run(capsys, "resonance", corpus_path("h5bad"), "-o", out)
    assert code == 2 and json.loads(out.read_text())["command"] == "resonance"


def test_smalldiv_examples(tmp_path, capsys):
    csv_rho, csv_om = tmp_path / "rho.csv", tmp_path / "omega.csv"
    code, out, _ = run(capsys, "smalldiv", corpus_path("euler2d"), "--nonlinear-only",
                       "--m-max", 50, "--csv-rho", csv_rho, "--csv-omega", csv_om)
    assert code == 0
    rows = csv_rho.read_text().splitlines()
    assert rows[0] == "m,rho_m" and {float(r.split(",")[1]) for r in rows[1:]} == {1.0}
    assert csv_om.read_text().splitlines()[0] == "k,omega_k,bruno_partial"
    assert json.loads(out)["small_divisors"]["fit"]["gamma"] == 0
    code, out, _ = run(capsys, "smalldiv", corpus_path("smalldiv3d"), "--m-max", 200)
    assert code == 0 and 0.85 <= json.loads(out)["small_divisors"]["fit"]["gamma"] <= 1.15


def test_smalldiv_bad_m_max(capsys):
    code, _, _ = run(capsys, "smalldiv", corpus_path("euler2d"), "--m-max", 0)
    assert code == 1


def test_normalize_examples(tmp_path, capsys):
    res, csv = tmp_path / "res.json", tmp_path / "deg.csv"
    code, out, _ = run(capsys, "normalize", corpus_path("euler2d"), "--N", 8, "--M", 12,
                       "-o", res, "--csv", csv, "--emit-borel", "--verify-bounds")
    rep = json.loads(out)["normalization"]
    assert code == 0 and rep["conjugacy_residual"] < 1e-9
    assert rep["route_equivalence"] < 1e-10 and math.isfinite(rep["bound_fit"]["K_fit"])
    assert "borel" in json.loads(res.read_text())
    assert csv.read_text().splitlines()[0] == "degree,max_abs_coeff"


def test_normalize_zero_and_gate(tmp_path, capsys):
    code, out, _ = run(capsys, "normalize", corpus_path("zero2d"))
    rep = json.loads(out)["normalization"]
    assert code == 0 and rep["conjugacy_residual"] == 0
    assert all(v == 0 for _, v in rep["max_coeff_by_degree"])
    code, out, _ = run(capsys, "normalize", corpus_path("poincare"))
    assert code == 2 and "well prepared" in json.loads(out)["error"]


def test_normalize_h3_violation(capsys):
    code, out, err = run(capsys, "normalize", corpus_path("h3violation"))
    assert code == 3
    fail = json.loads(out)["solve_failure"]
    assert set(fail) == {"i", "Q", "n"} and str(fail["n"]) in err


def test_gevrey_examples(tmp_path, capsys):
    res = tmp_path / "res.json"
    assert run(capsys, "normalize", corpus_path("euler2d"), "-o", res, "--report", tmp_path / "r")[0] == 0
    csv = tmp_path / "g.csv"
    code, out, _ = run(capsys, "gevrey", res, "--csv", csv)
    assert code == 0 and 0.8 <= json.loads(out)["gevrey"]["s_hat"] <= 1.2
    assert csv.read_text().splitlines()[0] == "N,h_N,envelope"
    code, _, err = run(capsys, "gevrey", res, "--R", 20)
    assert code == 4 and "reduce R" in err
    zres = tmp_path / "zero.json"
    run(capsys, "normalize", corpus_path("zero2d"), "-o", zres)
    code, out, _ = run(capsys, "gevrey", zres, "--gamma", "0")
    assert code == 0 and json.loads(out)["gevrey"]["s_hat"] == 0


def test_sum_examples(tmp_path, capsys):
    code, out, _ = run(capsys, "sum", write(tmp_path, "e.json", {"z_coeffs": euler_coeffs()}),
                       "--z", "0.1")
    val = json.loads(out)["value"]
    assert code == 0 and abs(val[0] - math.exp(10) * exp1(10)) < 1e-6 and abs(val[1]) < 1e-12
    poly = write(tmp_path, "p.json", {"z_coeffs": [1, 2, -1, 0.5], "polynomial": True})
    z = 0.1 + 0.05j
    code, out, _ = run(capsys, "sum", poly, "--z", "0.1+0.05j", "--direction", math.atan2(0.05, 0.1))
    got = complex(*json.loads(out)["value"])
    assert code == 0 and abs(got - (1 + 2 * z - z ** 2 + 0.5 * z ** 3)) < 1e-8


def test_sum_blocked_direction(tmp_path, capsys):
    s = write(tmp_path, "e.json", {"z_coeffs": euler_coeffs(sign=1)})
    code, _, err = run(capsys, "sum", s, "--z", "0.1")
    assert code == 5 and "pole at 1+0j" in err
    code, _, err = run(capsys, "sum", s, "--z", "0.1", "--pade", 10, 10)
    assert code == 1 and "needs 21 coefficients" in err
    code, _, _ = run(capsys, "sum", s, "--z", "-0.1", "--direction", math.pi)
    assert code == 0


def test_sum_bad_z(tmp_path, capsys):
    s = write(tmp_path, "e.json", {"z_coeffs": euler_coeffs()})
    assert run(capsys, "sum", s, "--z", "abc")[0] == 1


def test_reports_are_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        run(capsys, "normalize", corpus_path("euler2d"), "--emit-borel", "--report", path)
    assert a.read_bytes() == b.read_bytes()
    for path in (a, b):
        run(capsys, "smalldiv", corpus_path("smalldiv3d"), "-o", path)
    assert a.read_bytes() == b.read_bytes()


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0 and "gevreylab" in capsys.readouterr().out
