import csv
import io
import json

import pytest

from qes.cli import dumps, main

EPS_HALF = ["--family", "coulomb-eps", "--q", "1", "--ell", "0", "--j", "0.5"]
ECKART_EXACT = ["--family", "eckart", "--L", "0", "--A", "12", "--alpha", "1", "--q", "0", "--m", "0"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_coulomb_eps(capsys):
    code, out, _ = run(capsys, "spectrum", *EPS_HALF, "--reproducible")
    assert code == 0
    d = json.loads(out)
    assert [lv["root"] for lv in d["levels"]] == pytest.approx([-2, 2], abs=1e-12)
    assert all(lv["E_stated"] == 5 for lv in d["levels"])
    assert d["diagnostics"]["complex_count"] == 0
    assert "generated_at" not in d


def test_spectrum_eckart_exact(capsys):
    code, out, _ = run(capsys, "spectrum", *ECKART_EXACT)
    assert code == 0
    d = json.loads(out)
    (lv,) = d["levels"]
    assert lv["root"] == pytest.approx(8)
    assert lv["E_derived"] == pytest.approx(-37, abs=1e-6)
    assert lv["E_closed_form"] == pytest.approx(37)
    assert "generated_at" in d


def test_spectrum_single_level(capsys):
    code, out, _ = run(capsys, "spectrum", "--family", "coulomb-eps", "--q", "1", "--ell", "0", "--j", "0")
    assert code == 0
    assert [lv["root"] for lv in json.loads(out)["levels"]] == [0.0]


def test_spectrum_levels_sorted(capsys):
    code, out, _ = run(capsys, "spectrum", "--family", "coulomb", "--q", "1", "--ell", "0", "--a", "2",
                       "--j", "3/2")
    E = [lv["E_derived"] for lv in json.loads(out)["levels"]]
    assert code == 0 and E == sorted(E)


def test_spectrum_rejects_non_root(capsys):
    code, _, err = run(capsys, "spectrum", *EPS_HALF, "--eps", "1.5")
    assert code == 1 and "not a quantized root" in err


def test_spectrum_csv(capsys):
    code, out, _ = run(capsys, "spectrum", *EPS_HALF, "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 2 and float(rows[0]["E_stated"]) == 5


def test_json_round_trip(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert run(capsys, "spectrum", *EPS_HALF, "--out", str(out), "--reproducible")[0] == 0
    text = out.read_text()
    assert dumps(json.loads(text)) + "\n" == text


def test_dumps_floats():
    text = dumps({"a": 0.1, "b": 5.0, "c": float("nan"), "d": [1e-300, 2]})
    d = json.loads(text)
    assert d == {"a": 0.1, "b": 5.0, "c": None, "d": [1e-300, 2]}
    assert '"b": 5.0' in text


@pytest.mark.parametrize("cmd", [["spectrum", *EPS_HALF], ["audit", *ECKART_EXACT],
                                 ["limit", *EPS_HALF, "--eps", "-2"]])
def test_reproducible_byte_identical(capsys, tmp_path, cmd):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(capsys, *cmd, "--reproducible", "--out", str(a))[0] == 0
    assert run(capsys, *cmd, "--reproducible", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_audit_coulomb_eps_strict_ok(capsys):
    code, out, _ = run(capsys, "audit", *EPS_HALF, "--strict", "--reproducible")
    assert code == 0
    d = json.loads(out)
    assert {f["verdict"] for f in d["findings"]} <= {"consistent", "not-applicable"}


def test_audit_eckart_sign_flip_and_strict(capsys):
    code, out, _ = run(capsys, "audit", *ECKART_EXACT)
    assert code == 0
    verdicts = {f["formula_id"]: f["verdict"] for f in json.loads(out)["findings"]}
    assert verdicts["Eq8"] == "sign-flip"
    # the hyperbolic triple carries inconsistent displays, so strict mode fails
    assert run(capsys, "audit", *ECKART_EXACT, "--strict")[0] == 3


def test_audit_missing_parameter_no_output(capsys, tmp_path):
    out = tmp_path / "audit.json"
    code, _, err = run(capsys, "audit", "--family", "eckart", "--L", "0", "--alpha", "1", "--q", "0",
                       "--out", str(out))
    assert code == 1 and "A" in err
    assert not out.exists() and list(tmp_path.iterdir()) == []


def test_limit_coulomb_decreasing(capsys):
    code, out, _ = run(capsys, "limit", *EPS_HALF, "--eps", "-2", "--alphas", "0.04,0.02,0.01",
                       "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["alpha", "deviation", "order_est"]
    dev = [float(r[1]) for r in rows[1:]]
    assert len(dev) == 3 and dev[0] > dev[1] > dev[2]


def test_limit_empty_alphas(capsys):
    assert run(capsys, "limit", *EPS_HALF, "--eps", "-2", "--alphas", "")[0] == 1


def test_limit_oscillator_q_zero(capsys):
    code, _, err = run(capsys, "limit", "--family", "oscillator", "--q", "0", "--ell", "2", "--a", "2",
                       "--eps", "0")
    assert code == 1


def test_limit_overflow_names_alpha(capsys):
    code, _, err = run(capsys, "limit", "--family", "oscillator", "--q", "1", "--ell", "2", "--a", "2",
                       "--alphas", "0.01,1e-70")
    assert code == 2 and "1e-70" in err


def test_oracle_two_electron(capsys):
    code, out, _ = run(capsys, "oracle", *EPS_HALF, "--eps", "-2", "--xmin", "1e-3", "--xmax", "12",
                       "--n", "12000", "--k", "1")
    assert code == 0
    assert json.loads(out)["eigenvalues"][0] == pytest.approx(5, abs=1e-3)


def test_oracle_potential_file(capsys, tmp_path):
    f = tmp_path / "v.csv"
    f.write_text("x,V\n" + "".join(f"{x / 100},{(x / 100) ** 2}\n" for x in range(-1200, 1201)))
    code, out, _ = run(capsys, "oracle", "--potential-file", str(f), "--n", "6000", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["index", "E"]
    assert [float(r["E"]) for r in rows] == pytest.approx([1, 3, 5], abs=2e-3)


def test_oracle_malformed_file_line_number(capsys, tmp_path):
    f = tmp_path / "v.csv"
    f.write_text("x,V\n0,1\n1,2\n2,abc\n")
    code, _, err = run(capsys, "oracle", "--potential-file", str(f))
    assert code == 1 and ":4:" in err


def test_oracle_coarse_grid(capsys):
    assert run(capsys, "oracle", *EPS_HALF, "--eps", "-2", "--xmin", "0.001", "--xmax", "12", "--n", "63")[0] == 1


def test_unknown_family_and_missing_command(capsys):
    assert run(capsys, "spectrum", "--family", "morse")[0] == 1
    assert run(capsys)[0] == 1


def test_emit_curves(capsys, tmp_path):
    out = tmp_path / "s.json"
    assert run(capsys, "spectrum", *EPS_HALF, "--out", str(out), "--emit-curves")[0] == 0
    rows = list(csv.DictReader(open(str(out) + ".curves.csv")))
    assert list(rows[0]) == ["level", "root", "x", "V", "psi"]
    assert {r["level"] for r in rows} == {"0", "1"}


def test_curves_command(capsys):
    code, out, _ = run(capsys, "curves", "--family", "oscillator", "--q", "1", "--ell", "2", "--a", "2",
                       "--n", "101")
    assert code == 0 and len(out.strip().splitlines()) == 102


def test_sweep(capsys):
    code, out, _ = run(capsys, "spectrum", "--family", "coulomb-eps", "--ell", "0", "--j", "0.5",
                       "--q", "1", "--sweep", "q=1:2:3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["q"] for r in rows] == ["1", "1", "3/2", "3/2", "2", "2"]
