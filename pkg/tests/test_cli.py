import csv
import io
import json
import subprocess
import sys

import pytest

from padic_hl.cli import EXIT_DOMAIN, EXIT_USAGE, EXIT_VERIFY, main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv)
    assert code == 0, err
    return json.loads(out)


def test_coeff_table_example():
    doc = run_json("coeff", "--case", "alt", "--mu", "1,0,0,0", "--nu", "2,1", "--symbolic")
    table = {tuple(r["lambda"]): r["c"] for r in doc["entries"]}
    assert table[(3, 1)] == "1+t"


def test_coeff_hecke_mode():
    doc = run_json("coeff", "--case", "her", "--mu", "1,0", "--nu", "0,0", "--lambda", "1,1", "--hecke")
    assert doc["entries"][0]["g"] and doc["coset_count"]


def test_corner_probability_example():
    doc = run_json("prob", "--family", "corner", "--case", "her", "--given", "0,0", "--target", "2", "--t", "1/3")
    assert doc["value"] == "4/45"


def test_symbolic_probability():
    doc = run_json("prob", "--family", "haar", "--case", "her", "--n", "1", "--lambda", "0", "--symbolic")
    assert "t" in doc["value"]


def test_numeric_form_prints_an_interval():
    doc = run_json("prob", "--family", "haar", "--case", "her", "--n", "2", "--lambda", "1,0", "--t", "1/3", "--form", "hl_numeric")
    exact = run_json("prob", "--family", "haar", "--case", "her", "--n", "2", "--lambda", "1,0", "--t", "1/3")
    from fractions import Fraction

    lo, hi = (Fraction(x) for x in doc["value"].strip("[]").split(", "))
    assert lo <= Fraction(exact["value"]) <= hi


def test_hl_polynomial():
    doc = run_json("hl", "--lambda", "1,0", "--symbolic")
    assert {tuple(r["exponents"]): r["coefficient"] for r in doc["terms"]} == {(1, 0): "1", (0, 1): "1"}


def test_dist_totals_to_one():
    from fractions import Fraction

    doc = run_json("dist", "--family", "haar", "--case", "her", "--n", "1", "--t", "1/3", "--cutoff", "3")
    total = sum(Fraction(p) for _, p in doc["atoms"]) + Fraction(doc["tail"])
    assert total == 1


def test_simulate_and_csv():
    code, out, _ = run("--format", "csv", "simulate", "--family", "haar", "--case", "her", "--n", "1", "--samples", "1000", "--seed", "3")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["lambda", "count"]
    assert sum(int(c) for _, c in rows[1:]) == 1000
    code2, out2, _ = run("simulate", "--family", "haar", "--case", "her", "--n", "1", "--samples", "1000", "--seed", "3", "--format", "csv")
    assert code2 == 0 and out2 == out


def test_verify_passes():
    doc = run_json("verify", "--family", "haar", "--case", "her", "--n", "2", "--p", "3", "--samples", "100000", "--seed", "7")
    assert doc["pass"] is True and doc["p_value"] > 1e-3


def test_verify_failure_status():
    code, out, _ = run("verify", "--family", "haar", "--case", "her", "--n", "1", "--samples", "20000", "--seed", "1", "--discard-cap", "0")
    assert code == EXIT_VERIFY
    assert json.loads(out)["pass"] is False


def test_oracle():
    assert run_json("oracle", "--kind", "coset_count", "--mu", "1,0", "--p", "2")["value"] == "3"
    doc = run_json("oracle", "--kind", "invertible_fraction", "--case", "alt", "--n", "2", "--p", "3")
    assert doc["value"] == "2/3"


@pytest.mark.parametrize(
    "argv",
    [
        ("frobnicate",),
        ("prob", "--family", "nope", "--case", "her"),
        ("prob", "--family", "haar", "--case", "her"),
        ("coeff", "--case", "her", "--mu", "1,x", "--nu", "0"),
        ("--format", "xml", "hl", "--lambda", "1"),
    ],
)
def test_usage_errors(argv):
    assert run(*argv)[0] == EXIT_USAGE


@pytest.mark.parametrize(
    "argv",
    [
        ("prob", "--family", "corner", "--case", "her", "--given", "1,0", "--target", "0,0", "--t", "1/3"),
        ("prob", "--family", "haar", "--case", "xyz", "--n", "1", "--lambda", "0", "--t", "1/3"),
        ("simulate", "--family", "haar", "--case", "her", "--n", "1", "--p", "4"),
        ("simulate", "--family", "haar", "--case", "her", "--n", "1", "--precision", "40"),
    ],
)
def test_domain_errors(argv):
    code, _, err = run(*argv)
    assert code == EXIT_DOMAIN and err


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "padic_hl", "prob", "--family", "invertible", "--case", "her", "--n", "1", "--q", "3"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0 and json.loads(res.stdout)["value"] == "2/3"
