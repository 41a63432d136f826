"""Golden-file and exit-code tests for the command line.

Every golden is compared byte-for-byte, and each command is run twice to
catch nondeterminism (map ordering, timestamps).  Every documented exit
code is exercised.
"""

import subprocess
import sys

import pytest

from conftest import GOLDEN, fixture_path

PERCEPTION = str(fixture_path("perception-chain.ucm"))
VERBATIM = str(fixture_path("perception-chain-verbatim.ucm"))
TREE = str(fixture_path("three-leg-tree.ucm"))
EVIDENTIAL = str(fixture_path("single-evidential.ucm"))
ELEVEN = str(fixture_path("eleven-events.ucm"))


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "ucm.cli", *args],
        capture_output=True,
        timeout=60,
    )


GOLDEN_CASES = [
    ("validate_ok.txt", 0, ["validate", PERCEPTION]),
    ("validate_verbatim.txt", 1, ["validate", VERBATIM]),
    ("infer_perception.txt", 0, ["infer", PERCEPTION, "--query", "perception"]),
    ("infer_intervals.txt", 0, ["infer", PERCEPTION, "--query", "perception", "--intervals"]),
    (
        "infer_posterior.txt",
        0,
        ["infer", PERCEPTION, "--query", "ground_truth", "--evidence", "perception=none"],
    ),
    ("infer_decimals3.txt", 0, ["infer", PERCEPTION, "--query", "perception", "--decimals", "3"]),
    ("fta_three_leg.txt", 0, ["fta", TREE, "--top", "TOP", "--cutsets", "--prob"]),
    ("fta_evidential.txt", 0, ["fta", EVIDENTIAL, "--top", "TOP", "--evidential"]),
    ("report_both.txt", 0, ["report", PERCEPTION, "--query", "ground_truth", "--query", "perception"]),
    ("to_bn_three_leg.txt", 0, ["to-bn", TREE, "--top", "TOP"]),
]


@pytest.mark.parametrize("golden,code,args", GOLDEN_CASES, ids=[c[0] for c in GOLDEN_CASES])
def test_golden_output(golden, code, args):
    expected = (GOLDEN / golden).read_bytes()
    first = run_cli(*args)
    second = run_cli(*args)
    assert first.returncode == code, first.stderr
    assert first.stdout == expected
    # byte-identical across two consecutive runs
    assert second.stdout == first.stdout
    assert second.returncode == first.returncode


def test_spot_values_in_goldens():
    # guard the goldens themselves against accidental regeneration drift
    assert b"car\t0.541500" in (GOLDEN / "infer_perception.txt").read_bytes()
    assert b"unknown\t0.663900" in (GOLDEN / "infer_posterior.txt").read_bytes()
    assert b"car\t0.541500\t0.606500" in (GOLDEN / "infer_intervals.txt").read_bytes()
    assert b"P(top)=0.154000" in (GOLDEN / "fta_three_leg.txt").read_bytes()
    assert b"rare-event<=0.160000" in (GOLDEN / "fta_three_leg.txt").read_bytes()
    assert b"[Bel,Pl]=[0.150000,0.200000]" in (GOLDEN / "fta_evidential.txt").read_bytes()
    assert "row sum 0.9".encode() in (GOLDEN / "validate_verbatim.txt").read_bytes()
    assert b"ontological_mass\t0.100000" in (GOLDEN / "report_both.txt").read_bytes()
    assert b"epistemic_mass\t0.065000" in (GOLDEN / "report_both.txt").read_bytes()
    assert (GOLDEN / "validate_ok.txt").read_bytes() == b"OK\n"


def test_exit_zero_success():
    assert run_cli("validate", PERCEPTION).returncode == 0


def test_exit_one_validation_findings():
    result = run_cli("validate", VERBATIM)
    assert result.returncode == 1
    assert b"row sum 0.9" in result.stdout


def test_exit_one_invalid_model_for_analysis():
    result = run_cli("infer", VERBATIM, "--query", "perception")
    assert result.returncode == 1
    assert result.stdout == b""
    assert b"validation error" in result.stderr


def test_exit_one_contradictory_evidence(tmp_path):
    path = tmp_path / "contradiction.ucm"
    path.write_text(
        'model "m"\n'
        "variable X { states: a, b }\n"
        "variable Y { states: a, b parents: X }\n"
        "cpt X { () -> 1.0, 0.0 }\n"
        "cpt Y { (a) -> 1.0, 0.0\n (b) -> 0.0, 1.0 }\n"
    )
    result = run_cli("infer", str(path), "--query", "X", "--evidence", "Y=b")
    assert result.returncode == 1
    assert b"contradictory" in result.stderr


def test_exit_one_parse_error_outside_validate(tmp_path):
    path = tmp_path / "broken.ucm"
    path.write_text('model "m"\nvariable x {')
    result = run_cli("infer", str(path), "--query", "x")
    assert result.returncode == 1
    assert b"syntax error" in result.stderr


def test_exit_two_missing_file():
    result = run_cli("validate", "does-not-exist.ucm")
    assert result.returncode == 2
    assert result.stdout == b""


def test_exit_two_unknown_names():
    assert run_cli("infer", PERCEPTION, "--query", "ghost").returncode == 2
    assert (
        run_cli("infer", PERCEPTION, "--query", "perception", "--evidence", "ground_truth=bike").returncode
        == 2
    )
    assert run_cli("fta", TREE, "--top", "NOPE", "--cutsets").returncode == 2
    assert run_cli("report", PERCEPTION, "--query", "ghost").returncode == 2


def test_exit_two_bad_usage():
    assert run_cli("infer", PERCEPTION).returncode == 2  # missing --query
    assert run_cli("frobnicate", PERCEPTION).returncode == 2
    assert run_cli("infer", PERCEPTION, "--query", "perception", "--evidence", "nonsense").returncode == 2
    assert run_cli("fta", TREE, "--top", "TOP").returncode == 2  # nothing to do


def test_exit_three_guard_exceeded():
    result = run_cli("fta", ELEVEN, "--top", "TOP", "--evidential")
    assert result.returncode == 3
    assert b"guard" in result.stderr


def test_validate_parse_error_goes_to_stdout(tmp_path):
    path = tmp_path / "broken.ucm"
    path.write_text('model "m"\nvariable x {')
    result = run_cli("validate", str(path))
    assert result.returncode == 1
    assert result.stdout.startswith(b"error\t2:")


def test_to_bn_round_trips_through_infer(tmp_path):
    translated = run_cli("to-bn", TREE, "--top", "TOP")
    assert translated.returncode == 0
    path = tmp_path / "translated.ucm"
    path.write_bytes(translated.stdout)
    result = run_cli("infer", str(path), "--query", "TOP")
    assert result.returncode == 0
    assert b"fail\t0.154000" in result.stdout


def test_report_custom_thresholds():
    # raising the ontological threshold above 0.1 silences those means
    result = run_cli("report", PERCEPTION, "--query", "ground_truth", "--tau-o", "0.2")
    assert result.returncode == 0
    assert b"means\tprevention" not in result.stdout
    assert b"means\tforecasting" in result.stdout
