import io
import json
import math
import subprocess
import sys

import pytest

from argsector.cli import run_command


def run(argv):
    buf = io.StringIO()
    code = run_command(argv, stdout=buf)
    return code, json.loads(buf.getvalue())


@pytest.fixture
def mono3(tmp_path):
    p = tmp_path / "mono3.json"
    p.write_text('{"schemaVersion":1,"variant":"monomial","n":3}')
    return str(p)


def test_area_command(mono3):
    code, out = run(["area", "--spec", mono3, "--r", "1", "--theta1", "0",
                     "--alpha", "1.5707963", "--err", "1e-3"])
    assert code == 0
    assert out["result"]["inMass"] == pytest.approx(0.25, abs=1e-3)
    assert out["config"]["function"] == {"schemaVersion": 1, "variant": "monomial", "n": 3}
    assert out["config"]["err"] == 1e-3


def test_omega_command(mono3):
    code, out = run(["omega", "--spec", mono3, "--r", "2"])
    assert code == 0
    assert out["result"]["omega"] == pytest.approx(6 * math.pi, abs=1e-7)
    assert out["result"]["omegaBig"] == pytest.approx(6 * math.pi, abs=1e-7)


@pytest.mark.parametrize("argv", [
    ["eval", "--z", "0.5+1j"],
    ["trace", "--r", "0.5"],
    ["beta", "--r", "1"],
    ["arcs", "--r", "0.8", "--theta1", "0.2", "--alpha", "1"],
    ["lemma", "--theta1", "0.2", "--alpha", "1", "--radial-samples", "4"],
    ["thm1", "--rho", "0.5", "--r-min", "0.5", "--r-max", "1", "--samples", "2"],
    ["thm4", "--sectors", "4", "--openings", "1.5707963267948966", "--err", "4e-3"],
    ["sweep", "--radii", "1", "--sectors", "2", "--openings", "1", "--err", "4e-3"],
])
def test_every_subcommand_succeeds(mono3, argv):
    code, out = run([argv[0], "--spec", mono3] + argv[1:])
    assert code == 0, out
    assert out["command"] == argv[0]


def test_orderzero_command(tmp_path, mono3):
    p = tmp_path / "zeros.json"
    p.write_text('{"variant":"zeroProduct","zeros":[{"location":1},{"location":2},'
                 '{"location":[0,4]}]}')
    code, out = run(["orderzero", "--spec", str(p), "--delta", "0.1", "--U", "10"])
    assert code == 0
    assert out["result"] == {"rDelta": 4.0, "analysisR": 400.0}
    code, out = run(["orderzero", "--spec", mono3])
    assert code == 2


def test_bad_spec_exit_code(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"variant":"monomial","n":-2}')
    code, out = run(["omega", "--spec", str(p), "--r", "1"])
    assert code == 2
    assert out["result"]["code"] == "E_RANGE"


def test_missing_file_and_bad_args(tmp_path, mono3):
    code, _ = run(["omega", "--spec", str(tmp_path / "nope.json"), "--r", "1"])
    assert code == 2
    assert run_command(["omega", "--spec", mono3], stdout=io.StringIO()) == 2
    code, _ = run(["area", "--spec", mono3, "--r", "-1", "--theta1", "0", "--alpha", "1"])
    assert code == 2


def test_strict_uncertified_exit_code(mono3):
    base = ["area", "--spec", mono3, "--r", "1", "--theta1", "0", "--alpha", "1", "--err", "1e-3",
            "--max-depth", "3"]
    code, out = run(base + ["--strict"])
    assert code == 3
    code, out = run(base)
    assert code == 0 and out["result"]["certified"] is False


def test_unsupported_representation_is_precondition(tmp_path):
    p = tmp_path / "fr.json"
    p.write_text('{"variant":"fryntov","T":10,"rho":0.5,"K":2}')
    code, out = run(["lemma", "--spec", str(p), "--theta1", "0", "--alpha", "1"])
    assert code == 2
    code, out = run(["omega", "--spec", str(p), "--r", "5"])
    assert code == 0 and out["result"]["omegaBig"] is None


def test_sweep_csv_written(tmp_path, mono3):
    out_csv = tmp_path / "s.csv"
    code, out = run(["sweep", "--spec", mono3, "--radii", "0.5,1", "--sectors", "3",
                     "--openings", "1", "--err", "4e-3", "--out", str(out_csv)])
    assert code == 0 and out["result"]["rows"] == 6
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "r,theta1,alpha,areaLow,areaHigh,omega,omegaBig,beta"
    assert len(lines) == 7
    first = lines[1].split(",")
    assert float(first[0]) == 0.5 and repr(float(first[3])) == first[3]


def test_console_module_entry(mono3):
    proc = subprocess.run([sys.executable, "-m", "argsector.cli", "omega", "--spec", mono3,
                           "--r", "2"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["zeroCount"] == 3
