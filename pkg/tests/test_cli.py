import json
import math
import subprocess
import sys

import pytest

from symgm.cli import main

W_DOC = {"dim": 2, "kets": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]], "mults": [2, 1]}


@pytest.fixture
def w_file(tmp_path):
    path = tmp_path / "w.json"
    path.write_text(json.dumps(W_DOC))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gm_json(capsys, w_file):
    code, out, _ = run(capsys, "gm", w_file, "--json")
    assert code == 0
    doc = json.loads(out)
    assert list(doc)[:5] == ["N", "dim", "perm_A", "lambda_sq", "gm_bits"]
    assert doc["gm_bits"] == pytest.approx(math.log2(9 / 4))
    assert doc["saturated"] is True


def test_nats_flag(capsys, w_file):
    _, out, _ = run(capsys, "gm", w_file, "--json", "--nats")
    assert json.loads(out)["gm_nats"] == pytest.approx(math.log(9 / 4))


def test_perm_dicke(capsys):
    code, out, _ = run(capsys, "perm", "--dicke", "1", "1", "1", "1", "--theta", "0", "--format", "json")
    assert code == 0
    assert json.loads(out)["perm_A"] == pytest.approx(4.0)


def test_sic_scan_two_points(capsys, tmp_path):
    out_file = tmp_path / "scan.csv"
    code, out, _ = run(capsys, "sic-scan", "--dim", "3", "--points", "2", "--out", str(out_file))
    assert code == 0 and out == ""
    lines = out_file.read_text().splitlines()
    assert lines[0] == "t,perm_A,G_bits"
    assert len(lines) == 3


def test_text_and_csv_formats(capsys):
    _, text, _ = run(capsys, "compat", "--theta", "1.5707963267948966", "--freqs", "0.5", "0.5", "1", "0")
    assert text.startswith("compatible: True")
    _, csv, _ = run(capsys, "compat", "--freqs", "1", "0", "1", "0", "--format", "csv")
    assert csv.startswith("compatible,False")


@pytest.mark.parametrize(
    "argv, code",
    [
        (["gm", "/nonexistent.json"], 2),
        (["compat", "--freqs", "0.2", "0.2", "0.5", "0.5"], 2),
        (["mubs", "--dim", "4"], 2),
        (["sic", "--dim", "5"], 2),
    ],
)
def test_error_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_majorana_requires_qubits(capsys, tmp_path):
    path = tmp_path / "q.json"
    path.write_text(json.dumps({"dim": 3, "kets": [[[1, 0], [0, 0], [0, 0]]]}))
    assert run(capsys, "majorana", str(path))[0] == 2


def test_argparse_errors_exit_two():
    with pytest.raises(SystemExit) as exc:
        main(["dicke", "--theta", "1"])
    assert exc.value.code == 2


def test_module_entry_point(w_file):
    out = subprocess.run(
        [sys.executable, "-m", "symgm", "majorana", w_file, "--json"], capture_output=True, text=True, check=True
    )
    assert json.loads(out.stdout)["half_sphere"] is True
