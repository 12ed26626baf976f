import json
import subprocess
import sys

import numpy as np
import pytest

from kdrep.cli import (
    EXIT_CHECK_FAILED,
    EXIT_FRAME,
    EXIT_NEGATIVE,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_VALIDATION,
    main,
)
from kdrep.fileio import bundled_names, matrix_to_json


def _write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def _qubit_doc(**extra):
    doc = {"schema_version": 1, "systems": [{"name": "A", "dim": 2}]}
    doc.update(extra)
    return doc


def test_bundled_fragments_are_listed():
    assert {"classical", "pauli", "qubit_zx", "ypsilon"} <= set(bundled_names())


def test_represent_prints_state_table(capsys):
    assert main(["represent", "bundled:qubit_zx"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "object,i,i_prime,re,im"
    assert lines[1] == "state0,0,0,0.5,0.0"


def test_represent_writes_tables(tmp_path):
    out = tmp_path / "rep"
    assert main(["represent", "bundled:qubit_zx", "--out", str(out)]) == EXIT_OK
    assert sorted(p.name for p in out.iterdir()) == ["channels.csv", "effects.csv", "report.json", "states.csv"]
    channels = (out / "channels.csv").read_text().splitlines()
    assert channels[0] == "object,i,i_prime,j,j_prime,re,im"
    assert len(channels) == 1 + 16  # one 4x4 Gamma
    report = json.loads((out / "report.json").read_text())
    assert report["meta"]["command"] == "represent"
    assert report["frames"][0]["name"] == "frame_A"


def test_represent_is_byte_identical(tmp_path):
    for run in ("a", "b"):
        assert main(["represent", "bundled:classical", "--out", str(tmp_path / run)]) == EXIT_OK
    for name in ("states.csv", "effects.csv", "channels.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_malformed_json_exits_2_without_output(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1, "systems": [')
    out = tmp_path / "out"
    assert main(["represent", str(bad), "--out", str(out)]) == EXIT_PARSE
    assert not out.exists()
    assert "parse error" in capsys.readouterr().err


@pytest.mark.parametrize(
    "doc",
    [
        {"schema_version": 2, "systems": [{"name": "A", "dim": 2}]},
        {"schema_version": 1, "systems": []},
        _qubit_doc(states=[{"name": "s"}]),
        _qubit_doc(states=[{"name": "s", "matrix": [[1, 0], [0]]}]),
    ],
)
def test_schema_errors_exit_2(tmp_path, doc):
    assert main(["certify", _write(tmp_path / "f.json", doc)]) == EXIT_PARSE


def test_mislabelled_channel_exits_3(tmp_path, capsys):
    doc = _qubit_doc(channels=[{"name": "leaky", "kraus": [matrix_to_json(0.5 * np.eye(2))]}])
    path = _write(tmp_path / "leaky.json", doc)
    out = tmp_path / "out"
    assert main(["verify", path, "--out", str(out)]) == EXIT_VALIDATION
    err = capsys.readouterr().err
    assert "Kraus-completeness residual" in err and "7.500e-01" in err
    assert not out.exists()


def test_invalid_state_and_unknown_system_exit_3(tmp_path):
    doc = _qubit_doc(states=[{"name": "s", "matrix": matrix_to_json(np.eye(2))}])
    assert main(["represent", _write(tmp_path / "a.json", doc)]) == EXIT_VALIDATION
    doc = _qubit_doc(states=[{"name": "s", "systems": ["B"], "matrix": matrix_to_json(np.eye(2) / 2)}])
    assert main(["represent", _write(tmp_path / "b.json", doc)]) == EXIT_VALIDATION
    assert main(["represent", "bundled:qubit_zx", "--frame", "nope"]) == EXIT_VALIDATION


def test_orthogonal_frame_exits_4(tmp_path, capsys):
    eye = [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]
    doc = _qubit_doc(
        frames=[{"name": "zz", "system": "A", "basis_a": eye, "basis_a_prime": eye}],
        states=[{"name": "s", "matrix": matrix_to_json(np.eye(2) / 2)}],
    )
    assert main(["represent", _write(tmp_path / "f.json", doc)]) == EXIT_FRAME
    assert "inadmissible frame" in capsys.readouterr().err


def test_certify_verdicts(tmp_path):
    assert main(["certify", "bundled:classical"]) == EXIT_OK
    out = tmp_path / "y"
    assert main(["certify", "bundled:ypsilon", "--out", str(out)]) == EXIT_NEGATIVE
    report = json.loads((out / "report.json").read_text())
    cert = report["certification"]
    assert cert["verdict"] == "NEGATIVE"
    assert abs(cert["max_abs_imag"] - 0.25) <= 1e-9
    assert cert["worst_offender"]["index"] == "0,0"
    assert report["negativity"]["total_imaginarity"] == pytest.approx(1.0)
    assert main(["certify", "bundled:ypsilon", "--tol", "1.0"]) == EXIT_OK
    assert main(["certify", "bundled:pauli", "--tol", "1.0"]) == EXIT_OK


def test_certify_falls_back_to_computational_fourier(tmp_path):
    # no frames listed: the qubit default is the computational / Fourier pair
    doc = _qubit_doc(states=[{"name": "s", "matrix": matrix_to_json(np.diag([1.0, 0.0]))}])
    assert main(["certify", _write(tmp_path / "f.json", doc)]) == EXIT_OK


def test_verify_random_battery(capsys):
    code = main(["verify", "--random", "--suite", "all", "--seed", "7", "--trials", "100"])
    captured = capsys.readouterr()
    assert code == EXIT_OK
    assert "FAIL" not in captured.err
    assert captured.out.startswith("suite,check,trials,max_deviation,tolerance,result")


def test_verify_random_region_sweep(tmp_path):
    out = tmp_path / "region"
    code = main(["verify", "--random", "--suite", "region", "--trials", "2000", "--dims", "2,3,4",
                 "--out", str(out)])
    assert code == EXIT_OK
    checks = json.loads((out / "report.json").read_text())["checks"]
    margin = next(c for c in checks if c["name"] == "region_margin")
    assert margin["detail"]["min_margin"] >= -1e-9


def test_verify_fragment_file():
    assert main(["verify", "bundled:qubit_zx"]) == EXIT_OK


def test_verify_reports_failures(tmp_path, monkeypatch):
    import kdrep.cli as cli

    monkeypatch.setitem(cli.SUITE_TOLERANCES, "born", 1e-30)
    assert main(["verify", "--random", "--suite", "born", "--trials", "5"]) == EXIT_CHECK_FAILED


def test_verify_argument_errors():
    assert main(["verify"]) == EXIT_PARSE
    assert main(["verify", "bundled:qubit_zx", "--random"]) == EXIT_PARSE
    assert main(["verify", "--random", "--dims", "1"]) == EXIT_PARSE
    assert main(["verify", "--random", "--suite", "nonsense"]) == EXIT_PARSE


def test_verify_is_deterministic(tmp_path):
    for run in ("a", "b"):
        args = ["verify", "--random", "--suite", "all", "--seed", "3", "--trials", "10", "--dims", "2,3",
                "--out", str(tmp_path / run)]
        assert main(args) == EXIT_OK
    assert (tmp_path / "a" / "checks.csv").read_bytes() == (tmp_path / "b" / "checks.csv").read_bytes()


def test_search_witness_round_trip(tmp_path, capsys):
    out = tmp_path / "s"
    args = ["search", "bundled:classical", "--mode", "nonneg", "--restarts", "2", "--seed", "1",
            "--out", str(out)]
    assert main(args) == EXIT_OK
    assert "best_objective" in capsys.readouterr().out
    result = json.loads((out / "result.json").read_text())
    assert result["best_objective"] <= 1e-9
    assert result["certified"] == "NONNEGATIVE"
    frames = json.loads((out / "frames.json").read_text())
    assert frames["frames"][0]["name"] == "witness_A"
    assert main(["certify", "bundled:classical", "--frames", str(out / "frames.json")]) == EXIT_OK
    # the witness file also re-serialises to the same bytes
    again = tmp_path / "t"
    assert main(["search", "bundled:classical", "--mode", "nonneg", "--restarts", "2", "--seed", "1",
                 "--out", str(again)]) == EXIT_OK
    assert (again / "frames.json").read_bytes() == (out / "frames.json").read_bytes()
    assert (again / "trace.csv").read_bytes() == (out / "trace.csv").read_bytes()


def test_search_extremal_prints_value(tmp_path, capsys):
    out = tmp_path / "e"
    args = ["search", "--mode", "max-imag", "--restarts", "3", "--seed", "1", "--out", str(out)]
    assert main(args) == EXIT_OK
    first = capsys.readouterr().out.splitlines()[0]
    assert first.startswith("best_value = ")
    assert float(first.split("=")[1]) >= 0.2499
    result = json.loads((out / "result.json").read_text())
    assert result["bases"]["name"] == "extremal"
    assert result["diagnostics"]["max_imag_seen"] <= 0.25 + 1e-9


def test_search_nonneg_needs_input():
    assert main(["search", "--mode", "nonneg"]) == EXIT_PARSE


def test_max_dim_override(tmp_path, monkeypatch):
    doc = {"schema_version": 1, "systems": [{"name": "A", "dim": 3}],
           "states": [{"name": "s", "matrix": matrix_to_json(np.eye(3) / 3)}]}
    path = _write(tmp_path / "q.json", doc)
    assert main(["represent", path]) == EXIT_OK
    monkeypatch.setenv("KDREP_MAX_DIM", "2")
    assert main(["represent", path]) == EXIT_VALIDATION
    assert main(["represent", "bundled:qubit_zx"]) == EXIT_OK


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "kdrep.cli", "certify", "bundled:ypsilon"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == EXIT_NEGATIVE
    assert proc.stderr.startswith("NEGATIVE max_abs_imag=0.25")
