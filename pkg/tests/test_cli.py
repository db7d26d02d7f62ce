import csv
import json

import pytest

from spinlab.cli import InputError, _parse_sweep, dumps, failures, main
from spinlab.gerbe import FiniteNerve
from spinlab.torsor import icosphere, save_off


def run(tmp_path, *argv):
    out = tmp_path / "report.json"
    code = main(["--quiet", "--json", str(out), *argv])
    return code, (json.loads(out.read_text()) if out.exists() else None)


# exit codes


def test_torsor_mesh_file(tmp_path):
    mesh = tmp_path / "ico1280.off"
    save_off(icosphere(3), mesh)
    code, rep = run(tmp_path, "torsor", "--mesh", str(mesh))
    assert code == 0 and rep["ok"]
    assert rep["results"]["chern"]["value"] == 1 and rep["results"]["mesh"]["faces"] == 1280
    assert rep["results"]["iota_sq"]["value"] == -1


def test_missing_file_is_input_error(tmp_path, capsys):
    assert main(["--quiet", "torsor", "--mesh", str(tmp_path / "nope.off")]) == 2
    assert main(["--quiet", "fda", "--model", str(tmp_path / "nope.json")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_malformed_inputs(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["--quiet", "gerbe", "--nerve", str(bad), "--cochain", str(bad)]) == 2
    bad.write_text(json.dumps({"dims": {"V_H": 1}}))
    assert main(["--quiet", "fda", "--model", str(bad)]) == 2
    assert main(["--quiet", "witten", "--model", str(bad)]) == 2
    bad.write_text("[1, 2]")
    for cmd in (["fda", "--model"], ["witten", "--model"], ["gerbe", "--cochain", str(bad), "--nerve"]):
        assert main(["--quiet", *cmd, str(bad)]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["--quiet", "oscillator", "--t", "abc"])
    assert exc.value.code == 2


def test_verification_failure_exits_one(tmp_path):
    nerve = FiniteNerve.from_maximal([(0, 1, 2, 3)])
    (tmp_path / "n.json").write_text(json.dumps(nerve.to_json()))
    (tmp_path / "s.json").write_text(json.dumps({"degree": 2, "values": [[[0, 1, 2], -1]]}))
    code, rep = run(tmp_path, "gerbe", "--nerve", str(tmp_path / "n.json"), "--cochain", str(tmp_path / "s.json"))
    assert code == 1 and not rep["ok"]
    assert "cocycle" in rep["failures"]
    assert rep["results"]["cocycle"]["failures"] == [[0, 1, 2, 3]]


def test_gerbe_trivializes_coboundary(tmp_path):
    nerve = FiniteNerve.from_maximal([(0, 1, 2), (1, 2, 3)])
    (tmp_path / "n.json").write_text(json.dumps(nerve.to_json()))
    (tmp_path / "s.json").write_text(json.dumps({"degree": 2, "values": [[[0, 1, 2], -1]]}))
    code, rep = run(tmp_path, "gerbe", "--nerve", str(tmp_path / "n.json"), "--cochain", str(tmp_path / "s.json"), "--trivialize")
    assert code == 0 and rep["results"]["trivialization"]["trivial"]


def test_fda_failing_model_exits_one(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"dims": {"V_H": 1, "V_R": 1, "W_H": 0}, "nonlinearity": {"name": "linear"}}))
    code, rep = run(tmp_path, "fda", "--model", str(path), "--check", "axioms")
    assert code == 1 and rep["failures"] == ["axioms", "axioms.9"]


# determinism and report shape


def test_same_seed_same_bytes(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["--quiet", "--seed", "7", "--json", str(p), "torsor", "--level", "2", "--samples", "10"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_dumps_handles_numpy_and_tuples():
    import numpy as np

    text = dumps({"b": np.float64(1.5), "a": {(1, 2): np.arange(2)}, "c": complex(1, -1)})
    assert json.loads(text) == {"a": {"1,2": [0, 1]}, "b": 1.5, "c": [1.0, -1.0]}


def test_failures_collects_paths():
    assert failures({"ok": True, "x": {"ok": False, "y": {"ok": False}}}) == ["x", "x.y"]


# witten sweeps


def test_parse_sweep():
    assert _parse_sweep("4:2:6") == [4.0, 8.0, 16.0, 32.0, 64.0, 128.0]
    for bad in ("4:2", "a:2:3", "4:2:0", "-1:2:3"):
        with pytest.raises(InputError):
            _parse_sweep(bad)


def test_witten_model_file(tmp_path):
    model = {"name": "tame1d", "interval": [-6, 6], "N": 1200, "potential": [0.0, 1.0], "F": [[-0.5, 0.5]], "lambda_bar": 1.0, "T": 4.0}
    path = tmp_path / "tame1d.json"
    path.write_text(json.dumps(model))
    out = tmp_path / "loc.json"
    table = tmp_path / "sweep.csv"
    code = main(["--quiet", "witten", "--model", str(path), "--t-sweep", "4:2:6", "--report", str(out), "--csv", str(table)])
    rep = json.loads(out.read_text())
    assert code == 0 and rep["ok"]
    sweep = rep["results"]["tame1d"]["sweep"]
    assert [r["t"] for r in sweep] == [4.0, 8.0, 16.0, 32.0, 64.0, 128.0]
    rows = list(csv.DictReader(table.open()))
    assert len(rows) == 6 and rows[0]["model"] == "tame1d"


def test_witten_standard_model(tmp_path):
    code, rep = run(tmp_path, "witten", "--model", "linear", "--t-sweep", "5:2:3")
    assert code == 0
    assert rep["results"]["linear"]["sweep"][-1]["distance"] < 0.1


def test_threads_env(monkeypatch):
    import os

    from spinlab import cli

    monkeypatch.setenv("SPINLAB_THREADS", "1")
    for var in cli._THREAD_VARS:
        monkeypatch.delenv(var, raising=False)
    cli._cap_threads()
    assert all(os.environ[v] == "1" for v in cli._THREAD_VARS)


@pytest.mark.slow
def test_all(tmp_path):
    code, rep = run(tmp_path, "all")
    assert code == 0, rep["failures"]
    assert set(rep["results"]) == {"quat-reps", "oscillator", "witten", "torsor", "fda", "gerbe"}
