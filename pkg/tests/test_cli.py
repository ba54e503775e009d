import hashlib
import json

import pytest

from fhspec.cli import build_parser, load_config, main


def _run(tmp_path, *args):
    return main(list(args) + ["--output-dir", str(tmp_path)])


def _manifest(tmp_path):
    return json.loads((tmp_path / "manifest.json").read_text())


def test_spectrum(tmp_path, capsys):
    assert _run(tmp_path, "spectrum", "--alpha", "0.3333333333333333", "--beta", "-0.5", "--n", "160") == 0
    man = _manifest(tmp_path)
    names = {f["path"] for f in man["files"]}
    assert names == {"spectrum.csv", "symbol_curve.csv"}
    for f in man["files"]:
        digest = hashlib.sha256((tmp_path / f["path"]).read_bytes()).hexdigest()
        assert digest == f["sha256"]
    assert man["config"]["n"] == 160 and man["version"]
    assert json.loads(capsys.readouterr().out)["status"] == "ok"


def test_build_and_momenta(tmp_path):
    assert _run(tmp_path / "b", "build", "--n", "8") == 0
    assert _run(tmp_path / "m", "momenta", "--n", "64") == 0
    rows = (tmp_path / "m" / "momenta.csv").read_text().splitlines()
    assert len(rows) == 65


def test_sweep_deterministic(tmp_path, monkeypatch):
    args = ["sweep", "--n", "48", "--sigma-max", "0.3", "--points", "7", "--seed", "42"]
    monkeypatch.setenv("FHSPEC_THREADS", "1")
    assert _run(tmp_path / "a", *args) == 0
    monkeypatch.setenv("FHSPEC_THREADS", "4")
    assert _run(tmp_path / "b", *args) == 0
    fa = {f["path"]: f["sha256"] for f in _manifest(tmp_path / "a")["files"]}
    fb = {f["path"]: f["sha256"] for f in _manifest(tmp_path / "b")["files"]}
    assert fa == fb


def test_rank1_and_localize(tmp_path):
    assert _run(tmp_path / "r", "rank1", "--n", "48", "--family", "jj", "--index", "2", "--sigma-max", "5",
                "--points", "20") == 0
    census = json.loads((tmp_path / "r" / "census.json").read_text())
    assert census["family"] == "jj" and census["index"] == 2
    assert _manifest(tmp_path / "r")["config"]["sigma_grid"]["spacing"] == "geometric"
    assert _run(tmp_path / "l", "localize", "--n", "48", "--sigma-max", "0.3", "--points", "7") == 0
    assert (tmp_path / "l" / "archetypes.json").exists()


def test_freeprob(tmp_path):
    assert _run(tmp_path, "freeprob", "--n", "32", "--sigma", "1.0", "--trials", "3") == 0
    assert set(_manifest(tmp_path)["summary"]["distances"]) == {"free_Re", "classical_Re", "free_Im", "classical_Im"}


@pytest.mark.parametrize("args", [
    ["sweep", "--n", "1"],
    ["sweep", "--alpha", "-0.7"],
    ["build", "--n", "100000"],
    ["rank1", "--n", "16", "--index", "9"],
    ["freeprob", "--trials", "0"],
])
def test_validation_exit_code(tmp_path, capsys, args):
    assert _run(tmp_path, *args) == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and json.loads(err[0])["exit_code"] == 2


def test_bad_flag_exit_code(tmp_path):
    assert _run(tmp_path, "rank1", "--family", "kk") == 2


def test_numerical_failure_exit_code(tmp_path, capsys):
    # alpha = 0, beta = 1 gives a nilpotent matrix: numerically multiple spectrum
    assert _run(tmp_path, "spectrum", "--alpha", "0", "--beta", "1", "--n", "8") == 3
    assert json.loads(capsys.readouterr().err)["type"] == "DegeneracyError"


def test_config_precedence(tmp_path):
    cfg_path = tmp_path / "c.json"
    cfg_path.write_text(json.dumps({"n": 32, "seed": 7, "sigma_grid": {"max": 0.2, "points": 5}}))
    args = build_parser().parse_args(["sweep", "--config", str(cfg_path), "--n", "24"])
    cfg = load_config(args)
    assert cfg.n == 24 and cfg.seed == 7 and cfg.sigma_grid.max == 0.2 and cfg.sigma_grid.points == 5
    assert cfg.alpha == pytest.approx(1 / 3)


def test_bad_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"nn": 3}))
    assert main(["sweep", "--config", str(p), "--output-dir", str(tmp_path)]) == 2
    p.write_text("[1, 2]")
    assert main(["sweep", "--config", str(p), "--output-dir", str(tmp_path)]) == 2
