from pathlib import Path

import pytest

from genesyst.cli import main

DATA = Path(__file__).parent / "data"
MCH = str(DATA / "parking.mch")
REF = str(DATA / "parking_r1.ref")


def test_generate(tmp_path):
    rc = main(["generate", MCH, "--bound", "NbPlaces=1..3", "--format", "dot,inter",
               "--out", str(tmp_path)])
    assert rc == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == [
        "parking.dot", "parking.lts", "parking.po.txt"]
    report = (tmp_path / "parking.po.txt").read_text().splitlines()
    assert report[1] == "cover cover Valid simplifier"
    assert all(len(line.split()) >= 4 for line in report[1:])


def test_refine(tmp_path):
    rc = main(["refine", REF, "--abstract", MCH, "--bound", "NbPlaces=1..3",
               "--format", "dot", "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "parking_r1.dot").read_text().count("subgraph") == 3


def test_conform(capsys):
    assert main(["conform", MCH, "--instantiate", "NbPlaces=1"]) == 0
    out = capsys.readouterr().out
    assert "CHECK soundness PASS" in out
    assert "FAIL" not in out


def test_conform_refinement_range(capsys):
    assert main(["conform", REF, "--abstract", MCH, "--instantiate", "NbPlaces=1..3"]) == 0
    assert "CHECK coverage-union PASS" in capsys.readouterr().out


def test_strict(tmp_path, capsys):
    assert main(["generate", MCH, "--out", str(tmp_path), "--strict"]) == 1
    assert "kept by default" in capsys.readouterr().err


def test_spec_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.mch"
    bad.write_text(Path(MCH).read_text().replace("THEN cc := 0 END", "THEN cc := END"))
    assert main(["generate", str(bad), "--out", str(tmp_path)]) == 1
    assert "bad.mch" in capsys.readouterr().err


def test_io_error_exit(tmp_path):
    assert main(["generate", str(tmp_path / "missing.mch")]) == 3


def test_refine_needs_abstract():
    with pytest.raises(SystemExit) as exc:
        main(["refine", REF])
    assert exc.value.code == 1


def test_time_budget_env(tmp_path, monkeypatch):
    monkeypatch.setenv("GENESYS_TIME_BUDGET_MS", "2000")
    assert main(["generate", MCH, "--bound", "NbPlaces=1..3", "--out", str(tmp_path)]) == 0
    monkeypatch.setenv("GENESYS_TIME_BUDGET_MS", "soon")
    assert main(["generate", MCH, "--out", str(tmp_path)]) == 1


def test_export_po(tmp_path):
    assert main(["export-po", MCH, "--out", str(tmp_path)]) == 0
    assert (tmp_path / "cover.smt2").exists()
    lines = (tmp_path / "parking.obligations.txt").read_text().splitlines()
    assert lines[0].startswith("PO cover cover HYP ")
    assert " GOAL cc=-1 or cc=0 or cc=1" in lines[0]
