import json

import pytest

from latpoly.cli import main
from latpoly.core.config import settings
from latpoly.core.errors import EXIT_CONFIG_ERROR, EXIT_CRITERION_FAILED, EXIT_OK, RationalAlpha


def test_count_prints_json(capsys):
    assert main(["count", "--polytope", "cross d=2 a=[1, 1]", "--t", "1"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == {"count": 5, "boundary_hits": 4, "certified": True}


def test_count_brute_force_agrees(capsys):
    assert main(["count", "--polytope", "simplex d=2 a=[sqrt(2), 1/2]", "--t", "7/2"]) == EXIT_OK
    fast = json.loads(capsys.readouterr().out)
    assert main(["count", "--polytope", "simplex d=2 a=[sqrt(2), 1/2]", "--t", "7/2", "--brute-force"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["count"] == fast["count"]


def test_invalid_input_maps_to_config_exit_code(capsys):
    assert main(["count", "--polytope", "sphere d=2 a=[1, 1]", "--t", "1"]) == EXIT_CONFIG_ERROR
    assert main(["count", "--polytope", "cross d=2 a=[1, 1]", "--t", "-1"]) == EXIT_CONFIG_ERROR
    assert main(["count", "--polytope", "standard d=2", "--t", "1", "--brute-force"]) == EXIT_CONFIG_ERROR
    assert capsys.readouterr().out == ""


def test_unknown_subcommand_exits():
    with pytest.raises(SystemExit):
        main(["integrate"])


def test_poly(capsys):
    assert main(["poly", "--axes", "[1, 1]", "--digits", "10"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["kind"] == "cross"
    assert report["coefficients"][0]["decimal"].startswith("0.66666666")


def test_fourier(capsys):
    args = ["fourier", "--simplex", "standard d=2", "--y", "[1, 2]", "--t", "3/2"]
    assert main(args + ["--method", "closed-form"]) == EXIT_OK
    closed = json.loads(capsys.readouterr().out)
    assert main(args) == EXIT_OK
    residues = json.loads(capsys.readouterr().out)
    assert closed["method"] == "closed-form"
    assert residues["re"] == pytest.approx(closed["re"], abs=1e-12)
    assert residues["im"] == pytest.approx(closed["im"], abs=1e-12)


def test_cesaro_table(capsys):
    assert main(["cesaro", "--axes", "[1]", "--t", "5/2", "--N", "8,32"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "N,Ces,count,E_N,gap"
    assert [line.split(",")[0] for line in lines[1:]] == ["8", "32"]
    for line in lines[1:]:
        _, ces, count, _, gap = line.split(",")
        assert count == "5"
        assert float(ces) == pytest.approx(5.0, abs=1e-9)
        assert abs(float(gap)) < 1e-9


def test_dioph_to_stdout(capsys):
    assert main(["dioph", "--alphas", "[sqrt(2)]", "--m-max", "3", "--checkpoints", "1,2,3"]) == EXIT_OK
    table, fit = capsys.readouterr().out.split("\n\n")
    rows = table.splitlines()
    assert rows[0] == "M,S,L_M"
    assert float(rows[-1].split(",")[1]) == pytest.approx(12.364, abs=1e-3)
    assert json.loads(fit)["n"] == 2


def test_dioph_to_files(tmp_path, capsys):
    prefix = str(tmp_path / "golden")
    assert main(["dioph", "--alphas", "[1/2+1/2*sqrt(5)]", "--m-max", "200", "--output", prefix]) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert (tmp_path / "golden.csv").read_text().startswith("M,S,L_M\n")
    assert json.loads((tmp_path / "golden.json").read_text())["slope"] > 0


def test_dioph_rational_alpha_fails():
    assert main(["dioph", "--alphas", "[1/2]", "--m-max", "10"]) == RationalAlpha.exit_code


def test_ehrhart(capsys):
    assert main(["ehrhart", "--axes", "1,1,1"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["coefficients"] == ["1", "11/6", "1", "1/6"]
    assert report["match"] is True


def test_scan_from_config(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(settings, "elasticsearch_url", "")
    config = tmp_path / "scan.env"
    config.write_text('POLYTOPE="cross d=2 a=[1, 1]"\nT_START=1\nT_STOP=3\nT_COUNT=3\n')
    assert main(["scan", "--config", str(config), "--workers", "1"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "t,count,main_term,delta,certified"
    assert [line.split(",")[1] for line in lines[1:]] == ["5", "13", "25"]


def test_scan_missing_config(tmp_path):
    assert main(["scan", "--config", str(tmp_path / "nope.env")]) == EXIT_CONFIG_ERROR


def test_report_exit_codes(tmp_path, monkeypatch):
    from latpoly import campaigns

    assert main(["report", "slab-lemma", "--quick", "--out-dir", str(tmp_path)]) == EXIT_OK
    monkeypatch.setitem(campaigns.CAMPAIGNS, "slab-lemma", lambda ctx: ctx.criterion("roto", False))
    assert main(["report", "slab-lemma", "--out-dir", str(tmp_path)]) == EXIT_CRITERION_FAILED
