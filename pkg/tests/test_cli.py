import json

from weaving.cli import main
from weaving.decomposition import EventLog


def test_bad_genus(capsys):
    assert main(["run", "--genus", "1"]) == 2
    assert "g >= 2" in capsys.readouterr().err


def test_unknown_command():
    assert main(["weave-it"]) == 2


def test_verify(tmp_path, capsys):
    report = tmp_path / "r.json"
    assert main(["verify", "--genus", "5", "--report", str(report)]) == 0
    rep = json.loads(report.read_text())
    assert rep["ok"] and rep["strands"] == 35 and rep["final_blocks"] == 9
    assert "35 strands" in capsys.readouterr().out


def test_run_writes_log(tmp_path):
    log, rep = tmp_path / "log.jsonl", tmp_path / "rep.json"
    assert main(["run", "-g", "3", "--dual-sod", "--emit-log", str(log),
                 "--report", str(rep)]) == 0
    events = EventLog.from_jsonl(log.read_text())
    assert events.to_jsonl() == log.read_text()
    data = json.loads(rep.read_text())
    assert data["final_blocks"] == 5 and data["dual_external_citations"] > 0


def test_run_single_stage(tmp_path, capsys):
    assert main(["run", "-g", "4", "--stage", "twill", "--mode", "corollary28"]) == 0
    assert "twill" in capsys.readouterr().out


def test_render_and_braid(tmp_path):
    svg, lay, br = tmp_path / "a.svg", tmp_path / "a.json", tmp_path / "b.json"
    assert main(["render", "-g", "3", "--out", str(svg), "--layout-json", str(lay)]) == 0
    assert svg.read_bytes().count(b'class="crossing"') == 100
    assert len(json.loads(lay.read_text())) == 4
    assert main(["braid", "-g", "3", "--out", str(br)]) == 0
    assert json.loads(br.read_text())["length"] == 100


def test_oracle(capsys):
    assert main(["oracle", "crossings", "-g", "4", "--compare"]) == 0
    assert capsys.readouterr().out.strip() == "95"


def test_engine_failure_is_exit_1():
    # later stages refuse the corollary28 twill output
    assert main(["run", "-g", "3", "--mode", "corollary28"]) == 1
