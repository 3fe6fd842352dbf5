import json
import shutil
from pathlib import Path

import pytest

from hamloop.cli import main

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def _small_config():
    """Trimmed copy of the shipped winding-1 config for fast CLI runs."""
    cfg = json.loads((CONFIG_DIR / "winding1.json").read_text())
    cfg["tasks"] = [
        {"name": "winding", "loop": "w1"},
        {"name": "prop23", "loop": "w1"},
        {"name": "weinstein", "loop": "w1", "ball": 1},
        {"name": "lemma-help", "k": 2},
    ]
    cfg["numeric"]["resolution"] = 10
    cfg["numeric"]["time_panels"] = 64
    return cfg


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(_small_config()))
    return path


def test_run_winding1(small_config, tmp_path):
    out = tmp_path / "report.json"
    status = main(["run", "--config", str(small_config), "--out", str(out)])
    assert status == 0
    report = json.loads(out.read_text())
    assert report["windings"]["00:winding"] == 1
    assert report["all_passed"] is True
    assert report["conventions"] == {"volume": "omega^2/2", "reversal": "-H(2-t)"}
    assert all(c["passed"] for c in report["asserted_checks"])


def test_reports_are_byte_identical(small_config, tmp_path):
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert main(["run", "--config", str(small_config), "--out", str(out1)]) == 0
    assert main(["run", "--config", str(small_config), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_malformed_json_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"not json')
    assert main(["run", "--config", str(bad)]) == 2


def test_unknown_task_exits_2(tmp_path):
    cfg = _small_config()
    cfg["tasks"] = [{"name": "frobnicate"}]
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert main(["run", "--config", str(path)]) == 2


def test_overlapping_balls_exit_1(tmp_path):
    cfg = json.loads((CONFIG_DIR / "rank3.json").read_text())
    cfg["model"]["weights"][1]["center"] = [1.0, 0, 0, 0]
    cfg["tasks"] = [{"name": "rank", "loops": ["b1", "b2", "b3"]}]
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "report.json"
    assert main(["run", "--config", str(path), "--out", str(out)]) == 1
    report = json.loads(out.read_text())
    assert "GeometryError" in json.dumps(report["tasks"])


def test_explain_roundtrip(small_config, tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["run", "--config", str(small_config), "--out", str(out)]) == 0
    assert main(["explain", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "OK" in printed and "FAIL" not in printed


def test_explain_detects_tampering(small_config, tmp_path, capsys):
    out = tmp_path / "report.json"
    main(["run", "--config", str(small_config), "--out", str(out)])
    report = json.loads(out.read_text())
    edited = False
    for cert in report["certificates"]:
        for step in cert["trace"]:
            if step["kind"] == "equation" and not edited:
                for key in list(step["terms"]):
                    step["terms"][key] = "999"
                    edited = True
                    break
    assert edited
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(report))
    assert main(["explain", str(tampered)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_explain_single_certificate_file(tmp_path, capsys):
    from fractions import Fraction

    from hamloop.periodlat import PeriodLattice, infinite_order, weinstein_value

    cert = infinite_order(
        weinstein_value(1, 1, Fraction(50), 1), PeriodLattice.build([Fraction(10)], [1], 1)
    )
    path = tmp_path / "cert.json"
    cert.dump(path)
    assert main(["explain", str(path)]) == 0


def test_list_tasks(capsys):
    assert main(["list-tasks"]) == 0
    out = capsys.readouterr().out
    for name in ("verify-lemma21", "rank", "lemma-help", "flow-diagnostics"):
        assert name in out


def test_flag_overrides(small_config, tmp_path):
    out = tmp_path / "report.json"
    status = main(
        ["run", "--config", str(small_config), "--out", str(out), "--resolution", "8"]
    )
    assert status == 0
    report = json.loads(out.read_text())
    assert report["inputs"]["numeric"]["resolution"] == 8
