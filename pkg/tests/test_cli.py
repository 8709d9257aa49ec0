import json

import pytest

from craftplan.cli import main


def test_learn_eval_compare(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"agent": "REPOA", "horizon": 100,
                               "provider": {"kind": "oracle", "noise": "zero"}}))
    assert main(["learn", "--config", str(cfg), "--seeds", "0,1", "--out", str(tmp_path / "run")]) == 0
    assert "seed 1: final EGA" in capsys.readouterr().out
    assert main(["eval", "--config", str(cfg), "--seeds", "0", "--out", str(tmp_path / "run")]) == 0
    assert "SR 67/67" in capsys.readouterr().out
    assert main(["compare", "--runs", str(tmp_path / "run"), "--out", str(tmp_path / "cmp")]) == 0
    assert (tmp_path / "cmp" / "ega_curves.csv").exists()
    assert (tmp_path / "cmp" / "sr_by_group.csv").exists()


def test_emit_plots(tmp_path):
    pytest.importorskip("matplotlib")
    assert main(["learn", "--seeds", "0", "--out", str(tmp_path / "run")]) == 0
    assert main(["emit-plots", "--run", str(tmp_path / "run")]) == 0
    assert (tmp_path / "run" / "report" / "ega.png").stat().st_size > 0


def test_bad_config_exits_2(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"agent": "nobody"}))
    assert main(["learn", "--config", str(cfg), "--out", str(tmp_path / "x")]) == 2
    assert "error:" in capsys.readouterr().err
    assert main(["learn", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 2
