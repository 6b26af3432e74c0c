# -*- coding: utf-8 -*-

import json
import os

import pytest

from plugins.module_utils.ris import __version__
from plugins.module_utils.ris.cli import build_parser, main

ARRAY_1X1 = {
    "version": 1,
    "band": "mmwave",
    "seed": 1,
    "array": {"rows": 1, "cols": 1, "spacing": 0.005, "frequency": 28e9},
    "grid": {"theta_step": 5},
}


def test_synth_array_writes_outputs(tmp_path, write_config):
    out = tmp_path / "net"
    assert main(["synth-array", "--config", write_config(ARRAY_1X1), "--out", str(out)]) == 0
    assert json.loads((out / "network.json").read_text())["z"] == [[50.0, 0.0]]
    assert (out / "patterns" / "port_001.csv").exists()
    assert main(["-q", "synth-array", "--config", write_config(ARRAY_1X1), "--out", str(out)]) == 0


def test_output_dir_defaults_next_to_config(tmp_path, write_config):
    doc = dict(ARRAY_1X1, output_dir="results")
    assert main(["synth-array", "--config", write_config(doc)]) == 0
    assert (tmp_path / "results" / "network.json").exists()


def test_non_passive_network_exits_2(tmp_path, write_config, capsys):
    doc = dict(ARRAY_1X1, array=dict(ARRAY_1X1["array"], rows=2, spacing=0.0053534, coupling_strength=10.0))
    assert main(["synth-array", "--config", write_config(doc), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert err.startswith("error: ")
    assert "non-passive network" in err
    assert not (tmp_path / "network.json").exists()


def test_bad_config_exits_2(tmp_path, write_config, capsys):
    assert main(["steer", "--config", write_config(dict(ARRAY_1X1, band="lte"))]) == 2
    assert "band" in capsys.readouterr().err
    assert main(["steer", "--config", str(tmp_path / "missing.json")]) == 2


def test_steer_with_an_invalid_target_exits_0(tmp_path, write_config, caplog):
    doc = dict(ARRAY_1X1, steering={"targets": [0.0, 100.0]})
    out = tmp_path / "steer"
    assert main(["steer", "--config", write_config(doc), "--out", str(out)]) == 0
    report = (out / "steering_report.csv").read_text().splitlines()
    assert len(report) == 3
    assert report[1].startswith("0.0,")
    assert "outside [-90, 90]" in report[2]
    assert "skipped" in caplog.text


def test_infeasible_topology_exits_3(tmp_path, reference_config, write_config, capsys):
    doc = reference_config("toy_topology.json")
    doc["topology"] = dict(doc["topology"], switches=3)
    doc["ga"] = dict(doc["ga"], init_attempts=2)
    assert main(["optimize-topology", "--config", write_config(doc), "--out", str(tmp_path / "o")]) == 3
    assert "infeasible population" in capsys.readouterr().err


def test_psi_verb(tmp_path, files_dir):
    out = tmp_path / "psi"
    argv = ["psi", "--circuit", os.path.join(files_dir, "psi_a.json"), "--circuit",
            os.path.join(files_dir, "psi_b.json"), "--start", "27e9", "--stop", "29e9", "--points", "21",
            "--out", str(out)]
    assert main(argv) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["elements"] == 2
    assert len((out / "sweep.csv").read_text().splitlines()) == 22


def test_psi_bad_sweep_exits_2(tmp_path, files_dir, capsys):
    argv = ["psi", "--circuit", os.path.join(files_dir, "psi_28ghz.json"), "--start", "5e9", "--stop", "1e9",
            "--out", str(tmp_path)]
    assert main(argv) == 2
    assert "start < stop" in capsys.readouterr().err


def test_subtract_verb(tmp_path, files_dir):
    traces = os.path.join(files_dir, "traces")
    argv = ["subtract", "--total", os.path.join(traces, "total.csv"), "--env", os.path.join(traces, "env.csv"),
            "--out", str(tmp_path)]
    assert main(argv) == 0
    with open(os.path.join(traces, "scat_golden.csv"), encoding="utf-8") as f:
        assert (tmp_path / "scat.csv").read_text() == f.read()


def test_subtract_incompatible_traces(tmp_path, files_dir, capsys):
    traces = os.path.join(files_dir, "traces")
    shifted = tmp_path / "env.csv"
    with open(os.path.join(traces, "env.csv"), encoding="utf-8") as f:
        shifted.write_text(f.read().replace("# freq_hz=28000000000.0", "# freq_hz=3500000000.0"))
    argv = ["subtract", "--total", os.path.join(traces, "total.csv"), "--env", str(shifted), "--out", str(tmp_path)]
    assert main(argv) == 2
    assert "incompatible traces: frequencies differ" in capsys.readouterr().err


def test_metrics_verb(tmp_path, write_config):
    assert main(["synth-array", "--config", write_config(ARRAY_1X1), "--out", str(tmp_path)]) == 0
    pattern = str(tmp_path / "patterns" / "port_001.csv")
    assert main(["metrics", "--pattern", pattern, "--out", str(tmp_path / "m")]) == 0
    assert json.loads((tmp_path / "m" / "metrics.json").read_text())["peak_theta_deg"] == 0.0
    assert main(["metrics", "--pattern", str(tmp_path / "patterns" / "oc.csv"), "--out", str(tmp_path)]) == 2


def test_independence_verb(tmp_path, files_dir):
    config = os.path.join(files_dir, "independence_reference.json")
    assert main(["independence", "--config", config, "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "independence.json").read_text())
    assert summary["max_deviation_db"] == 0.0


def test_version(capsys):
    with pytest.raises(SystemExit) as excinfo:
        build_parser().parse_args(["--version"])
    assert excinfo.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_verb_is_required():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
