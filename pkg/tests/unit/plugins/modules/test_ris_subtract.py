# -*- coding: utf-8 -*-

import os

from plugins.modules import ris_subtract


def test_subtraction_matches_golden(run_module, files_dir, tmp_path):
    traces = os.path.join(files_dir, "traces")
    args = dict(total=os.path.join(traces, "total.csv"), env=os.path.join(traces, "env.csv"),
                output_dir=str(tmp_path))
    result = run_module(ris_subtract, args)
    assert result["changed"] is True
    with open(os.path.join(traces, "scat_golden.csv"), encoding="utf-8") as f:
        assert (tmp_path / "scat.csv").read_text() == f.read()
    assert run_module(ris_subtract, args)["changed"] is False


def test_swapped_labels_still_subtract(run_module, files_dir, tmp_path):
    traces = os.path.join(files_dir, "traces")
    result = run_module(ris_subtract, dict(total=os.path.join(traces, "env.csv"),
                                           env=os.path.join(traces, "env.csv"), output_dir=str(tmp_path)))
    assert result["summary"]["points"] == 13


def test_missing_trace_fails(run_module, tmp_path):
    result = run_module(ris_subtract, dict(total=str(tmp_path / "t.csv"), env=str(tmp_path / "e.csv"),
                                           output_dir=str(tmp_path)))
    assert result["failed"] is True
    assert result["exit_code"] == 2
