# -*- coding: utf-8 -*-

import logging
import math

import pytest

from plugins.module_utils.ris.errors import InputError
from plugins.module_utils.ris.reporting import LOGGER_NAME, forward_warnings, json_text, write_outputs


class FakeModule:
    def __init__(self):
        self.warnings = []

    def warn(self, msg):
        self.warnings.append(msg)


def test_second_write_changes_nothing(tmp_path):
    files = {"a.json": json_text({"b": 1, "a": [1.5]}), "sub/c.csv": "x\n1\n"}
    assert write_outputs(str(tmp_path), files) == ["a.json", "sub/c.csv"]
    assert (tmp_path / "sub" / "c.csv").read_text() == "x\n1\n"
    assert write_outputs(str(tmp_path), files) == []

    files["sub/c.csv"] = "x\n2\n"
    assert write_outputs(str(tmp_path), files) == ["sub/c.csv"]
    assert not [p for p in tmp_path.rglob(".ris-*")]


def test_failed_write_leaves_nothing_behind(tmp_path):
    (tmp_path / "b").write_text("not a directory")
    with pytest.raises(InputError, match="cannot write output"):
        write_outputs(str(tmp_path), {"a.txt": "1\n", "b/c.txt": "2\n"})
    assert not (tmp_path / "a.txt").exists()
    assert not [p for p in tmp_path.rglob(".ris-*")]
    assert (tmp_path / "b").read_text() == "not a directory"


def test_check_mode_writes_nothing(tmp_path):
    assert write_outputs(str(tmp_path / "out"), {"a.txt": "1\n"}, check_mode=True) == ["a.txt"]
    assert not (tmp_path / "out").exists()


def test_json_text_is_canonical():
    assert json_text({"b": 1, "a": 2}) == '{\n  "a": 2,\n  "b": 1\n}\n'
    with pytest.raises(ValueError):
        json_text({"a": math.nan})


def test_warnings_reach_the_module():
    module = FakeModule()
    logger = logging.getLogger(LOGGER_NAME + ".topology")
    with forward_warnings(module):
        logger.warning("null field at %s", 20)
        logger.info("not forwarded")
    logger.warning("after the block")
    assert module.warnings == ["null field at 20"]
