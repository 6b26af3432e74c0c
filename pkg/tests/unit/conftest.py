# -*- coding: utf-8 -*-

import contextlib
import json
import os

import pytest
from ansible.module_utils import basic
from ansible.module_utils.common.text.converters import to_bytes

try:
    from ansible.module_utils.testing import patch_module_args
except ImportError:
    patch_module_args = None

ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
FILES = os.path.join(ROOT, "roles", "ris_experiments", "files")
FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")


class AnsibleExitJson(Exception):
    def __init__(self, result):
        super().__init__(result)
        self.result = result


class AnsibleFailJson(Exception):
    def __init__(self, result):
        super().__init__(result)
        self.result = result


@pytest.fixture
def files_dir():
    return FILES


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def reference_config():
    def load(name):
        with open(os.path.join(FILES, name), encoding="utf-8") as f:
            return json.load(f)
    return load


@pytest.fixture
def write_config(tmp_path):
    """Write a config document into the temporary directory; returns its path."""
    def write(doc, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)
    return write


@pytest.fixture
def run_module(monkeypatch):
    """Run an Ansible module's main() with args; returns the exit or fail result."""
    def fake_exit_json(self, **kwargs):
        kwargs.setdefault("changed", False)
        raise AnsibleExitJson(kwargs)

    def fake_fail_json(self, **kwargs):
        kwargs["failed"] = True
        raise AnsibleFailJson(kwargs)

    monkeypatch.setattr(basic.AnsibleModule, "exit_json", fake_exit_json)
    monkeypatch.setattr(basic.AnsibleModule, "fail_json", fake_fail_json)

    def run(module, args, check_mode=False):
        args = dict(args, _ansible_check_mode=check_mode)
        with contextlib.ExitStack() as stack:
            if patch_module_args is not None:
                stack.enter_context(patch_module_args(args))
            else:
                args.update(_ansible_remote_tmp="/tmp", _ansible_keep_remote_files=False)
                monkeypatch.setattr(basic, "_ANSIBLE_ARGS", to_bytes(json.dumps({"ANSIBLE_MODULE_ARGS": args})))
            try:
                module.main()
            except AnsibleExitJson as e:
                return e.result
            except AnsibleFailJson as e:
                return e.result
        raise AssertionError("module returned without exit_json or fail_json")

    return run
