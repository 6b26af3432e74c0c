# -*- coding: utf-8 -*-
"""Output writing and log forwarding shared by the CLI and the modules."""

import json
import logging
import os
import tempfile

from ansible.module_utils.common.text.converters import to_native

from .errors import InputError, RisError

LOGGER_NAME = __name__.rpartition(".")[0]


def json_text(doc):
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _current_bytes(path):
    try:
        with open(path, "rb") as f:
            return f.read()
    except (FileNotFoundError, NotADirectoryError):
        return None


def _stage(path, data):
    """Write `data` to a temporary file next to `path`; returns the temporary path."""
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ris-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
    except BaseException:
        os.unlink(tmp)
        raise
    return tmp


def write_outputs(out_dir, files, check_mode=False):
    """Write {relative path: text} under out_dir; return the paths that changed.

    Files whose bytes already match are left alone. In check mode nothing is
    written but the changed list is still computed. Every changed file is
    staged before the first one is renamed into place, so a failed write
    leaves the previous outputs untouched.
    """
    pending = []
    for name in sorted(files):
        path = os.path.join(out_dir, name)
        data = files[name].encode("utf-8")
        if _current_bytes(path) != data:
            pending.append((name, path, data))
    changed = [name for name, _, _ in pending]
    if check_mode or not pending:
        return changed

    staged = []
    path = out_dir
    try:
        for name, path, data in pending:
            staged.append((_stage(path, data), path))
        for tmp, path in staged:
            os.replace(tmp, path)
    except OSError as e:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise InputError(f"{path}: cannot write output ({e.strerror})")
    return changed


class AnsibleWarningHandler(logging.Handler):
    """Forward library warnings to module.warn so they show up in playbook output."""

    def __init__(self, module, level=logging.WARNING):
        super().__init__(level)
        self.module = module

    def emit(self, record):
        try:
            self.module.warn(self.format(record))
        except Exception:
            self.handleError(record)


class forward_warnings:
    """Context manager attaching an AnsibleWarningHandler to the library logger."""

    def __init__(self, module):
        self.handler = AnsibleWarningHandler(module)
        self.logger = logging.getLogger(LOGGER_NAME)

    def __enter__(self):
        self.logger.addHandler(self.handler)
        return self.handler

    def __exit__(self, *exc):
        self.logger.removeHandler(self.handler)
        return False


def run_in_module(module, compute, result, action="running experiment"):
    """Finish an Ansible module around `compute() -> (out_dir, CommandResult)`.

    Library warnings surface through module.warn; RisError becomes fail_json
    with the matching exit code, anything else fails with `action` as context.
    """
    try:
        with forward_warnings(module):
            out_dir, outcome = compute()
            changed = write_outputs(out_dir, outcome.files, module.check_mode)
    except RisError as e:
        module.fail_json(msg=to_native(e), exit_code=e.exit_code, **result)
        return
    except Exception as e:
        module.fail_json(msg=f"Error {action}: {to_native(e)}", **result)
        return
    result.update(
        changed=bool(changed),
        out_dir=out_dir,
        files=sorted(outcome.files),
        changed_files=changed,
        summary=outcome.summary,
    )
    module.exit_json(**result)
