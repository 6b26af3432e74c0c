# -*- coding: utf-8 -*-

import os

import pytest

from plugins.module_utils.ris.config import ExperimentConfig, parse_json, read_json_file, validate_config
from plugins.module_utils.ris.errors import ConfigError, InputError

REFERENCE_CONFIGS = [
    "mmwave_reference.json",
    "sub6_reference.json",
    "topology_reference.json",
    "toy_topology.json",
    "independence_reference.json",
]

MINIMAL = {"version": 1, "band": "sub6", "seed": 1}


@pytest.mark.parametrize("name", REFERENCE_CONFIGS)
def test_reference_configs_validate(files_dir, name):
    config = ExperimentConfig.from_file(os.path.join(files_dir, name))
    assert config.params["version"] == 1
    assert config.base_dir == files_dir


def test_defaults_are_applied():
    params = validate_config(dict(MINIMAL))
    assert params["output_dir"] == "."
    assert params["structural_mode"] == "open"
    assert params["grid"]["theta_step"] == 1.0
    assert params["ga"]["population"] == 64
    assert params["independence"]["floor_db"] == -40.0
    assert params["topology"] is None


@pytest.mark.parametrize("update, match", [
    ({"bogus": 1}, "bogus"),
    ({"band": "lte"}, "band"),
    ({"version": 2}, "version"),
    ({"structural_mode": "closed"}, "structural_mode"),
    ({"grid": {"theta_step": "fine"}}, "theta_step"),
])
def test_invalid_documents(update, match):
    with pytest.raises(ConfigError, match=match) as excinfo:
        validate_config(dict(MINIMAL, **update), "c.json")
    assert str(excinfo.value).startswith("c.json: ")
    assert excinfo.value.exit_code == 2


def test_seed_is_required():
    with pytest.raises(ConfigError, match="seed"):
        validate_config({"version": 1, "band": "sub6"})


def test_json_errors_carry_position():
    with pytest.raises(InputError, match=r"c\.json:2:8: Expecting value"):
        parse_json('{\n  "a": }', "c.json")


def test_missing_file(tmp_path):
    with pytest.raises(InputError, match="No such file"):
        read_json_file(str(tmp_path / "absent.json"))


def test_overrides_win(reference_config):
    config = ExperimentConfig.from_document(reference_config("toy_topology.json"), seed=99, output_dir="/tmp/x")
    assert config.seed == 99
    assert config.output_dir == "/tmp/x"


def test_alphabet_defaults_follow_band():
    mm = ExperimentConfig.from_document(dict(MINIMAL, band="mmwave"))
    assert mm.alphabet_kind() == "one_bit"
    assert mm.alphabet().phases == (0.0, 180.0)

    sub6 = ExperimentConfig.from_document(dict(MINIMAL))
    assert sub6.alphabet_kind() == "reflection"
    with pytest.raises(ConfigError, match="element_phases"):
        sub6.alphabet()
    assert sub6.alphabet([0.0, 90.0]).size == 2


def test_missing_section_is_reported():
    config = ExperimentConfig.from_document(dict(MINIMAL), source="c.json")
    with pytest.raises(ConfigError, match="c.json: config section 'array' is required"):
        config.array_spec()


def test_geometry_path_resolves_next_to_config(files_dir):
    config = ExperimentConfig.from_file(os.path.join(files_dir, "independence_reference.json"))
    x = config.geometry()
    assert x.Q == 3
    assert x.x0.size == 60


def test_inline_geometry(write_config):
    doc = dict(MINIMAL, topology={"ground": 1, "controls": [2, 3, 4], "rows": 2, "cols": 2,
                                  "geometry": {"x0": "0000", "switches": [{"port": 1, "anode_side": "n2"}]}})
    config = ExperimentConfig.from_file(write_config(doc))
    assert config.geometry().switches[0].port == 1
    assert config.incidence_matrix().M == 4


def test_topology_problem_from_config(reference_config):
    problem = ExperimentConfig.from_document(reference_config("topology_reference.json")).topology_problem()
    assert problem.incidence.M == 60
    assert problem.feeding.dc_points == (3, 18, 34, 13)
    assert len(problem.objective.samples()) == 25
