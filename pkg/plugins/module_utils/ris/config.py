# -*- coding: utf-8 -*-
"""Experiment configuration: one JSON document checked against an argument spec.

The argument spec uses the same dict(type=..., default=..., options=...) form as the
modules, so both surfaces validate through ArgumentSpecValidator.
"""

import json
import os
from dataclasses import dataclass

from ansible.module_utils.common.arg_spec import ArgumentSpecValidator

from .codebook import one_bit_alphabet, reflection_alphabet
from .errors import ConfigError, InputError
from .field import AngleGrid
from .genetic import GAParams
from .oracle import ArraySpec, IncidentWave
from .thevenin import LoadSettings
from .topology import (EntropyObjectiveSpec, FeedingSpec, GeometryVector, PortIncidenceMatrix, TopologyProblem,
                       grid_incidence)

CONFIG_VERSION = 1
SUB6_FREQUENCIES = [3.4e9, 3.45e9, 3.5e9, 3.55e9, 3.6e9]

ARRAY_OPTIONS = dict(
    rows=dict(type='int', required=True),
    cols=dict(type='int', required=True),
    spacing=dict(type='float', required=True),
    frequency=dict(type='float', required=True),
    element_exponent_q=dict(type='float', default=1.0),
    self_impedance=dict(type='float', default=50.0),
    self_reactance=dict(type='float', default=0.0),
    coupling_strength=dict(type='float', default=0.1),
    coupling_decay=dict(type='float', default=0.0),
)

GRID_OPTIONS = dict(
    theta_min=dict(type='float', default=-90.0),
    theta_max=dict(type='float', default=90.0),
    theta_step=dict(type='float', default=1.0),
    phi=dict(type='list', elements='float', default=[0.0]),
)

INCIDENT_OPTIONS = dict(
    theta=dict(type='float', default=0.0),
    phi=dict(type='float', default=0.0),
    amplitude=dict(type='float', default=1.0),
)

LOADS_OPTIONS = dict(
    open_impedance=dict(type='float', default=1e9),
    diode_on_resistance=dict(type='float', default=1.0),
    reference_impedance=dict(type='float', default=50.0),
)

STEERING_OPTIONS = dict(
    targets=dict(type='list', elements='float', default=[]),
    phi=dict(type='float', default=0.0),
    alphabet=dict(type='str', choices=['one_bit', 'reflection']),
    element_phases=dict(type='list', elements='float'),
    reflection_magnitude=dict(type='float', default=0.9),
    refine_budget=dict(type='int', default=0),
    exhaustive_bits=dict(type='int', default=12),
    workers=dict(type='int', default=1),
    export_step=dict(type='float'),
    frequencies=dict(type='list', elements='float', default=[]),
)

TOPOLOGY_OPTIONS = dict(
    rows=dict(type='int', default=6),
    cols=dict(type='int', default=6),
    pitch=dict(type='float', default=0.0085),
    incidence=dict(type='list', elements='list'),
    ground=dict(type='int', required=True),
    controls=dict(type='list', elements='int', required=True),
    switches=dict(type='int', default=3),
    geometry=dict(type='raw'),
    element_exponent_q=dict(type='float', default=1.0),
    self_impedance=dict(type='float', default=50.0),
    coupling_strength=dict(type='float', default=0.1),
    coupling_decay=dict(type='float', default=150.0),
    structural_mode=dict(type='str', default='matched_reference', choices=['open', 'matched_reference']),
    reference_impedance=dict(type='float', default=80.0),
)

OBJECTIVE_OPTIONS = dict(
    theta=dict(type='list', elements='float', default=[-40.0, -20.0, 0.0, 20.0, 40.0]),
    phi=dict(type='float', default=0.0),
    frequencies=dict(type='list', elements='float', default=SUB6_FREQUENCIES),
    angle_weights=dict(type='list', elements='float'),
    frequency_weights=dict(type='list', elements='float'),
    incident_theta=dict(type='float', default=0.0),
    incident_phi=dict(type='float', default=0.0),
    sweep_theta_min=dict(type='float', default=-40.0),
    sweep_theta_max=dict(type='float', default=40.0),
    sweep_theta_step=dict(type='float', default=5.0),
    observation_theta=dict(type='float', default=0.0),
    observation_phi=dict(type='float', default=0.0),
    phase_frequency=dict(type='float'),
)

GA_OPTIONS = dict(
    population=dict(type='int', default=64),
    generations=dict(type='int', default=100),
    mutation_rate=dict(type='float'),
    crossover_rate=dict(type='float', default=0.9),
    tournament=dict(type='int', default=3),
    elitism=dict(type='int', default=1),
    init_attempts=dict(type='int', default=100),
    workers=dict(type='int', default=1),
)

INDEPENDENCE_OPTIONS = dict(
    epsilon=dict(type='float', default=0.0),
    floor_db=dict(type='float', default=-40.0),
    target_theta=dict(type='float', default=0.0),
)

CONFIG_SPEC = dict(
    version=dict(type='int', required=True, choices=[CONFIG_VERSION]),
    band=dict(type='str', required=True, choices=['sub6', 'mmwave']),
    seed=dict(type='int', required=True),
    output_dir=dict(type='str', default='.'),
    network=dict(type='str'),
    structural_mode=dict(type='str', default='open', choices=['open', 'matched_reference']),
    array=dict(type='dict', options=ARRAY_OPTIONS),
    grid=dict(type='dict', options=GRID_OPTIONS, apply_defaults=True),
    incident=dict(type='dict', options=INCIDENT_OPTIONS, apply_defaults=True),
    loads=dict(type='dict', options=LOADS_OPTIONS, apply_defaults=True),
    steering=dict(type='dict', options=STEERING_OPTIONS, apply_defaults=True),
    topology=dict(type='dict', options=TOPOLOGY_OPTIONS),
    objective=dict(type='dict', options=OBJECTIVE_OPTIONS, apply_defaults=True),
    ga=dict(type='dict', options=GA_OPTIONS, apply_defaults=True),
    independence=dict(type='dict', options=INDEPENDENCE_OPTIONS, apply_defaults=True),
)


def parse_json(text, source):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{source}:{e.lineno}:{e.colno}: {e.msg}")


def read_json_file(path):
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}")
    return parse_json(text, path)


def read_text_file(path):
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}")


def validate_config(doc, source="<config>"):
    """Validated parameters with defaults applied, or ConfigError."""
    if not isinstance(doc, dict):
        raise ConfigError(f"{source}: config must be a JSON object")
    result = ArgumentSpecValidator(CONFIG_SPEC).validate(doc)
    if result.error_messages:
        raise ConfigError(f"{source}: {result.error_messages[0]}")
    return result.validated_parameters


@dataclass(frozen=True)
class ExperimentConfig:
    params: dict
    base_dir: str = "."
    source: str = "<config>"

    @classmethod
    def from_document(cls, doc, base_dir=".", source="<config>", seed=None, output_dir=None):
        """Validate `doc`; `seed` and `output_dir` override the document."""
        if isinstance(doc, dict):
            doc = dict(doc)
            if seed is not None:
                doc["seed"] = seed
            if output_dir is not None:
                doc["output_dir"] = output_dir
        return cls(validate_config(doc, source), base_dir, source)

    @classmethod
    def from_file(cls, path, seed=None, output_dir=None):
        doc = read_json_file(path)
        return cls.from_document(doc, os.path.dirname(os.path.abspath(path)), path, seed, output_dir)

    def section(self, name):
        value = self.params.get(name)
        if value is None:
            raise ConfigError(f"{self.source}: config section '{name}' is required here")
        return value

    def resolve(self, path):
        return path if os.path.isabs(path) else os.path.join(self.base_dir, path)

    @property
    def band(self):
        return self.params["band"]

    @property
    def seed(self):
        return self.params["seed"]

    @property
    def output_dir(self):
        return self.params["output_dir"]

    @property
    def structural_mode(self):
        return self.params["structural_mode"]

    @property
    def network_path(self):
        path = self.params.get("network")
        return self.resolve(path) if path else None

    def array_spec(self):
        a = self.section("array")
        return ArraySpec(
            rows=a["rows"],
            cols=a["cols"],
            spacing=a["spacing"],
            frequency=a["frequency"],
            element_exponent_q=a["element_exponent_q"],
            self_impedance=complex(a["self_impedance"], a["self_reactance"]),
            coupling_strength=a["coupling_strength"],
            coupling_decay=a["coupling_decay"],
        )

    def angle_grid(self):
        g = self.params["grid"]
        return AngleGrid.regular(g["theta_min"], g["theta_max"], g["theta_step"], g["phi"])

    def incident_wave(self, frequency):
        i = self.params["incident"]
        return IncidentWave((i["theta"], i["phi"]), frequency, i["amplitude"])

    def load_settings(self):
        return LoadSettings(**self.params["loads"])

    def ga_params(self):
        return GAParams(**self.params["ga"])

    @property
    def steering(self):
        return self.params["steering"]

    @property
    def independence(self):
        return self.params["independence"]

    def alphabet_kind(self):
        kind = self.steering["alphabet"]
        if kind is None:
            kind = "one_bit" if self.band == "mmwave" else "reflection"
        return kind

    def alphabet(self, phases=None):
        """Element alphabet; `phases` stands in when none are configured."""
        if self.alphabet_kind() == "one_bit":
            return one_bit_alphabet()
        configured = self.steering["element_phases"]
        table = configured if configured is not None else phases
        if table is None:
            raise ConfigError(f"{self.source}: steering.element_phases or a topology geometry is required")
        return reflection_alphabet(table, self.steering["reflection_magnitude"])

    def incidence_matrix(self):
        t = self.section("topology")
        if t["incidence"] is not None:
            return PortIncidenceMatrix(t["incidence"])
        return grid_incidence(t["rows"], t["cols"])

    def feeding_spec(self):
        t = self.section("topology")
        return FeedingSpec(t["ground"], t["controls"])

    def objective_spec(self):
        o = self.params["objective"]
        return EntropyObjectiveSpec(
            angles=[(theta, o["phi"]) for theta in o["theta"]],
            frequencies=o["frequencies"],
            angle_weights=o["angle_weights"],
            frequency_weights=o["frequency_weights"],
            incident=(o["incident_theta"], o["incident_phi"]),
        )

    def topology_array(self):
        t = self.section("topology")
        return ArraySpec(
            rows=t["rows"],
            cols=t["cols"],
            spacing=t["pitch"],
            frequency=self.params["objective"]["frequencies"][0],
            element_exponent_q=t["element_exponent_q"],
            self_impedance=t["self_impedance"],
            coupling_strength=t["coupling_strength"],
            coupling_decay=t["coupling_decay"],
        )

    def topology_problem(self):
        t = self.section("topology")
        return TopologyProblem(
            incidence=self.incidence_matrix(),
            feeding=self.feeding_spec(),
            array=self.topology_array(),
            grid=self.angle_grid(),
            objective=self.objective_spec(),
            switches=t["switches"],
            loads=self.load_settings(),
            reference_impedance=t["reference_impedance"] if t["structural_mode"] == "matched_reference" else None,
        )

    def geometry(self):
        """Configured element geometry (inline object or file path), or None."""
        topology = self.params.get("topology")
        value = topology and topology.get("geometry")
        if value is None:
            return None
        if isinstance(value, str):
            value = read_json_file(self.resolve(value))
        if not isinstance(value, dict):
            raise ConfigError(f"{self.source}: topology.geometry must be an object or a file path")
        return GeometryVector.from_dict(value)
