# -*- coding: utf-8 -*-

import dataclasses
import json
import math
import os

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from plugins.module_utils.ris.commands import ENTROPY_THRESHOLD
from plugins.module_utils.ris.config import ExperimentConfig
from plugins.module_utils.ris.entropy import entropy
from plugins.module_utils.ris.errors import IncidenceMatrixError, InputError
from plugins.module_utils.ris.thevenin import LoadKind, scattered_field_at
from plugins.module_utils.ris.topology import (EntropyObjectiveSpec, FeedingSpec, GeometryVector,
                                               PortIncidenceMatrix, Switch, element_states, entropy_sweep,
                                               feeding_constraint, grid_incidence, incidence_sweep, objective,
                                               random_feasible_geometry, reflection_phases, state_fields)

REFERENCE_FEEDING = FeedingSpec(3, (18, 34, 13))


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)


def brute_force_feasible(incidence, x, feeding):
    uf = UnionFind(incidence.N)
    for p, flag in enumerate(x.x0):
        if flag:
            a, b = incidence.endpoints[p]
            uf.union(int(a), int(b))
    ground = uf.find(feeding.ground - 1)
    controls = [uf.find(c - 1) for c in feeding.controls]
    if len({ground, *controls}) != 4:
        return 0
    used = set()
    for sw in x.switches:
        n1, n2 = (int(e) for e in incidence.endpoints[sw.port - 1])
        anode, cathode = (n1, n2) if sw.anode_side == "n1" else (n2, n1)
        if uf.find(cathode) != ground or uf.find(anode) not in controls:
            return 0
        used.add(uf.find(anode))
    return int(len(used) == len(x.switches))


@pytest.fixture
def reference_geometry(files_dir):
    with open(os.path.join(files_dir, "topology_reference_geometry.json"), encoding="utf-8") as f:
        return GeometryVector.from_dict(json.load(f))


def test_grid_numbering():
    incidence = grid_incidence(6, 6)
    assert incidence.N == 36
    assert incidence.M == 60
    # first horizontal port joins elements 1 and 2, first vertical port 1 and 7
    assert incidence.Y[0, 1] == 1
    assert incidence.Y[0, 6] == 31
    assert_array_equal(incidence.endpoints[29], [34, 35])


@pytest.mark.parametrize("Y, match", [
    ([[1, 0], [0, 0]], "diagonal"),
    ([[0, 1], [2, 0]], "symmetric"),
    ([[0, 1, 1], [1, 0, 0], [1, 0, 0]], "port 1 appears 2 times"),
    ([[0, 2], [2, 0]], "port 1 appears 0 times"),
    ([[0, 1, 0]], "square"),
])
def test_incidence_validation(Y, match):
    with pytest.raises(IncidenceMatrixError, match=match):
        PortIncidenceMatrix(Y)


def test_reference_geometry_is_feasible(reference_geometry):
    assert feeding_constraint(grid_incidence(6, 6), reference_geometry, REFERENCE_FEEDING) == 1


def test_flipped_diode_is_infeasible(reference_geometry):
    switches = list(reference_geometry.switches)
    first = switches[0]
    switches[0] = Switch(first.port, "n1" if first.anode_side == "n2" else "n2")
    x = GeometryVector(reference_geometry.x0, switches)
    assert feeding_constraint(grid_incidence(6, 6), x, REFERENCE_FEEDING) == 0


def test_shorted_feeding_points_are_infeasible(reference_geometry):
    x0 = np.ones(60, dtype=int)
    for sw in reference_geometry.switches:
        x0[sw.port - 1] = 0
    x = GeometryVector(x0, reference_geometry.switches)
    assert feeding_constraint(grid_incidence(6, 6), x, REFERENCE_FEEDING) == 0


def test_constraint_matches_union_find():
    rng = np.random.default_rng(2024)
    outcomes = set()
    for trial in range(1000):
        rows, cols = (int(v) for v in rng.integers(2, 7, size=2))
        incidence = grid_incidence(rows, cols)
        points = rng.choice(incidence.N, size=4, replace=False) + 1
        feeding = FeedingSpec(int(points[0]), tuple(int(p) for p in points[1:]))
        x = None
        if trial % 2:
            x = random_feasible_geometry(incidence, feeding, 3, rng, attempts=5)
        if x is None:
            x0 = (rng.random(incidence.M) < 0.25).astype(int)
            ports = rng.choice(incidence.M, size=min(3, incidence.M), replace=False)
            x0[ports] = 0
            sides = rng.choice(["n1", "n2"], size=ports.size)
            x = GeometryVector(x0, [Switch(int(p) + 1, str(side)) for p, side in zip(ports, sides)])
        expected = brute_force_feasible(incidence, x, feeding)
        assert feeding_constraint(incidence, x, feeding) == expected
        outcomes.add(expected)
    assert outcomes == {0, 1}


def test_sampler_respects_switch_count():
    incidence = grid_incidence(6, 6)
    rng = np.random.default_rng(5)
    with pytest.raises(InputError, match="one-to-one"):
        random_feasible_geometry(incidence, REFERENCE_FEEDING, 4, rng)
    x = random_feasible_geometry(incidence, REFERENCE_FEEDING, 3, rng)
    assert x is not None and x.Q == 3


@pytest.mark.parametrize("kwargs, match", [
    (dict(ground=1, controls=(1, 2, 3)), "distinct"),
    (dict(ground=1, controls=(2, 3)), "three control points"),
    (dict(ground=0, controls=(2, 3, 4)), "1-based"),
])
def test_feeding_spec_validation(kwargs, match):
    with pytest.raises(InputError, match=match):
        FeedingSpec(**kwargs)


def test_geometry_validation():
    with pytest.raises(InputError, match="binary"):
        GeometryVector([0, 2, 0])
    with pytest.raises(InputError, match="distinct"):
        GeometryVector([0, 0, 0], [Switch(1, "n1"), Switch(1, "n2")])
    with pytest.raises(InputError, match="hard-connected"):
        GeometryVector([1, 0, 0], [Switch(1, "n1")])
    with pytest.raises(InputError, match="anode_side"):
        Switch(1, "n3")


def test_element_states_enumerate_switches():
    x = GeometryVector([1, 0, 0, 0], [Switch(2, "n1"), Switch(4, "n2")])
    states = element_states(x)
    assert len(states) == 4
    assert states[0][0].kind is LoadKind.SHORT
    assert states[0][2].kind is LoadKind.OPEN
    assert [s[1].value for s in states] == [False, True, False, True]
    assert [s[3].value for s in states] == [False, False, True, True]


@pytest.fixture
def toy_problem(reference_config):
    return ExperimentConfig.from_document(reference_config("toy_topology.json")).topology_problem()


def test_infeasible_objective_is_minus_infinity(toy_problem):
    # cathode on a control element
    x = GeometryVector([0, 0, 0, 0], [Switch(2, "n1")])
    assert objective(toy_problem, x) == -math.inf
    assert objective(toy_problem, GeometryVector([0, 0, 0, 0])) == -math.inf


def test_feasible_objective_is_bounded(toy_problem):
    x = GeometryVector([0, 0, 0, 0], [Switch(1, "n2")])
    assert feeding_constraint(toy_problem.incidence, x, toy_problem.feeding) == 1
    assert 0.0 <= objective(toy_problem, x) <= 1.0
    phases = reflection_phases(toy_problem.network(3.5e9), x, toy_problem.wave(3.5e9), (0.0, 0.0))
    assert len(phases) == 2


@pytest.fixture
def reference_problem(files_dir):
    return ExperimentConfig.from_file(os.path.join(files_dir, "topology_reference.json")).topology_problem()


@pytest.fixture
def reference_phases(fixtures_dir):
    with open(os.path.join(fixtures_dir, "topology_reference_phases.json"), encoding="utf-8") as f:
        return json.load(f)


def test_reference_geometry_phases(reference_problem, reference_geometry, reference_phases):
    f = reference_phases["frequency_hz"]
    observation = tuple(reference_phases["observation"])
    net, wave = reference_problem.network(f), reference_problem.wave(f)
    phases = reflection_phases(net, reference_geometry, wave, observation, reference_problem.loads)
    assert_allclose(phases.phases, reference_phases["phases_deg"], atol=1e-3)
    values = state_fields(net, reference_geometry, wave, [observation], reference_problem.loads)[:, 0]
    assert_allclose(np.abs(values), reference_phases["magnitudes"], rtol=1e-6)
    assert entropy(phases) > 2.0


def test_reference_geometry_objective(reference_problem, reference_geometry, reference_phases):
    assert objective(reference_problem, reference_geometry) == pytest.approx(reference_phases["objective"], abs=1e-6)


def test_reference_geometry_clears_the_threshold(reference_problem, reference_geometry, reference_phases):
    table = entropy_sweep(reference_problem, reference_geometry, np.arange(-40.0, 41.0, 5.0),
                          reference_problem.objective.frequencies)
    assert table.shape == (17, 5)
    assert table.mean() == pytest.approx(reference_phases["sweep_mean_entropy"], abs=1e-6)
    assert table.mean() >= ENTROPY_THRESHOLD


@pytest.mark.parametrize("direction", [(0.0, 0.0), (20.0, 0.0), (-35.0, 0.0)])
def test_switched_fields_match_a_direct_solve(reference_problem, reference_geometry, direction):
    net, wave = reference_problem.network(3.5e9), reference_problem.wave(3.5e9)
    fast = state_fields(net, reference_geometry, wave, [direction], reference_problem.loads)[:, 0]
    direct = [scattered_field_at(net, states, wave, direction, reference_problem.loads)
              for states in element_states(reference_geometry)]
    assert_allclose(fast, direct, rtol=1e-8)


def test_objective_ignores_sample_order(reference_problem, reference_geometry):
    spec = reference_problem.objective
    shuffled = dataclasses.replace(reference_problem, objective=EntropyObjectiveSpec(
        spec.angles[::-1], spec.frequencies[::-1], incident=spec.incident))
    assert objective(shuffled, reference_geometry) == pytest.approx(
        objective(reference_problem, reference_geometry), rel=1e-12)


def test_incidence_sweep_observes_the_specular_direction(toy_problem):
    x = GeometryVector([0, 0, 0, 0], [Switch(1, "n2")])
    table = incidence_sweep(toy_problem, x, [-20.0, 0.0, 20.0], 3.5e9)
    assert table.shape == (3, 2)
    normal = reflection_phases(toy_problem.network(3.5e9), x, toy_problem.wave(3.5e9), (0.0, 0.0))
    assert_allclose(table[1], normal.phases, atol=1e-9)


def test_incidence_sweep_needs_the_specular_direction_on_the_grid(toy_problem):
    x = GeometryVector([0, 0, 0, 0], [Switch(1, "n2")])
    with pytest.raises(InputError, match="specular direction"):
        incidence_sweep(toy_problem, x, [2.5], 3.5e9)
