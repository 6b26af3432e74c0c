# -*- coding: utf-8 -*-

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import constants

from plugins.module_utils.ris.errors import InputError, NonPassiveNetworkError
from plugins.module_utils.ris.field import AngleGrid, read_pattern_csv, write_pattern_csv
from plugins.module_utils.ris.oracle import (ArraySpec, IncidentWave, embedded_field, load_network,
                                             network_document, open_circuit_voltages, passivity_margin,
                                             synthesize_network)

FREQ = 28e9
WAVELENGTH = constants.c / FREQ


@pytest.fixture
def grid():
    return AngleGrid.regular(-90.0, 90.0, 5.0, [0.0, 90.0])


def test_positions_are_centred_row_major():
    spec = ArraySpec(rows=2, cols=3, spacing=0.01, frequency=FREQ)
    positions = spec.element_positions()
    assert positions.shape == (6, 2)
    assert_allclose(positions[0], [-0.01, -0.005])
    assert_allclose(positions[2], [0.01, -0.005])
    assert_allclose(positions[3], [-0.01, 0.005])
    assert_allclose(positions.mean(axis=0), [0.0, 0.0], atol=1e-15)


def test_single_element_network(grid):
    net = synthesize_network(ArraySpec(1, 1, 0.005, FREQ), grid)
    assert net.port_count == 1
    assert net.Z[0, 0] == 50.0
    assert_allclose(net.port_fields[0, :, 0], np.cos(np.radians(grid.theta)), atol=1e-12)


def test_impedance_is_reciprocal_and_passive(grid):
    net = synthesize_network(ArraySpec(3, 3, WAVELENGTH / 2, FREQ, coupling_strength=0.1), grid)
    assert_allclose(net.Z, net.Z.T)
    assert passivity_margin(net.Z) > 0.0
    assert_allclose(np.diag(net.Z), 50.0)


def test_strong_coupling_is_rejected(grid):
    spec = ArraySpec(2, 1, WAVELENGTH / 2, FREQ, coupling_strength=10.0)
    with pytest.raises(NonPassiveNetworkError, match="non-passive network"):
        synthesize_network(spec, grid)


def test_half_wavelength_endfire_phase():
    positions = np.array([[0.0, 0.0], [WAVELENGTH / 2, 0.0]])
    k = 2 * np.pi / WAVELENGTH
    fields = embedded_field(positions, k, 0.0, 90.0, 0.0)
    assert abs(np.degrees(np.angle(fields[1] / fields[0]))) == pytest.approx(180.0, abs=1e-6)

    quarter = embedded_field(np.array([[0.0, 0.0], [WAVELENGTH / 4, 0.0]]), k, 0.0, 90.0, 0.0)
    assert np.degrees(np.angle(quarter[1] / quarter[0])) == pytest.approx(90.0, abs=1e-6)


@pytest.mark.parametrize("q", [0.0, 1.0, 2.5])
def test_element_factor_is_cos_power(q):
    theta = np.array([0.0, 30.0, 60.0, 90.0])
    fields = embedded_field(np.zeros((1, 2)), 1.0, q, theta, 0.0)
    assert_allclose(np.abs(fields[0]), np.clip(np.cos(np.radians(theta)), 0.0, None) ** q, atol=1e-12)


def test_open_circuit_voltages_follow_reciprocity(grid):
    net = synthesize_network(ArraySpec(2, 2, WAVELENGTH / 2, FREQ), grid)
    wave = IncidentWave((30.0, 90.0), FREQ, amplitude=2.0j)
    v = open_circuit_voltages(net, wave)
    e, _ = net.fields_at(30.0, 90.0)
    assert_allclose(v, 2.0j * e)


def test_incident_frequency_must_match(grid):
    net = synthesize_network(ArraySpec(1, 2, WAVELENGTH / 2, FREQ), grid)
    with pytest.raises(InputError, match="does not match network frequency"):
        open_circuit_voltages(net, IncidentWave((0.0, 0.0), 3.5e9))


@pytest.mark.parametrize("kwargs, match", [
    (dict(rows=0), "at least one row"),
    (dict(spacing=0.0), "spacing"),
    (dict(frequency=-1.0), "frequency"),
    (dict(element_exponent_q=-1.0), "exponent"),
])
def test_array_spec_validation(kwargs, match):
    args = dict(rows=2, cols=2, spacing=0.005, frequency=FREQ)
    args.update(kwargs)
    with pytest.raises(InputError, match=match):
        ArraySpec(**args)


def test_incident_theta_range():
    with pytest.raises(InputError, match="outside"):
        IncidentWave((95.0, 0.0), FREQ)


def test_network_document_loads_back(grid):
    net = synthesize_network(ArraySpec(2, 2, WAVELENGTH / 2, FREQ), grid)
    texts = {f"port_{i:03d}.csv": write_pattern_csv(p) for i, p in enumerate(net.port_patterns)}
    texts["oc.csv"] = write_pattern_csv(net.oc_pattern)
    doc = network_document(net, sorted(k for k in texts if k.startswith("port_")), "oc.csv")

    loaded = load_network(doc, lambda path: read_pattern_csv(texts[path], path))
    assert loaded.port_count == 4
    assert_allclose(loaded.Z, net.Z)
    assert_allclose(loaded.port_fields, net.port_fields)
    assert loaded.frequency == FREQ


def test_network_document_version_is_checked(grid):
    net = synthesize_network(ArraySpec(1, 1, 0.005, FREQ), grid)
    doc = network_document(net, ["p.csv"], "oc.csv")
    doc["version"] = 7
    with pytest.raises(InputError, match="unsupported network version"):
        load_network(doc, lambda path: net.oc_pattern)


def test_incident_phase_progression(grid):
    net = synthesize_network(ArraySpec(3, 3, 0.0053534, FREQ), grid)
    theta, phi = 25.0, 90.0
    v = open_circuit_voltages(net, IncidentWave((theta, phi), FREQ))
    u = np.sin(np.radians(theta)) * np.array([np.cos(np.radians(phi)), np.sin(np.radians(phi))])
    k = 2 * np.pi / WAVELENGTH
    r = net.port_positions
    for m, n in [(0, 1), (0, 8), (4, 6)]:
        expected = k * (r[m] - r[n]) @ u
        assert np.angle(v[m] / v[n] * np.exp(-1j * expected)) == pytest.approx(0.0, abs=1e-9)


def test_translation_adds_a_common_phase(grid):
    spec = ArraySpec(2, 3, 0.0053534, FREQ)
    positions = spec.element_positions()
    wave = IncidentWave((40.0, 90.0), FREQ)
    v = open_circuit_voltages(synthesize_network(spec, grid, positions), wave)
    shifted = open_circuit_voltages(synthesize_network(spec, grid, positions + [0.0031, -0.0072]), wave)
    ratio = shifted / v
    assert_allclose(np.abs(ratio), 1.0, rtol=1e-12)
    assert_allclose(ratio, ratio[0], rtol=1e-9)
