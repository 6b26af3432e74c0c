# -*- coding: utf-8 -*-
"""Synthetic desk-scale EM oracle.

Stands in for a full-wave simulation: array geometry, embedded port
patterns, a reciprocal coupling impedance matrix and incident-wave
open-circuit voltages.

Phase convention: the embedded field of port m towards the unit vector u is
cos^q(theta) * exp(+j k r_m.u). An incident wave is named by the direction it
arrives from, and by reciprocity v_oc,m = A * cos^q(theta_inc) *
exp(+j k r_m.u_inc), so arg(v_oc,m / v_oc,n) = +k (r_m - r_n).u_inc. A
specular beam (theta_b = -theta_inc) then needs a uniform phase profile.
"""

import dataclasses
import logging
from dataclasses import dataclass

import numpy as np
from scipy import constants, linalg
from scipy.spatial.distance import cdist

from .errors import InputError, NonPassiveNetworkError
from .field import AngleGrid, ComplexPattern, _readonly

logger = logging.getLogger(__name__)

NETWORK_FORMAT_VERSION = 1


def wavenumber(frequency):
    return 2.0 * np.pi * frequency / constants.c


@dataclass(frozen=True)
class ArraySpec:
    rows: int
    cols: int
    spacing: float
    frequency: float
    element_exponent_q: float = 1.0
    self_impedance: complex = 50.0 + 0.0j
    coupling_strength: float = 0.1
    coupling_decay: float = 0.0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InputError("array needs at least one row and one column")
        if self.spacing <= 0:
            raise InputError("array spacing must be positive")
        if self.frequency <= 0:
            raise InputError("array frequency must be positive")
        if self.element_exponent_q < 0:
            raise InputError("element exponent q must be non-negative")
        if self.coupling_decay < 0:
            raise InputError("coupling decay must be non-negative")
        object.__setattr__(self, "self_impedance", complex(self.self_impedance))

    @property
    def wavenumber(self):
        return wavenumber(self.frequency)

    def element_positions(self):
        """Element centres (x, y) in metres, row-major, centred on the origin."""
        rows, cols = np.meshgrid(np.arange(self.rows), np.arange(self.cols), indexing="ij")
        x = (cols.ravel() - (self.cols - 1) / 2.0) * self.spacing
        y = (rows.ravel() - (self.rows - 1) / 2.0) * self.spacing
        return np.column_stack((x, y))

    def at_frequency(self, frequency):
        return dataclasses.replace(self, frequency=frequency)


@dataclass(frozen=True)
class IncidentWave:
    """Plane wave arriving from `direction` (theta, phi) in degrees."""

    direction: tuple
    frequency: float
    amplitude: complex = 1.0 + 0.0j

    def __post_init__(self):
        theta, phi = self.direction
        if not -90.0 <= theta <= 90.0:
            raise InputError(f"incident theta {theta} is outside [-90, 90]")
        if self.frequency <= 0:
            raise InputError("incident frequency must be positive")
        object.__setattr__(self, "direction", (float(theta), float(phi)))
        object.__setattr__(self, "amplitude", complex(self.amplitude))


def embedded_field(positions, k, q, theta_deg, phi_deg):
    """cos^q(theta) * exp(j k r.u) for every port, broadcast over the angles.

    Returns an array shaped (M,) + broadcast(theta, phi).shape.
    """
    theta = np.radians(np.asarray(theta_deg, dtype=float))
    phi = np.radians(np.asarray(phi_deg, dtype=float))
    u = np.sin(theta) * np.cos(phi)
    v = np.sin(theta) * np.sin(phi)
    element = np.clip(np.cos(theta), 0.0, None) ** q
    x = positions[:, 0].reshape((-1,) + (1,) * np.ndim(u))
    y = positions[:, 1].reshape((-1,) + (1,) * np.ndim(u))
    return element * np.exp(1j * k * (x * u + y * v))


def passivity_margin(Z):
    """Smallest eigenvalue of the Hermitian part Re(Z) of a symmetric Z."""
    return float(linalg.eigvalsh(Z.real)[0])


@dataclass(frozen=True, eq=False)
class PortNetwork:
    Z: np.ndarray
    port_positions: np.ndarray
    grid: AngleGrid
    port_fields: np.ndarray
    oc_pattern: ComplexPattern
    frequency: float
    element_exponent_q: float = 1.0

    def __post_init__(self):
        Z = np.array(self.Z, dtype=complex)
        positions = np.array(self.port_positions, dtype=float).reshape(-1, 2)
        fields = np.array(self.port_fields, dtype=complex)
        m = positions.shape[0]
        if Z.shape != (m, m):
            raise InputError(f"impedance matrix shape {Z.shape} does not match {m} ports")
        if fields.shape != (m,) + self.grid.shape:
            raise InputError(f"port patterns shape {fields.shape} does not match {m} ports on the grid")
        if self.oc_pattern.grid.shape != self.grid.shape:
            raise InputError("open-circuit pattern is not on the network grid")
        scale = np.abs(Z).max() if Z.size else 0.0
        if np.abs(Z - Z.T).max(initial=0.0) > 1e-9 * scale:
            raise InputError("impedance matrix is not symmetric (reciprocity)")
        if m:
            margin = passivity_margin(Z)
            if margin < -1e-9 * scale:
                raise NonPassiveNetworkError(margin)
        object.__setattr__(self, "Z", _readonly(Z))
        object.__setattr__(self, "port_positions", _readonly(positions))
        object.__setattr__(self, "port_fields", _readonly(fields))

    @property
    def port_count(self):
        return self.Z.shape[0]

    @property
    def wavenumber(self):
        return wavenumber(self.frequency)

    @property
    def port_patterns(self):
        return tuple(ComplexPattern(self.grid, f) for f in self.port_fields)

    def fields_at(self, theta, phi):
        """Port field vector E_m and E_oc at one grid direction."""
        idx = self.grid.index(theta, phi)
        if idx is None:
            raise InputError(f"direction ({theta}, {phi}) is not on the network grid")
        return self.port_fields[(slice(None),) + idx], complex(self.oc_pattern.values[idx])

    def with_oc_pattern(self, pattern):
        return dataclasses.replace(self, oc_pattern=pattern)


def coupling_matrix(positions, k, self_impedance, coupling_strength, coupling_decay):
    d = cdist(positions, positions)
    with np.errstate(invalid="ignore"):
        mutual = (coupling_strength * self_impedance * np.exp(-coupling_decay * d)
                  * np.exp(-1j * k * d) / np.maximum(k * d, 1.0))
    Z = np.where(np.eye(len(positions), dtype=bool), self_impedance, mutual)
    return 0.5 * (Z + Z.T)


def synthesize_network(spec, grid, positions=None, oc_pattern=None):
    """Build the coupled port network for `spec` sampled on `grid`.

    `positions` overrides the element centres, e.g. to place ports in the
    gaps between elements.
    """
    positions = spec.element_positions() if positions is None else np.asarray(positions, dtype=float)
    k = spec.wavenumber
    Z = coupling_matrix(positions, k, spec.self_impedance, spec.coupling_strength, spec.coupling_decay)
    theta, phi = np.meshgrid(grid.theta, grid.phi, indexing="ij")
    fields = embedded_field(positions, k, spec.element_exponent_q, theta, phi)
    logger.debug("synthesized %d-port network at %.6g Hz", len(positions), spec.frequency)
    return PortNetwork(
        Z=Z,
        port_positions=positions,
        grid=grid,
        port_fields=fields,
        oc_pattern=oc_pattern if oc_pattern is not None else ComplexPattern.zeros(grid),
        frequency=spec.frequency,
        element_exponent_q=spec.element_exponent_q,
    )


def open_circuit_voltages(net, wave):
    """v_oc,m = A * E_m(incident direction), by reciprocity."""
    if abs(wave.frequency - net.frequency) > 1e-9 * net.frequency:
        raise InputError(f"incident frequency {wave.frequency} does not match network frequency {net.frequency}")
    theta, phi = wave.direction
    field = embedded_field(net.port_positions, net.wavenumber, net.element_exponent_q, theta, phi)
    return wave.amplitude * field


def network_document(net, pattern_paths, oc_path):
    """JSON-ready description of a network; patterns are stored separately."""
    return {
        "version": NETWORK_FORMAT_VERSION,
        "frequency_hz": float(net.frequency),
        "element_exponent_q": float(net.element_exponent_q),
        "grid": net.grid.descriptor(),
        "port_positions": [[float(x), float(y)] for x, y in net.port_positions],
        "z": [[float(z.real), float(z.imag)] for z in net.Z.ravel()],
        "patterns": {"ports": list(pattern_paths), "oc": oc_path},
    }


def load_network(doc, read_pattern):
    """Rebuild a PortNetwork; `read_pattern(path)` returns a ComplexPattern."""
    try:
        if doc.get("version") != NETWORK_FORMAT_VERSION:
            raise InputError(f"unsupported network version {doc.get('version')!r}")
        positions = np.array(doc["port_positions"], dtype=float).reshape(-1, 2)
        m = positions.shape[0]
        pairs = np.array(doc["z"], dtype=float).reshape(m * m, 2)
        Z = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(m, m)
        grid = AngleGrid.from_descriptor(doc["grid"])
        ports = [read_pattern(p) for p in doc["patterns"]["ports"]]
        oc = read_pattern(doc["patterns"]["oc"])
        frequency = float(doc["frequency_hz"])
        q = float(doc["element_exponent_q"])
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"malformed network document: {e}")
    if len(ports) != m:
        raise InputError(f"network lists {len(ports)} patterns for {m} ports")
    for p in ports + [oc]:
        if p.grid.shape != grid.shape or not np.allclose(p.grid.theta, grid.theta):
            raise InputError("pattern grid does not match the network grid")
    fields = np.stack([p.values for p in ports]) if ports else np.zeros((0,) + grid.shape, dtype=complex)
    return PortNetwork(Z, positions, grid, fields, ComplexPattern(grid, oc.values), frequency, q)
