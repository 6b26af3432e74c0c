# -*- coding: utf-8 -*-
"""Multiport Thevenin scattering engine.

Port currents follow i = -(Z + Z_L)^-1 v_oc and the scattered pattern is
E_s = sum_m i_m E_m + E_oc.
"""

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg.lapack import get_lapack_funcs

from .errors import InputError, SingularNetworkError
from .field import ComplexPattern
from .oracle import open_circuit_voltages

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e12

# measured shifter reflections: -2.2 dB at 0 deg, -1 dB at 180 deg
SHIFTER_REFLECTION = (10 ** (-2.2 / 20.0) + 0.0j, -(10 ** (-1.0 / 20.0)) + 0.0j)


class LoadKind(str, Enum):
    OPEN = "open"
    SHORT = "short"
    IMPEDANCE = "impedance"
    ONE_BIT_SHIFTER = "one_bit_shifter"
    DIODE_SWITCH = "diode_switch"
    REFLECTION = "reflection"


@dataclass(frozen=True)
class LoadSettings:
    open_impedance: float = 1e9
    diode_on_resistance: float = 1.0
    reference_impedance: float = 50.0

    def __post_init__(self):
        if self.open_impedance <= 0 or self.reference_impedance <= 0 or self.diode_on_resistance < 0:
            raise InputError("load settings must be positive")


DEFAULT_LOADS = LoadSettings()


def reflection_to_impedance(gamma, z0=50.0):
    gamma = complex(gamma)
    if abs(gamma) > 1.0 + 1e-12:
        raise InputError(f"reflection coefficient {gamma} is active (|gamma| > 1)")
    if abs(1.0 - gamma) < 1e-15:
        raise InputError("reflection coefficient 1 has no finite impedance; use an open load")
    return z0 * (1.0 + gamma) / (1.0 - gamma)


@dataclass(frozen=True)
class LoadModel:
    kind: LoadKind
    value: object = None

    def __post_init__(self):
        kind = LoadKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is LoadKind.IMPEDANCE:
            z = complex(self.value)
            if z.real < 0:
                raise InputError(f"load impedance {z} has a negative real part")
            object.__setattr__(self, "value", z)
        elif kind is LoadKind.ONE_BIT_SHIFTER:
            if self.value not in (0, 1):
                raise InputError(f"shifter state must be 0 or 1, got {self.value!r}")
            object.__setattr__(self, "value", int(self.value))
        elif kind is LoadKind.DIODE_SWITCH:
            object.__setattr__(self, "value", bool(self.value))
        elif kind is LoadKind.REFLECTION:
            gamma = complex(self.value)
            if abs(gamma) > 1.0 + 1e-12:
                raise InputError(f"reflection coefficient {gamma} is active (|gamma| > 1)")
            object.__setattr__(self, "value", gamma)

    @classmethod
    def open(cls):
        return cls(LoadKind.OPEN)

    @classmethod
    def short(cls):
        return cls(LoadKind.SHORT)

    @classmethod
    def impedance(cls, z):
        return cls(LoadKind.IMPEDANCE, z)

    @classmethod
    def one_bit_shifter(cls, state):
        return cls(LoadKind.ONE_BIT_SHIFTER, state)

    @classmethod
    def diode_switch(cls, on):
        return cls(LoadKind.DIODE_SWITCH, on)

    @classmethod
    def reflection(cls, gamma):
        return cls(LoadKind.REFLECTION, gamma)

    def impedance_ohms(self, settings=DEFAULT_LOADS):
        kind = self.kind
        if kind is LoadKind.OPEN:
            return complex(settings.open_impedance)
        if kind is LoadKind.SHORT:
            return 0j
        if kind is LoadKind.IMPEDANCE:
            return self.value
        if kind is LoadKind.ONE_BIT_SHIFTER:
            return reflection_to_impedance(SHIFTER_REFLECTION[self.value], settings.reference_impedance)
        if kind is LoadKind.DIODE_SWITCH:
            return complex(settings.diode_on_resistance) if self.value else complex(settings.open_impedance)
        return reflection_to_impedance(self.value, settings.reference_impedance)

    def as_dict(self):
        doc = {"kind": self.kind.value}
        if isinstance(self.value, complex):
            doc["value"] = [self.value.real, self.value.imag]
        elif self.value is not None:
            doc["value"] = self.value
        return doc

    @classmethod
    def from_dict(cls, doc):
        value = doc.get("value")
        if isinstance(value, list):
            value = complex(*value)
        return cls(doc["kind"], value)


@dataclass(frozen=True)
class StateVector:
    loads: tuple

    def __post_init__(self):
        object.__setattr__(self, "loads", tuple(self.loads))

    def __len__(self):
        return len(self.loads)

    def __iter__(self):
        return iter(self.loads)

    def __getitem__(self, index):
        return self.loads[index]

    @classmethod
    def uniform(cls, load, count):
        return cls((load,) * count)

    def replace(self, index, load):
        loads = list(self.loads)
        loads[index] = load
        return StateVector(loads)

    def as_list(self):
        return [load.as_dict() for load in self.loads]

    @classmethod
    def from_list(cls, items):
        try:
            return cls(LoadModel.from_dict(item) for item in items)
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed state vector: {e}")


@dataclass(frozen=True, eq=False)
class ScatterResult:
    currents: np.ndarray
    pattern: ComplexPattern

    def currents_document(self):
        return {"currents": [[float(i.real), float(i.imag)] for i in self.currents]}


def load_matrix(states, settings=DEFAULT_LOADS):
    """Diagonal load impedance matrix Z_L for a state vector."""
    return np.diag(np.array([load.impedance_ohms(settings) for load in states], dtype=complex))


def _factor(A):
    """LU factors of A and the matching getrs, after a 1-norm condition check.

    Raises SingularNetworkError when the estimate reaches MAX_CONDITION.
    """
    lange, gecon, getrf, getrs = get_lapack_funcs(("lange", "gecon", "getrf", "getrs"), (A,))
    anorm = lange("1", A)
    lu, piv, info = getrf(A)
    if info > 0:
        raise SingularNetworkError(np.inf)
    rcond, _ = gecon(lu, anorm, norm="1")
    condition = np.inf if rcond == 0 else 1.0 / rcond
    if not np.isfinite(condition) or condition >= MAX_CONDITION:
        raise SingularNetworkError(condition)
    return lu, piv, getrs


def solve_currents(A, v_oc):
    """Solve A i = -v_oc with LU and a 1-norm condition estimate.

    Raises SingularNetworkError when the estimate reaches MAX_CONDITION.
    """
    A = np.asarray(A, dtype=complex)
    v = -np.asarray(v_oc, dtype=complex)
    if A.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    lu, piv, getrs = _factor(A)
    currents, info = getrs(lu, piv, v)
    return currents


def switched_currents(net, base_loads, switch_ports, on_impedance, off_impedance, v_oc):
    """Port currents for every on/off combination of the switch ports.

    Row s of the (2**Q, M) result has switch q closed when bit q of s is set.
    The network is factored once with every switch closed; opening a switch
    is a rank-one update, so each row costs one Q x Q solve.
    """
    ports = np.asarray(switch_ports, dtype=int)
    loads = np.array(base_loads, dtype=complex)
    loads[ports] = on_impedance
    A = net.Z + np.diag(loads)
    count = ports.size
    rhs = np.zeros((net.port_count, count + 1), dtype=complex)
    rhs[:, 0] = -np.asarray(v_oc, dtype=complex)
    rhs[ports, np.arange(1, count + 1)] = 1.0
    lu, piv, getrs = _factor(A)
    solution, info = getrs(lu, piv, rhs)
    closed_currents, W = solution[:, 0], solution[:, 1:]
    if count == 0 or off_impedance == on_impedance:
        return np.tile(closed_currents, (2 ** count, 1))

    closed = ((np.arange(2 ** count)[:, None] >> np.arange(count)) & 1).astype(bool)
    # rows of open switches are scaled by 1 / (z_off - z_on)
    diagonal = np.where(closed, 1.0, 1.0 / (off_impedance - on_impedance))
    coupled = np.where(closed, 0.0, 1.0)
    G = diagonal[:, :, None] * np.eye(count) + coupled[:, :, None] * W[ports][None, :, :]
    condition = np.linalg.cond(G)
    if not np.all(np.isfinite(condition)) or condition.max() >= MAX_CONDITION:
        raise SingularNetworkError(float(np.max(condition)))
    update = np.linalg.solve(G, (coupled * closed_currents[ports][None, :])[:, :, None])[:, :, 0]
    return closed_currents[None, :] - update @ W.T


def port_currents(net, Z_L, v_oc):
    Z_L = np.asarray(Z_L, dtype=complex)
    if Z_L.ndim == 1:
        Z_L = np.diag(Z_L)
    if Z_L.shape != net.Z.shape or len(v_oc) != net.port_count:
        raise InputError("load matrix and voltage vector must match the network port count")
    return solve_currents(net.Z + Z_L, v_oc)


def pattern_from_currents(net, currents):
    values = np.tensordot(np.asarray(currents, dtype=complex), net.port_fields, axes=1)
    return ComplexPattern(net.grid, values + net.oc_pattern.values)


def _check_states(net, states):
    if len(states) != net.port_count:
        raise InputError(f"state vector has {len(states)} loads for {net.port_count} ports")


def scattered_pattern(net, states, wave, settings=DEFAULT_LOADS):
    _check_states(net, states)
    v_oc = open_circuit_voltages(net, wave)
    currents = port_currents(net, load_matrix(states, settings), v_oc)
    return ScatterResult(currents=currents, pattern=pattern_from_currents(net, currents))


def scattered_field_at(net, states, wave, direction, settings=DEFAULT_LOADS, v_oc=None):
    """E_s at one grid direction without building the full pattern."""
    _check_states(net, states)
    if v_oc is None:
        v_oc = open_circuit_voltages(net, wave)
    fields, oc = net.fields_at(*direction)
    currents = port_currents(net, load_matrix(states, settings), v_oc)
    return complex(fields @ currents + oc)


def matched_reference_currents(net, wave, z0=50.0):
    """Currents with every port terminated in the reference impedance."""
    v_oc = open_circuit_voltages(net, wave)
    return solve_currents(net.Z + z0 * np.eye(net.port_count), v_oc)


def matched_reference_oc(net, wave, z0=50.0):
    """Structural pattern that makes E_s the field relative to a matched surface.

    With this E_oc, E_s = sum_m (i_m - i_ref,m) E_m, so a coupling-free port
    with Z_self = z0 scatters in proportion to its load reflection coefficient.
    """
    i_ref = matched_reference_currents(net, wave, z0)
    values = -np.tensordot(i_ref, net.port_fields, axes=1)
    return ComplexPattern(net.grid, values)
