# -*- coding: utf-8 -*-
"""Sub-6 GHz element topology: port incidence, DC feeding and phase entropy.

Element indices and port IDs are 1-based at the API boundary (matching the
incidence matrix encoding Y(n1, n2) = m) and 0-based internally.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .entropy import PhaseSet, entropies
from .errors import IncidenceMatrixError, InputError, NullFieldError
from .oracle import IncidentWave, open_circuit_voltages, synthesize_network
from .thevenin import DEFAULT_LOADS, LoadModel, StateVector, matched_reference_oc, switched_currents

logger = logging.getLogger(__name__)

NULL_FIELD = 1e-12
ANODE_SIDES = ("n1", "n2")


@dataclass(frozen=True, eq=False)
class PortIncidenceMatrix:
    """N x N matrix whose entry Y(n1, n2) is the port ID joining two elements."""

    Y: np.ndarray

    def __post_init__(self):
        try:
            Y = np.array(self.Y, dtype=int)
        except (TypeError, ValueError) as e:
            raise IncidenceMatrixError(f"not an integer matrix ({e})")
        if Y.ndim != 2 or Y.shape[0] != Y.shape[1] or Y.shape[0] == 0:
            raise IncidenceMatrixError(f"expected a non-empty square matrix, got shape {Y.shape}")
        if np.any(np.diag(Y) != 0):
            raise IncidenceMatrixError("diagonal entries must be 0")
        if np.any(Y != Y.T):
            raise IncidenceMatrixError("matrix must be symmetric")
        upper = Y[np.triu_indices(Y.shape[0], k=1)]
        ids = upper[upper != 0]
        m = int(ids.max()) if ids.size else 0
        if np.any(ids < 0):
            raise IncidenceMatrixError("port IDs must be positive")
        counts = np.bincount(ids, minlength=m + 1)[1:]
        if np.any(counts != 1):
            bad = int(np.flatnonzero(counts != 1)[0]) + 1
            raise IncidenceMatrixError(f"port {bad} appears {counts[bad - 1]} times (expected exactly one pair)")
        rows, cols = np.nonzero(np.triu(Y, k=1))
        endpoints = np.zeros((m, 2), dtype=int)
        endpoints[Y[rows, cols] - 1] = np.column_stack((rows, cols))
        Y.setflags(write=False)
        endpoints.setflags(write=False)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "endpoints", endpoints)

    @property
    def N(self):
        return self.Y.shape[0]

    @property
    def M(self):
        return self.endpoints.shape[0]

    def adjacency(self):
        """Per element, the list of (neighbour, 0-based port index)."""
        adj = [[] for _ in range(self.N)]
        for p, (a, b) in enumerate(self.endpoints):
            adj[a].append((int(b), p))
            adj[b].append((int(a), p))
        return adj


def grid_incidence(rows, cols):
    """Incidence matrix of a rows x cols element grid.

    Horizontal ports are numbered first, row-major, then vertical ports.
    Elements are numbered row-major from 1.
    """
    n = rows * cols
    Y = np.zeros((n, n), dtype=int)
    port = 0
    for r in range(rows):
        for c in range(cols - 1):
            port += 1
            a, b = r * cols + c, r * cols + c + 1
            Y[a, b] = Y[b, a] = port
    for r in range(rows - 1):
        for c in range(cols):
            port += 1
            a, b = r * cols + c, (r + 1) * cols + c
            Y[a, b] = Y[b, a] = port
    return PortIncidenceMatrix(Y)


@dataclass(frozen=True)
class Switch:
    port: int
    anode_side: str

    def __post_init__(self):
        if self.anode_side not in ANODE_SIDES:
            raise InputError(f"anode_side must be one of {ANODE_SIDES}, got {self.anode_side!r}")
        object.__setattr__(self, "port", int(self.port))

    def terminals(self, incidence):
        """(cathode, anode) element indices, 0-based."""
        n1, n2 = incidence.endpoints[self.port - 1]
        return (int(n2), int(n1)) if self.anode_side == "n1" else (int(n1), int(n2))


@dataclass(frozen=True, eq=False)
class GeometryVector:
    x0: np.ndarray
    switches: tuple = ()

    def __post_init__(self):
        x0 = np.array(self.x0, dtype=np.int8).ravel()
        if np.any((x0 != 0) & (x0 != 1)):
            raise InputError("x0 must be binary")
        switches = tuple(self.switches)
        ports = [s.port for s in switches]
        if len(set(ports)) != len(ports):
            raise InputError("switch positions must be distinct")
        for p in ports:
            if not 1 <= p <= x0.size:
                raise InputError(f"switch port {p} is outside 1..{x0.size}")
            if x0[p - 1]:
                raise InputError(f"switch port {p} is also hard-connected in x0")
        x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "switches", switches)

    @property
    def Q(self):
        return len(self.switches)

    @property
    def bitstring(self):
        return "".join("1" if b else "0" for b in self.x0)

    def key(self):
        return (self.x0.tobytes(), self.switches)

    def as_dict(self):
        return {
            "x0": self.bitstring,
            "switches": [{"port": s.port, "anode_side": s.anode_side} for s in self.switches],
        }

    @classmethod
    def from_dict(cls, doc):
        try:
            bits = doc["x0"]
            if set(bits) - {"0", "1"}:
                raise InputError("x0 must be a bitstring of 0 and 1")
            switches = [Switch(s["port"], s["anode_side"]) for s in doc.get("switches", [])]
        except (KeyError, TypeError) as e:
            raise InputError(f"malformed geometry document: {e}")
        return cls([int(b) for b in bits], switches)


@dataclass(frozen=True)
class FeedingSpec:
    """Fixed DC feeding points: one ground and three control elements (1-based)."""

    ground: int
    controls: tuple

    def __post_init__(self):
        controls = tuple(int(c) for c in self.controls)
        if len(controls) != 3:
            raise InputError(f"expected three control points, got {len(controls)}")
        points = (int(self.ground),) + controls
        if len(set(points)) != 4:
            raise InputError("the four DC points must be distinct")
        if min(points) < 1:
            raise InputError("DC points are 1-based element indices")
        object.__setattr__(self, "ground", int(self.ground))
        object.__setattr__(self, "controls", controls)

    @property
    def dc_points(self):
        return (self.ground,) + self.controls


def _check_dimensions(incidence, x, spec):
    if x.x0.size != incidence.M:
        raise InputError(f"x0 has {x.x0.size} flags for {incidence.M} ports")
    if max(spec.dc_points) > incidence.N:
        raise InputError(f"DC point outside 1..{incidence.N}")


def dc_components(incidence, x0):
    """Connected-component label per element over hard-connected ports."""
    edges = incidence.endpoints[np.asarray(x0, dtype=bool)]
    n = incidence.N
    graph = coo_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    return labels


def feeding_constraint(incidence, x, spec):
    """1 when the geometry can be DC-biased from the fixed feeding points, else 0.

    Diodes are DC breaks: each switch only contributes its two terminals.
    """
    _check_dimensions(incidence, x, spec)
    labels = dc_components(incidence, x.x0)
    ground = labels[spec.ground - 1]
    controls = [labels[c - 1] for c in spec.controls]

    if len({ground, *controls}) != 4:
        return 0
    reached = []
    for sw in x.switches:
        cathode, anode = sw.terminals(incidence)
        if labels[cathode] != ground:
            return 0
        hits = [i for i, c in enumerate(controls) if c == labels[anode]]
        if len(hits) != 1:
            return 0
        reached.append(hits[0])
    if len(set(reached)) != len(reached):
        return 0
    return 1


def element_states(x):
    """All 2^Q switch combinations; bit q of the state index drives switch q."""
    base = [LoadModel.short() if b else LoadModel.open() for b in x.x0]
    states = []
    for index in range(2 ** x.Q):
        loads = list(base)
        for q, sw in enumerate(x.switches):
            loads[sw.port - 1] = LoadModel.diode_switch(bool((index >> q) & 1))
        states.append(StateVector(loads))
    return states


def _hard_wired_impedances(x0, settings):
    return np.where(np.asarray(x0) == 1, LoadModel.short().impedance_ohms(settings),
                    LoadModel.open().impedance_ohms(settings)).astype(complex)


def _diode_impedances(settings):
    return (LoadModel.diode_switch(True).impedance_ohms(settings),
            LoadModel.diode_switch(False).impedance_ohms(settings))


def state_impedances(x, settings=DEFAULT_LOADS):
    """Load impedance of every port in every switch state, shaped (2^Q, M)."""
    table = np.tile(_hard_wired_impedances(x.x0, settings), (2 ** x.Q, 1))
    index = np.arange(2 ** x.Q)
    on, off = _diode_impedances(settings)
    for q, sw in enumerate(x.switches):
        table[:, sw.port - 1] = np.where((index >> q) & 1, on, off)
    return table


def direction_fields(net, directions):
    """Port fields (M, D) and E_oc (D,) at grid directions."""
    columns = [net.fields_at(theta, phi) for theta, phi in directions]
    if not columns:
        return np.zeros((net.port_count, 0), dtype=complex), np.zeros(0, dtype=complex)
    return np.column_stack([c[0] for c in columns]), np.array([c[1] for c in columns], dtype=complex)


def state_fields(net, x, wave, directions, settings=DEFAULT_LOADS, v_oc=None, fields=None):
    """E_s for every switch state of `x` at every direction, shaped (2^Q, directions).

    `v_oc` and `fields` (as returned by direction_fields) are reused when given.
    """
    if v_oc is None:
        v_oc = open_circuit_voltages(net, wave)
    port_fields, oc = direction_fields(net, directions) if fields is None else fields
    on, off = _diode_impedances(settings)
    currents = switched_currents(net, _hard_wired_impedances(x.x0, settings), [sw.port - 1 for sw in x.switches],
                                 on, off, v_oc)
    return currents @ port_fields + oc[None, :]


def _phase_set(values, state_offset=0):
    magnitude = np.abs(values)
    weak = np.flatnonzero(magnitude < NULL_FIELD)
    if weak.size:
        raise NullFieldError(int(weak[0]) + state_offset, float(magnitude[weak[0]]))
    return PhaseSet.from_degrees(np.degrees(np.angle(values)))


def reflection_phases(net, x, wave, observation, settings=DEFAULT_LOADS):
    """Reflection phase of every switch state at one observation direction."""
    values = state_fields(net, x, wave, [tuple(observation)], settings)[:, 0]
    return _phase_set(values)


@dataclass(frozen=True)
class EntropyObjectiveSpec:
    angles: tuple
    frequencies: tuple
    angle_weights: tuple = None
    frequency_weights: tuple = None
    incident: tuple = (0.0, 0.0)

    def __post_init__(self):
        angles = tuple((float(t), float(p)) for t, p in self.angles)
        frequencies = tuple(float(f) for f in self.frequencies)
        if not angles or not frequencies:
            raise InputError("entropy objective needs at least one angle and one frequency")
        for name, weights, count in (("angle", self.angle_weights, len(angles)),
                                     ("frequency", self.frequency_weights, len(frequencies))):
            if weights is not None and (len(weights) != count or min(weights) < 0 or sum(weights) <= 0):
                raise InputError(f"{name} weights must be {count} non-negative values with a positive sum")
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "frequencies", frequencies)

    def samples(self):
        """(angle, frequency, weight) triples."""
        aw = self.angle_weights or (1.0,) * len(self.angles)
        fw = self.frequency_weights or (1.0,) * len(self.frequencies)
        return [(a, f, wa * wf) for a, wa in zip(self.angles, aw) for f, wf in zip(self.frequencies, fw)]


@dataclass(frozen=True, eq=False)
class TopologyProblem:
    """Everything the entropy objective needs about one element design.

    `array` describes the element grid (rows, cols, pitch as spacing) and the
    oracle parameters; its frequency is replaced per sample. With a
    `reference_impedance` the structural pattern is that of the element with
    every port terminated in it, so E_s is measured against a matched
    element; None leaves E_oc at zero.
    """

    incidence: PortIncidenceMatrix
    feeding: FeedingSpec
    array: object
    grid: object
    objective: EntropyObjectiveSpec
    switches: int = 3
    loads: object = DEFAULT_LOADS
    reference_impedance: float = None
    _networks: dict = field(default_factory=dict, init=False, repr=False)
    _inputs: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if self.array.rows * self.array.cols != self.incidence.N:
            raise InputError(f"element grid has {self.array.rows * self.array.cols} elements, incidence matrix {self.incidence.N}")
        if self.reference_impedance is not None and self.reference_impedance <= 0:
            raise InputError("topology reference impedance must be positive")
        for theta, phi in self.objective.angles:
            if not self.grid.contains(theta, phi):
                raise InputError(f"objective angle ({theta}, {phi}) is not on the grid")
        for f in self.objective.frequencies:
            self.network(f)

    @property
    def port_positions(self):
        centres = self.array.element_positions()
        ends = self.incidence.endpoints
        return 0.5 * (centres[ends[:, 0]] + centres[ends[:, 1]])

    def network(self, frequency, incident=None):
        """Element network at `frequency`.

        The structural pattern follows the `incident` direction, by default the
        objective's; only default-incidence networks are cached.
        """
        if incident is not None:
            return self._build_network(self.wave(frequency, incident))
        net = self._networks.get(frequency)
        if net is None:
            net = self._networks[frequency] = self._build_network(self.wave(frequency))
        return net

    def _build_network(self, wave):
        net = synthesize_network(self.array.at_frequency(wave.frequency), self.grid, positions=self.port_positions)
        if self.reference_impedance is not None:
            net = net.with_oc_pattern(matched_reference_oc(net, wave, self.reference_impedance))
        return net

    def wave(self, frequency, incident=None):
        return IncidentWave(self.objective.incident if incident is None else incident, frequency)

    def sample_inputs(self, frequency, angles):
        """Network, v_oc and direction fields for one frequency, cached."""
        key = (frequency, tuple(angles))
        inputs = self._inputs.get(key)
        if inputs is None:
            net = self.network(frequency)
            inputs = (net, open_circuit_voltages(net, self.wave(frequency)), direction_fields(net, angles))
            self._inputs[key] = inputs
        return inputs


def sample_entropies(problem, x, angles, frequencies):
    """Entropy H per (angle, frequency); null-field samples contribute 0."""
    table = np.zeros((len(angles), len(frequencies)))
    for j, f in enumerate(frequencies):
        net, v_oc, fields = problem.sample_inputs(f, angles)
        values = state_fields(net, x, problem.wave(f), angles, problem.loads, v_oc, fields)
        magnitude = np.abs(values)
        weak = magnitude.min(axis=0) < NULL_FIELD
        for i in np.flatnonzero(weak):
            state = int(np.argmin(magnitude[:, i]))
            logger.warning("%s at theta=%s phi=%s f=%.6g Hz; sample counted as H=0",
                           NullFieldError(state, float(magnitude[state, i])), angles[i][0], angles[i][1], f)
        table[:, j] = np.where(weak, 0.0, entropies(np.degrees(np.angle(values))))
    return table


def objective(problem, x):
    """Weighted mean phase entropy, or -inf when the geometry is infeasible."""
    if x.Q != problem.switches or feeding_constraint(problem.incidence, x, problem.feeding) == 0:
        return -math.inf
    spec = problem.objective
    table = sample_entropies(problem, x, spec.angles, spec.frequencies)
    fi = {f: j for j, f in enumerate(spec.frequencies)}
    ai = {a: i for i, a in enumerate(spec.angles)}
    samples = spec.samples()
    # fsum keeps the mean independent of sample order
    total = math.fsum(w * table[ai[a], fi[f]] for a, f, w in samples)
    return total / math.fsum(w for _, _, w in samples)


def entropy_sweep(problem, x, thetas, frequencies, phi=0.0):
    """H over a theta sweep (rows) and a frequency list (columns)."""
    return sample_entropies(problem, x, [(float(t), phi) for t in thetas], list(frequencies))


def incidence_sweep(problem, x, thetas, frequency, phi=0.0):
    """Reflection phase of every state against the incidence angle.

    Each incidence theta is observed in its specular direction (-theta, phi).
    Returns a (thetas, 2^Q) array of phases in degrees.
    """
    rows = []
    for theta in thetas:
        theta = float(theta)
        net = problem.network(frequency, (theta, phi))
        if not net.grid.contains(-theta, phi):
            raise InputError(f"specular direction ({-theta}, {phi}) is not on the grid")
        phases = reflection_phases(net, x, problem.wave(frequency, (theta, phi)), (-theta, phi), problem.loads)
        rows.append(phases.phases)
    return np.array(rows).reshape(len(rows), 2 ** x.Q)


def _extend(owner, label, x0, adjacency, blocked, rng, steps):
    for _ in range(steps):
        frontier = [(n, p) for e in np.flatnonzero(owner == label) for n, p in adjacency[e]
                    if owner[n] == -1 and n not in blocked]
        if not frontier:
            return
        n, p = frontier[rng.integers(len(frontier))]
        owner[n] = label
        x0[p] = 1


def _path_to_ground(start, owner, adjacency, blocked, used_ports, rng):
    """Shortest randomized path of free elements from `start` to the ground net."""
    previous = {start: None}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        neighbours = adjacency[current]
        for i in rng.permutation(len(neighbours)):
            n, p = neighbours[i]
            if owner[n] == 0 and p not in used_ports:
                path = [current]
                while previous[path[-1]] is not None:
                    path.append(previous[path[-1]])
                return path, n, p
            if n not in previous and owner[n] == -1 and n not in blocked:
                previous[n] = current
                queue.append(n)
    return None


def _grow_geometry(incidence, feeding, switches, rng, growth=3, extra_edges=0.2):
    adjacency = incidence.adjacency()
    owner = np.full(incidence.N, -1)
    x0 = np.zeros(incidence.M, dtype=np.int8)
    dc = {p - 1 for p in feeding.dc_points}
    owner[feeding.ground - 1] = 0
    _extend(owner, 0, x0, adjacency, dc, rng, int(rng.integers(0, growth + 1)))

    placed = []
    used = set()
    for label, control in enumerate(rng.permutation(feeding.controls)[:switches], start=1):
        start = int(control) - 1
        found = _path_to_ground(start, owner, adjacency, dc - {start}, used, rng)
        if found is None:
            return None
        path, cathode, port = found
        for a, b in zip(path, path[1:]):
            x0[incidence.Y[a, b] - 1] = 1
        owner[path] = label
        anode = path[0]
        n1, _ = incidence.endpoints[port]
        placed.append(Switch(port + 1, "n1" if anode == n1 else "n2"))
        used.add(port)

    for label in range(1, len(placed) + 1):
        _extend(owner, label, x0, adjacency, dc, rng, int(rng.integers(0, growth + 1)))
    for p, (a, b) in enumerate(incidence.endpoints):
        if owner[a] == -1 and owner[b] == -1 and a not in dc and b not in dc and p not in used:
            if rng.random() < extra_edges:
                x0[p] = 1
    return GeometryVector(x0, placed)


def random_feasible_geometry(incidence, feeding, switches, rng, attempts=100):
    """Draw a feasible geometry by growing disjoint cathode and anode nets.

    Returns None when no feasible geometry was produced within `attempts`.
    """
    if switches > len(feeding.controls):
        raise InputError(f"{switches} switches cannot map one-to-one onto {len(feeding.controls)} control points")
    for _ in range(attempts):
        x = _grow_geometry(incidence, feeding, switches, rng)
        if x is not None and feeding_constraint(incidence, x, feeding):
            return x
    return None
