# -*- coding: utf-8 -*-
"""Discrete beam-steering codebooks: quantize an ideal profile, then refine."""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import EmptyPhaseTableError, InputError
from .field import magnitude_db, pattern_metrics
from .oracle import IncidentWave, open_circuit_voltages, wavenumber
from .thevenin import (DEFAULT_LOADS, SHIFTER_REFLECTION, LoadModel, StateVector,
                       pattern_from_currents, port_currents, scattered_pattern)

logger = logging.getLogger(__name__)

EXHAUSTIVE_BITS = 12


@dataclass(frozen=True)
class SteeringTarget:
    beam_direction: tuple
    incident: IncidentWave

    def __post_init__(self):
        theta, phi = self.beam_direction
        if not -90.0 <= theta <= 90.0:
            raise InputError(f"beam theta {theta} is outside [-90, 90]")
        object.__setattr__(self, "beam_direction", (float(theta), float(phi)))


@dataclass(frozen=True)
class ElementAlphabet:
    """Available element states: reflection phase (degrees) and load per state."""

    phases: tuple
    loads: tuple

    def __post_init__(self):
        if not self.phases:
            raise EmptyPhaseTableError()
        if len(self.phases) != len(self.loads):
            raise InputError("every element state needs both a phase and a load")
        object.__setattr__(self, "phases", tuple(float(p) % 360.0 for p in self.phases))
        object.__setattr__(self, "loads", tuple(self.loads))

    @property
    def size(self):
        return len(self.phases)

    def state_vector(self, indices):
        return StateVector(self.loads[i] for i in indices)

    def impedances(self, settings=DEFAULT_LOADS):
        return np.array([load.impedance_ohms(settings) for load in self.loads], dtype=complex)


def one_bit_alphabet():
    """The 1-bit mmWave shifter: states 0 and 1, 180 degrees apart."""
    phases = tuple(float(np.degrees(np.angle(g))) % 360.0 for g in SHIFTER_REFLECTION)
    return ElementAlphabet(phases, (LoadModel.one_bit_shifter(0), LoadModel.one_bit_shifter(1)))


def reflection_alphabet(phases, magnitude=0.9):
    """States realized as reflective loads with a common magnitude."""
    if not 0.0 < magnitude < 1.0:
        raise InputError("reflection magnitude must lie in (0, 1)")
    loads = tuple(LoadModel.reflection(magnitude * np.exp(1j * np.radians(p))) for p in phases)
    return ElementAlphabet(tuple(phases), loads)


@dataclass(frozen=True, eq=False)
class SteeringCodebook:
    states: tuple
    metrics: object
    method: str
    flips: int = 0
    objective: float = 0.0
    pattern: object = None

    def as_dict(self):
        doc = {"states": list(self.states), "method": self.method, "flips": self.flips,
               "objective": float(self.objective)}
        if self.metrics is not None:
            doc["metrics"] = self.metrics.as_dict()
        return doc


def _transverse(direction):
    theta, phi = np.radians(direction)
    return np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi)


def ideal_phase_profile(target, positions, frequency):
    """Per-element phase (degrees, [0, 360)) aligning incident and beam path delays."""
    k = wavenumber(frequency)
    bu, bv = _transverse(target.beam_direction)
    iu, iv = _transverse(target.incident.direction)
    positions = np.asarray(positions, dtype=float)
    phase = -k * (positions[:, 0] * (bu + iu) + positions[:, 1] * (bv + iv))
    degrees = np.mod(np.degrees(phase), 360.0)
    degrees[degrees >= 360.0] = 0.0
    return degrees


def quantize_states(profile, element_phase_table):
    """Nearest available phase per element by wrapped distance; ties go low."""
    table = np.asarray(element_phase_table, dtype=float)
    if table.size == 0:
        raise EmptyPhaseTableError()
    profile = np.asarray(profile, dtype=float)
    distance = np.abs(np.mod(table[None, :] - profile[:, None] + 180.0, 360.0) - 180.0)
    return np.argmin(distance, axis=1)


class _TargetField:
    """|E_s(target)|^2 for index vectors, reusing v_oc and the target fields."""

    def __init__(self, net, target, alphabet, settings):
        self.net = net
        self.impedances = alphabet.impedances(settings)
        self.v_oc = open_circuit_voltages(net, target.incident)
        self.fields, self.oc = net.fields_at(*target.beam_direction)

    def __call__(self, indices):
        currents = port_currents(self.net, self.impedances[np.asarray(indices)], self.v_oc)
        return float(abs(self.fields @ currents + self.oc) ** 2)

    def currents(self, indices):
        return port_currents(self.net, self.impedances[np.asarray(indices)], self.v_oc)


def _exhaustive(score, initial, size, budget):
    """Best codebook that differs from `initial` in at most `budget` elements."""
    best, best_value = list(initial), score(initial)
    for count in range(1, min(budget, len(initial)) + 1):
        for elements in itertools.combinations(range(len(initial)), count):
            choices = [[s for s in range(size) if s != initial[m]] for m in elements]
            for states in itertools.product(*choices):
                candidate = list(initial)
                for m, s in zip(elements, states):
                    candidate[m] = s
                value = score(candidate)
                if value > best_value:
                    best, best_value = candidate, value
    flips = sum(a != b for a, b in zip(best, initial))
    return best, best_value, flips


def _greedy(score, initial, size, budget):
    current = list(initial)
    value = score(current)
    flips = 0
    while flips < budget:
        best_move, best_value = None, value
        for m in range(len(current)):
            for s in range(size):
                if s == current[m]:
                    continue
                trial = current.copy()
                trial[m] = s
                trial_value = score(trial)
                if trial_value > best_value:
                    best_move, best_value = (m, s), trial_value
        if best_move is None:
            break
        current[best_move[0]] = best_move[1]
        value = best_value
        flips += 1
        logger.debug("refine flip %d: element %d -> state %d, |E|^2 %.6g", flips, best_move[0], best_move[1], value)
    return current, value, flips


def refine_codebook(net, initial, target, budget, alphabet, settings=DEFAULT_LOADS, cut_phi=0.0,
                    exhaustive_bits=EXHAUSTIVE_BITS):
    """Improve a codebook on |E_s(target)|^2.

    Budget 0 keeps the initial codebook and no result differs from it in
    more than `budget` elements. Codebook spaces of at most
    2**exhaustive_bits states are searched exhaustively within that radius,
    larger ones by steepest single-element moves until the budget or a
    local optimum.
    """
    if budget < 0:
        raise InputError("refine budget must be non-negative")
    initial = [int(s) for s in initial]
    if len(initial) != net.port_count:
        raise InputError(f"codebook has {len(initial)} states for {net.port_count} ports")
    if any(not 0 <= s < alphabet.size for s in initial):
        raise InputError(f"state indices must lie in 0..{alphabet.size - 1}")
    score = _TargetField(net, target, alphabet, settings)

    if budget == 0:
        states, value, flips, method = initial, score(initial), 0, "quantized"
    elif alphabet.size ** len(initial) <= 2 ** exhaustive_bits:
        states, value, flips = _exhaustive(score, initial, alphabet.size, budget)
        method = "exhaustive"
    else:
        states, value, flips = _greedy(score, initial, alphabet.size, budget)
        method = "greedy"

    pattern = pattern_from_currents(net, score.currents(states))
    return SteeringCodebook(
        states=tuple(states),
        metrics=pattern_metrics(pattern, cut_phi),
        method=method,
        flips=flips,
        objective=value,
        pattern=pattern,
    )


@dataclass(frozen=True, eq=False)
class SteeringRow:
    target_theta: float
    achieved_theta: float = float("nan")
    pointing_error: float = float("nan")
    sll_db: float = float("nan")
    peak_rel_db: float = float("nan")
    codebook: SteeringCodebook = None
    pattern: object = None
    error: str = ""


def steer_target(net, target, alphabet, budget, settings=DEFAULT_LOADS, cut_phi=0.0,
                 exhaustive_bits=EXHAUSTIVE_BITS):
    theta, phi = target.beam_direction
    if not net.grid.contains(theta, phi):
        logger.warning("target (%s, %s) is outside the pattern grid", theta, phi)
        return SteeringRow(target_theta=theta, error="target outside grid")
    profile = ideal_phase_profile(target, net.port_positions, net.frequency)
    initial = quantize_states(profile, alphabet.phases)
    codebook = refine_codebook(net, initial, target, budget, alphabet, settings, cut_phi, exhaustive_bits)
    achieved = codebook.metrics.peak_direction[0]
    return SteeringRow(
        target_theta=theta,
        achieved_theta=achieved,
        pointing_error=abs(achieved - theta),
        sll_db=codebook.metrics.sidelobe_level_db,
        peak_rel_db=codebook.metrics.peak_level_db,
        codebook=codebook,
        pattern=codebook.pattern,
    )


def steering_report(net, targets, alphabet, budget, settings=DEFAULT_LOADS, cut_phi=0.0, workers=1,
                    exhaustive_bits=EXHAUSTIVE_BITS):
    """One row per target, in target order.

    Targets that are already SteeringRow (see steering_targets) pass through.
    """
    def run(target):
        if isinstance(target, SteeringRow):
            return target
        return steer_target(net, target, alphabet, budget, settings, cut_phi, exhaustive_bits)

    if workers > 1 and len(targets) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, targets))
    return [run(t) for t in targets]


def steering_targets(thetas, phi, incident):
    """One SteeringTarget per theta; a theta that fails validation becomes an error row."""
    targets = []
    for theta in thetas:
        try:
            targets.append(SteeringTarget((theta, phi), incident))
        except InputError as e:
            logger.warning("target theta %s skipped: %s", theta, e)
            targets.append(SteeringRow(target_theta=float(theta), error=str(e)))
    return targets


@dataclass(frozen=True)
class BandPoint:
    target_theta: float
    frequency: float
    achieved_theta: float
    pointing_error: float
    sll_db: float
    # peak |E_s| against the peak at the design frequency
    gain_db: float


def band_sweep(rows, alphabet, networks, incident, settings=DEFAULT_LOADS, cut_phi=0.0):
    """Re-evaluate each row's codebook, unchanged, on networks at other frequencies.

    `incident(frequency)` returns the incident wave at a frequency. Rows that
    carry an error are skipped.
    """
    points = []
    for row in rows:
        if row.error:
            continue
        design_peak = np.abs(row.pattern.values).max()
        states = alphabet.state_vector(row.codebook.states)
        for net in networks:
            pattern = scattered_pattern(net, states, incident(net.frequency), settings).pattern
            metrics = pattern_metrics(pattern, cut_phi)
            achieved = metrics.peak_direction[0]
            points.append(BandPoint(
                target_theta=row.target_theta,
                frequency=net.frequency,
                achieved_theta=achieved,
                pointing_error=abs(achieved - row.target_theta),
                sll_db=metrics.sidelobe_level_db,
                gain_db=float(magnitude_db(np.abs(pattern.values).max(), design_peak)),
            ))
    return points
