# -*- coding: utf-8 -*-
"""Experiment commands shared by the CLI verbs and the Ansible modules.

Every command computes its outputs in memory and returns them as a
CommandResult; nothing touches the filesystem until the caller hands the
files to reporting.write_outputs.
"""

import csv
import io
import logging
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .codebook import (SteeringTarget, band_sweep, ideal_phase_profile, quantize_states, steering_report,
                       steering_targets)
from .config import read_json_file, read_text_file
from .errors import ConfigError, InputError, NonPassiveNetworkError
from .field import fmt, magnitude_db, pattern_metrics, read_pattern_csv, write_pattern_csv
from .genetic import optimize
from .measurement import background_subtract, read_trace_csv, write_trace_csv
from .oracle import (coupling_matrix, load_network, network_document, open_circuit_voltages, passivity_margin,
                     synthesize_network)
from .psi import PsiCircuit, isolation_dip, resonant_frequency, s21_db, s_parameters, write_sweep_csv
from .reporting import json_text
from .thevenin import matched_reference_oc, pattern_from_currents, port_currents, solve_currents
from .topology import entropy_sweep, incidence_sweep, reflection_phases, state_impedances

logger = logging.getLogger(__name__)

# entropy level the optimized element is compared against in summaries
REFERENCE_ENTROPY = 2.2
# mean entropy over -40..40 deg of the optimized reference element, minus 0.1 bits
ENTROPY_THRESHOLD = 2.45


@dataclass
class CommandResult:
    files: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)


def _csv_text(header, rows):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def _port_pattern_name(m):
    return f"patterns/port_{m + 1:03d}.csv"


def _apply_structural_mode(config, net):
    if config.structural_mode == "matched_reference":
        wave = config.incident_wave(net.frequency)
        net = net.with_oc_pattern(matched_reference_oc(net, wave, config.load_settings().reference_impedance))
    return net


def build_network(config):
    """Synthesized network with the configured structural mode applied."""
    net = synthesize_network(config.array_spec(), config.angle_grid())
    return _apply_structural_mode(config, net)


def read_network(path):
    """Load an exported network; pattern paths resolve against its directory."""
    base = os.path.dirname(os.path.abspath(path))
    doc = read_json_file(path)

    def read_pattern(name):
        return read_pattern_csv(read_text_file(os.path.join(base, name)), name)

    return load_network(doc, read_pattern)


def config_network(config):
    path = config.network_path
    if path:
        logger.info("loading network from %s", path)
        return read_network(path)
    return build_network(config)


def synth_array(config):
    net = build_network(config)
    names = [_port_pattern_name(m) for m in range(net.port_count)]
    files = {name: write_pattern_csv(p) for name, p in zip(names, net.port_patterns)}
    files["patterns/oc.csv"] = write_pattern_csv(net.oc_pattern)
    files["network.json"] = json_text(network_document(net, names, "patterns/oc.csv"))
    margin = passivity_margin(net.Z) if net.port_count else 0.0
    logger.info("synthesized %d ports, passivity margin %.6g ohm", net.port_count, margin)
    return CommandResult(files, {"ports": net.port_count, "frequency_hz": net.frequency, "passivity_margin": margin})


def sub6_element_phases(config, frequency):
    """Reflection phases of the configured geometry at the steering frequency."""
    x = config.geometry()
    if x is None:
        return None
    problem = config.topology_problem()
    o = config.params["objective"]
    phases = reflection_phases(problem.network(frequency), x, problem.wave(frequency),
                               (o["observation_theta"], o["observation_phi"]), problem.loads)
    return [float(p) for p in phases.phases]


def config_alphabet(config, frequency):
    phases = None
    if config.alphabet_kind() == "reflection" and config.steering["element_phases"] is None:
        phases = sub6_element_phases(config, frequency)
    return config.alphabet(phases)


STEERING_HEADER = ("target_theta_deg", "achieved_theta_deg", "pointing_error_deg", "sll_db", "peak_rel_db",
                   "method", "flips", "error")
BAND_HEADER = ("target_theta_deg", "frequency_hz", "achieved_theta_deg", "pointing_error_deg", "sll_db", "gain_db")


def band_networks(config, frequencies):
    """Synthesized networks at each band-sweep frequency."""
    if config.network_path:
        raise ConfigError(f"{config.source}: steering.frequencies needs a synthesized array, not a network file")
    spec = config.array_spec()
    return [_apply_structural_mode(config, synthesize_network(spec.at_frequency(f), config.angle_grid()))
            for f in frequencies]


def steer(config):
    net = config_network(config)
    s = config.steering
    alphabet = config_alphabet(config, net.frequency)
    wave = config.incident_wave(net.frequency)
    targets = steering_targets(s["targets"], s["phi"], wave)
    rows = steering_report(net, targets, alphabet, s["refine_budget"], config.load_settings(), s["phi"],
                           s["workers"], s["exhaustive_bits"])

    files = {}
    table = []
    books = []
    for i, row in enumerate(rows):
        if row.error:
            table.append((fmt(row.target_theta), "", "", "", "", "", "", row.error))
            books.append({"target_theta_deg": row.target_theta, "error": row.error})
            continue
        book = row.codebook
        table.append((fmt(row.target_theta), fmt(row.achieved_theta), fmt(row.pointing_error), fmt(row.sll_db),
                      fmt(row.peak_rel_db), book.method, book.flips, ""))
        books.append(dict(book.as_dict(), target_theta_deg=row.target_theta))
        files[f"patterns/target_{i:03d}.csv"] = write_pattern_csv(row.pattern, s["export_step"])
    files["steering_report.csv"] = _csv_text(STEERING_HEADER, table)
    files["codebooks.json"] = json_text({
        "alphabet": {"phases_deg": list(alphabet.phases), "loads": [load.as_dict() for load in alphabet.loads]},
        "targets": books,
    })
    errors = [r.pointing_error for r in rows if not r.error]
    summary = {
        "targets": len(rows),
        "failed": sum(1 for r in rows if r.error),
        "max_pointing_error_deg": max(errors) if errors else 0.0,
    }

    if s["frequencies"]:
        points = band_sweep(rows, alphabet, band_networks(config, s["frequencies"]), config.incident_wave,
                            config.load_settings(), s["phi"])
        files["band_sweep.csv"] = _csv_text(BAND_HEADER, [
            (fmt(p.target_theta), fmt(p.frequency), fmt(p.achieved_theta), fmt(p.pointing_error), fmt(p.sll_db),
             fmt(p.gain_db)) for p in points])
        summary["band_max_pointing_error_deg"] = max((p.pointing_error for p in points), default=0.0)
    return CommandResult(files, summary)


def _sweep_thetas(o):
    step = o["sweep_theta_step"]
    count = int(round((o["sweep_theta_max"] - o["sweep_theta_min"]) / step)) + 1
    return o["sweep_theta_min"] + step * np.arange(count)


def optimize_topology(config):
    problem = config.topology_problem()
    result = optimize(problem, config.ga_params(), config.seed)
    o = config.params["objective"]
    thetas = _sweep_thetas(o)
    frequencies = problem.objective.frequencies
    table = entropy_sweep(problem, result.best, thetas, frequencies, o["phi"])
    phase_frequency = o["phase_frequency"] or frequencies[len(frequencies) // 2]
    phases = incidence_sweep(problem, result.best, thetas, phase_frequency, o["phi"])

    history = [(r.generation, fmt(r.best), fmt(r.mean), fmt(r.feasible_fraction)) for r in result.history]
    sweep_rows = [(fmt(t),) + tuple(fmt(h) for h in table[i]) for i, t in enumerate(thetas)]
    phase_rows = [(fmt(t),) + tuple(fmt(p) for p in phases[i]) for i, t in enumerate(thetas)]
    mean_entropy = float(table.mean())
    files = {
        "geometry.json": json_text(dict(result.best.as_dict(), objective=result.fitness)),
        "history.csv": _csv_text(("generation", "best", "mean", "feasible_fraction"), history),
        "entropy_vs_angle.csv": _csv_text(("theta_deg",) + tuple(f"H_{fmt(f)}" for f in frequencies), sweep_rows),
        "phase_vs_incidence.csv": _csv_text(
            ("incidence_theta_deg",) + tuple(f"phase_state_{s}" for s in range(phases.shape[1])), phase_rows),
    }
    summary = {
        "objective": result.fitness,
        "mean_entropy": mean_entropy,
        "threshold": ENTROPY_THRESHOLD,
        "above_threshold": mean_entropy >= ENTROPY_THRESHOLD,
        "reference_entropy": REFERENCE_ENTROPY,
        "phase_frequency_hz": phase_frequency,
        "evaluations": result.evaluations,
    }
    files["summary.json"] = json_text(summary)
    return CommandResult(files, summary)


def load_circuits(paths):
    circuits = []
    for path in paths:
        circuits.append(PsiCircuit.from_dict(read_json_file(path), path))
    if not circuits:
        raise InputError("at least one circuit is required")
    return circuits


def psi(circuits, sweep):
    """Isolation sweep of one circuit or of several circuits in cascade."""
    frequencies = sweep.frequencies()
    db = s21_db(s_parameters(circuits, frequencies))
    summary = {
        "elements": len(circuits),
        "resonant_frequencies_hz": [resonant_frequency(c) for c in circuits],
        "dip_frequency_hz": isolation_dip(frequencies, db),
        "min_s21_db": float(db.min()),
        "sweep_step_hz": sweep.step,
    }
    files = {"sweep.csv": write_sweep_csv(frequencies, db), "summary.json": json_text(summary)}
    return CommandResult(files, summary)


def subtract(total_path, env_path):
    total = read_trace_csv(read_text_file(total_path), total_path)
    env = read_trace_csv(read_text_file(env_path), env_path)
    scat = background_subtract(total, env)
    summary = {"points": int(scat.theta.size), "frequency_hz": scat.frequency}
    return CommandResult({"scat.csv": write_trace_csv(scat)}, summary)


def metrics(pattern_path, cut_phi=0.0):
    pattern = read_pattern_csv(read_text_file(pattern_path), pattern_path)
    record = pattern_metrics(pattern, cut_phi).as_dict()
    return CommandResult({"metrics.json": json_text(record)}, record)


def internal_port_positions(spec, incidence, rows, cols):
    """Midpoints between adjacent elements of the central rows x cols block."""
    if rows > spec.rows or cols > spec.cols:
        raise ConfigError(f"a {rows}x{cols} element block does not fit the {spec.rows}x{spec.cols} array")
    if incidence.N != rows * cols:
        raise ConfigError(f"incidence matrix has {incidence.N} elements for a {rows}x{cols} block")
    centres = spec.element_positions().reshape(spec.rows, spec.cols, 2)
    r0, c0 = (spec.rows - rows) // 2, (spec.cols - cols) // 2
    block = centres[r0:r0 + rows, c0:c0 + cols].reshape(-1, 2)
    ends = incidence.endpoints
    return 0.5 * (block[ends[:, 0]] + block[ends[:, 1]])


def joint_impedance(net, internal, topology, epsilon):
    """Joint Z of the mmWave ports and the sub-6 internal ports.

    The internal block follows the sub-6 element oracle; the two blocks couple
    only through epsilon.
    """
    k = net.wavenumber
    z_int = coupling_matrix(internal, k, topology["self_impedance"], topology["coupling_strength"],
                            topology["coupling_decay"])
    d = cdist(net.port_positions, internal)
    z_self = np.sqrt(net.Z[0, 0] * topology["self_impedance"]) if net.port_count else 0.0
    cross = epsilon * z_self * np.exp(-1j * k * d) / np.maximum(k * d, 1.0)
    Z = np.block([[net.Z, cross], [cross.T, z_int]])
    scale = np.abs(Z).max()
    margin = passivity_margin(Z)
    if margin < -1e-9 * scale:
        raise NonPassiveNetworkError(margin)
    return Z


def independence(config):
    """mmWave pattern under every sub-6 switch state, against the decoupled pattern."""
    net = config_network(config)
    x = config.geometry()
    if x is None:
        raise ConfigError(f"{config.source}: independence needs a topology geometry")
    topology = config.section("topology")
    settings = config.load_settings()
    ind = config.independence
    epsilon = ind["epsilon"]

    alphabet = config_alphabet(config, net.frequency)
    wave = config.incident_wave(net.frequency)
    target = SteeringTarget((ind["target_theta"], config.steering["phi"]), wave)
    states = quantize_states(ideal_phase_profile(target, net.port_positions, net.frequency), alphabet.phases)
    z_mm = alphabet.impedances(settings)[states]
    v_mm = open_circuit_voltages(net, wave)

    reference = pattern_from_currents(net, port_currents(net, z_mm, v_mm))
    peak = np.abs(reference.values).max()
    db_ref = magnitude_db(np.abs(reference.values), peak)
    mask = db_ref >= ind["floor_db"]

    joint = None
    if epsilon != 0.0:
        internal = internal_port_positions(config.array_spec(), config.incidence_matrix(),
                                           topology["rows"], topology["cols"])
        joint = joint_impedance(net, internal, topology, epsilon)
        v_joint = np.concatenate((v_mm, np.zeros(len(internal), dtype=complex)))

    rows = []
    deviations = []
    for s, z_sub6 in enumerate(state_impedances(x, settings)):
        if joint is None:
            # block-diagonal joint matrix: the mmWave block solves on its own
            currents = port_currents(net, z_mm, v_mm)
        else:
            z_load = np.concatenate((z_mm, z_sub6))
            currents = solve_currents(joint + np.diag(z_load), v_joint)[:net.port_count]
        pattern = pattern_from_currents(net, currents)
        db = magnitude_db(np.abs(pattern.values), peak)
        deviation = float(np.max(np.abs(db[mask] - db_ref[mask])))
        deviations.append(deviation)
        rows.append((s, fmt(deviation)))
        logger.debug("sub-6 state %d: max deviation %.3g dB", s, deviation)

    summary = {
        "epsilon": epsilon,
        "states": len(deviations),
        "max_deviation_db": max(deviations),
        "deviations_db": deviations,
        "floor_db": ind["floor_db"],
    }
    files = {
        "independence.csv": _csv_text(("sub6_state", "max_deviation_db"), rows),
        "independence.json": json_text(summary),
    }
    return CommandResult(files, summary)
