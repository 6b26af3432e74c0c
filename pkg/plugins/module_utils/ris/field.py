# -*- coding: utf-8 -*-
"""Angle grids, complex far-field patterns and scalar pattern metrics."""

import csv
import io
import logging
from dataclasses import dataclass

import numpy as np

from .errors import EmptyPatternError, InputError

logger = logging.getLogger(__name__)

FLOOR_DB = -120.0
PATTERN_HEADER = ("theta_deg", "phi_deg", "re", "im")
_ATOL = 1e-9


def fmt(value):
    """Format a float so repeated runs write identical bytes."""
    return repr(float(value))


def _uniform_step(samples, name):
    if samples.size < 2:
        return 0.0
    steps = np.diff(samples)
    if np.any(steps <= 0):
        raise InputError(f"{name} samples must be strictly increasing")
    if not np.allclose(steps, steps[0], rtol=0.0, atol=1e-6):
        raise InputError(f"{name} samples must have a uniform step")
    return float(steps[0])


def _readonly(array):
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class AngleGrid:
    """Regular (theta, phi) grid in degrees.

    theta is elevation from broadside in [-90, 90]; negative theta at phi
    describes the same half-plane cut as positive theta at phi + 180.
    """

    theta: np.ndarray
    phi: np.ndarray
    theta_step: float = 0.0
    phi_step: float = 0.0

    def __post_init__(self):
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float)).copy()
        phi = np.atleast_1d(np.asarray(self.phi, dtype=float)).copy()
        if theta.size == 0 or phi.size == 0:
            raise InputError("angle grid must not be empty")
        if theta[0] < -90.0 - _ATOL or theta[-1] > 90.0 + _ATOL:
            raise InputError("theta samples must lie within [-90, 90] degrees")
        if phi[0] < 0.0 or phi[-1] >= 360.0:
            raise InputError("phi samples must lie within [0, 360) degrees")
        theta_step = _uniform_step(theta, "theta")
        phi_step = _uniform_step(phi, "phi")
        for declared, actual, name in ((self.theta_step, theta_step, "theta"), (self.phi_step, phi_step, "phi")):
            if declared and abs(declared - actual) > 1e-6:
                raise InputError(f"declared {name} step {declared} does not match samples ({actual})")
        object.__setattr__(self, "theta", _readonly(theta))
        object.__setattr__(self, "phi", _readonly(phi))
        object.__setattr__(self, "theta_step", theta_step)
        object.__setattr__(self, "phi_step", phi_step)

    @classmethod
    def regular(cls, theta_min=-90.0, theta_max=90.0, theta_step=1.0, phi=(0.0,)):
        if theta_step <= 0:
            raise InputError("theta_step must be positive")
        count = int(round((theta_max - theta_min) / theta_step)) + 1
        theta = theta_min + theta_step * np.arange(count)
        return cls(theta, np.asarray(sorted(phi), dtype=float))

    @classmethod
    def from_descriptor(cls, doc):
        return cls.regular(doc["theta_min"], doc["theta_max"], doc["theta_step"], doc["phi"])

    def descriptor(self):
        return {
            "theta_min": float(self.theta[0]),
            "theta_max": float(self.theta[-1]),
            "theta_step": self.theta_step if self.theta.size > 1 else 1.0,
            "phi": [float(p) for p in self.phi],
        }

    @property
    def shape(self):
        return (self.theta.size, self.phi.size)

    @property
    def size(self):
        return self.theta.size * self.phi.size

    def theta_index(self, theta):
        hits = np.flatnonzero(np.abs(self.theta - theta) <= _ATOL)
        return int(hits[0]) if hits.size else None

    def phi_index(self, phi):
        hits = np.flatnonzero(np.abs(self.phi - (phi % 360.0)) <= _ATOL)
        return int(hits[0]) if hits.size else None

    def index(self, theta, phi):
        """Return the (theta, phi) index pair, or None when off grid."""
        it, ip = self.theta_index(theta), self.phi_index(phi)
        if it is None or ip is None:
            return None
        return it, ip

    def contains(self, theta, phi):
        return self.index(theta, phi) is not None

    def direction_cosines(self):
        """Transverse direction cosines (u, v), each shaped like the grid."""
        th = np.radians(self.theta)[:, None]
        ph = np.radians(self.phi)[None, :]
        return np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph)


@dataclass(frozen=True, eq=False)
class ComplexPattern:
    grid: AngleGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.shape != self.grid.shape:
            if values.size != self.grid.size:
                raise InputError(f"pattern has {values.size} values for a grid of {self.grid.size} points")
            values = values.reshape(self.grid.shape)
        if not np.all(np.isfinite(values)):
            raise InputError("pattern values must be finite")
        object.__setattr__(self, "values", _readonly(values))

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    def cut(self, phi):
        ip = self.grid.phi_index(phi)
        if ip is None:
            raise InputError(f"cut phi={phi} is not on the pattern grid")
        return self.values[:, ip]

    def value_at(self, theta, phi):
        idx = self.grid.index(theta, phi)
        if idx is None:
            raise InputError(f"direction ({theta}, {phi}) is not on the pattern grid")
        return complex(self.values[idx])

    def scaled(self, factor):
        return ComplexPattern(self.grid, self.values * factor)


@dataclass(frozen=True)
class PatternMetrics:
    peak_direction: tuple
    peak_level_db: float
    sidelobe_level_db: float
    half_power_beamwidth_deg: float

    def as_dict(self):
        return {
            "peak_theta_deg": float(self.peak_direction[0]),
            "peak_phi_deg": float(self.peak_direction[1]),
            "peak_level_db": float(self.peak_level_db),
            "sidelobe_level_db": float(self.sidelobe_level_db),
            "half_power_beamwidth_deg": float(self.half_power_beamwidth_deg),
        }


def magnitude_db(magnitude, reference):
    """20*log10(magnitude/reference) clipped at FLOOR_DB."""
    magnitude = np.asarray(magnitude, dtype=float)
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(magnitude / reference)
    return np.maximum(db, FLOOR_DB)


def pattern_db(p):
    """Pattern magnitude in dB, normalized so the peak is exactly 0 dB."""
    magnitude = np.abs(p.values)
    peak = magnitude.max()
    if peak == 0.0:
        raise EmptyPatternError()
    return magnitude_db(magnitude, peak)


def _main_lobe(magnitude, peak):
    lo = peak
    while lo > 0 and magnitude[lo - 1] <= magnitude[lo]:
        lo -= 1
    hi = peak
    while hi < magnitude.size - 1 and magnitude[hi + 1] <= magnitude[hi]:
        hi += 1
    return lo, hi


def _local_maxima(magnitude):
    left = np.concatenate(([-np.inf], magnitude[:-1]))
    right = np.concatenate((magnitude[1:], [-np.inf]))
    return np.flatnonzero((magnitude >= left) & (magnitude >= right))


def _crossing(theta, magnitude, peak, threshold, direction):
    i = peak
    while 0 <= i + direction < magnitude.size:
        j = i + direction
        if magnitude[j] < threshold:
            # linear interpolation between the last point above and the first below
            frac = (magnitude[i] - threshold) / (magnitude[i] - magnitude[j])
            return theta[i] + frac * (theta[j] - theta[i])
        i = j
    return theta[i]


def pattern_metrics(p, cut_phi=0.0):
    theta = p.grid.theta
    if theta.size < 2:
        raise InputError("pattern metrics need at least two theta samples")
    magnitude = np.abs(p.cut(cut_phi))
    overall = np.abs(p.values).max()
    if overall == 0.0 or magnitude.max() == 0.0:
        raise EmptyPatternError(f"cut phi={cut_phi}")

    peak = int(np.argmax(magnitude))
    peak_value = magnitude[peak]
    lo, hi = _main_lobe(magnitude, peak)
    side = [i for i in _local_maxima(magnitude) if i < lo or i > hi]
    if side:
        sll = float(magnitude_db(max(magnitude[i] for i in side), peak_value))
    else:
        sll = FLOOR_DB

    threshold = peak_value / np.sqrt(2.0)
    left = _crossing(theta, magnitude, peak, threshold, -1)
    right = _crossing(theta, magnitude, peak, threshold, +1)

    return PatternMetrics(
        peak_direction=(float(theta[peak]), float(cut_phi)),
        peak_level_db=float(magnitude_db(peak_value, overall)),
        sidelobe_level_db=min(sll, 0.0),
        half_power_beamwidth_deg=float(right - left),
    )


def write_pattern_csv(p, export_step=None):
    """Serialize a pattern to CSV text, optionally decimated in theta."""
    grid = p.grid
    stride = 1
    if export_step and grid.theta.size > 1:
        ratio = export_step / grid.theta_step
        stride = int(round(ratio))
        if stride < 1 or abs(ratio - stride) > 1e-9:
            raise InputError(f"export step {export_step} is not a multiple of the grid step {grid.theta_step}")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(PATTERN_HEADER)
    for it in range(0, grid.theta.size, stride):
        for ip in range(grid.phi.size):
            value = p.values[it, ip]
            writer.writerow((fmt(grid.theta[it]), fmt(grid.phi[ip]), fmt(value.real), fmt(value.imag)))
    return out.getvalue()


def read_pattern_csv(text, source="<pattern>"):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(c.strip() for c in rows[0]) != PATTERN_HEADER:
        raise InputError(f"{source}:1:1: expected header {','.join(PATTERN_HEADER)}")
    samples = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 4:
            raise InputError(f"{source}:{lineno}:1: expected 4 columns, found {len(row)}")
        parsed = []
        for col, cell in enumerate(row, start=1):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise InputError(f"{source}:{lineno}:{col}: not a number: {cell!r}")
        theta, phi, re, im = parsed
        samples[(theta, phi)] = complex(re, im)
    if not samples:
        raise InputError(f"{source}:2:1: pattern has no samples")
    thetas = sorted({k[0] for k in samples})
    phis = sorted({k[1] for k in samples})
    missing = [(t, f) for t in thetas for f in phis if (t, f) not in samples]
    if missing:
        raise InputError(f"{source}: sample grid is incomplete, missing theta={missing[0][0]} phi={missing[0][1]}")
    grid = AngleGrid(np.array(thetas), np.array(phis))
    values = np.array([[samples[(t, f)] for f in phis] for t in thetas])
    return ComplexPattern(grid, values)
