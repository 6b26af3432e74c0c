# -*- coding: utf-8 -*-
"""Planar spiral inductor equivalent circuit: L_V in series with (L_S || C_SP).

Series elements are chained as homogeneous ABCD matrices: an element with
impedance Z = n/d contributes [[d, n], [0, d]] and the common scale d is
carried separately, so a lossless tank at exact resonance (d = 0) still
yields a finite S matrix.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .field import FLOOR_DB, fmt, magnitude_db

SWEEP_HEADER = ("freq_hz", "s21_db")
REFERENCE_IMPEDANCE = 50.0


@dataclass(frozen=True)
class FrequencySweep:
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if not 0.0 <= self.start < self.stop:
            raise InputError(f"sweep needs 0 <= start < stop, got {self.start}..{self.stop}")
        if int(self.points) < 2:
            raise InputError("sweep needs at least two points")
        object.__setattr__(self, "points", int(self.points))

    @property
    def step(self):
        return (self.stop - self.start) / (self.points - 1)

    def frequencies(self):
        return np.linspace(self.start, self.stop, self.points)


def _omega(frequencies):
    return 2.0 * np.pi * np.asarray(frequencies, dtype=float)


@dataclass(frozen=True)
class PsiCircuit:
    L_S: float
    C_SP: float
    L_V: float
    R_S: float = 0.0

    def __post_init__(self):
        for name in ("L_S", "C_SP", "L_V"):
            if not getattr(self, name) > 0.0:
                raise InputError(f"{name} must be positive")
        if self.R_S < 0.0:
            raise InputError("R_S must be non-negative")

    def impedance_terms(self, frequencies):
        """Numerator and denominator of the series impedance."""
        w = _omega(frequencies)
        branch = self.R_S + 1j * w * self.L_S
        d = 1.0 + 1j * w * self.C_SP * branch
        n = branch + 1j * w * self.L_V * d
        return n, d

    def parallel_impedance(self, frequencies):
        w = _omega(frequencies)
        branch = self.R_S + 1j * w * self.L_S
        with np.errstate(divide="ignore", invalid="ignore"):
            return branch / (1.0 + 1j * w * self.C_SP * branch)

    def series_impedance(self, frequencies):
        n, d = self.impedance_terms(frequencies)
        with np.errstate(divide="ignore", invalid="ignore"):
            return n / d

    def as_dict(self):
        return {"L_S": self.L_S, "C_SP": self.C_SP, "L_V": self.L_V, "R_S": self.R_S}

    @classmethod
    def from_dict(cls, doc, source="<circuit>"):
        if not isinstance(doc, dict):
            raise InputError(f"{source}: circuit must be a JSON object")
        unknown = set(doc) - {"L_S", "C_SP", "L_V", "R_S"}
        if unknown:
            raise InputError(f"{source}: unknown circuit key {sorted(unknown)[0]!r}")
        try:
            return cls(float(doc["L_S"]), float(doc["C_SP"]), float(doc["L_V"]), float(doc.get("R_S", 0.0)))
        except KeyError as e:
            raise InputError(f"{source}: missing circuit key {e.args[0]!r}")
        except (TypeError, ValueError) as e:
            raise InputError(f"{source}: circuit values must be numbers ({e})")


@dataclass(frozen=True)
class Thru:
    """Zero-impedance series element; the identity of the cascade."""

    def impedance_terms(self, frequencies):
        shape = np.shape(frequencies)
        return np.zeros(shape, dtype=complex), np.ones(shape, dtype=complex)

    def series_impedance(self, frequencies):
        return np.zeros(np.shape(frequencies), dtype=complex)


def resonant_frequency(c):
    """1 / (2 pi sqrt(C_SP L_S)); L_V and R_S do not enter."""
    return 1.0 / (2.0 * np.pi * np.sqrt(c.C_SP * c.L_S))


def abcd_series(element, frequencies):
    """Homogeneous ABCD matrices (F, 2, 2) and their scale (F,)."""
    n, d = element.impedance_terms(frequencies)
    abcd = np.zeros(np.shape(n) + (2, 2), dtype=complex)
    abcd[..., 0, 0] = d
    abcd[..., 0, 1] = n
    abcd[..., 1, 1] = d
    return abcd, d


def chain(elements, frequencies):
    abcd, scale = abcd_series(Thru(), frequencies)
    for element in elements:
        m, s = abcd_series(element, frequencies)
        abcd = abcd @ m
        scale = scale * s
    return abcd, scale


def abcd_to_s(abcd, z0=REFERENCE_IMPEDANCE, scale=1.0):
    """Full S matrix (F, 2, 2) of a reciprocal two-port given in (homogeneous) ABCD form."""
    a, b, c, d = abcd[..., 0, 0], abcd[..., 0, 1], abcd[..., 1, 0], abcd[..., 1, 1]
    denom = a + b / z0 + c * z0 + d
    s = np.empty(abcd.shape, dtype=complex)
    s[..., 0, 0] = (a + b / z0 - c * z0 - d) / denom
    s[..., 1, 0] = 2.0 * scale / denom
    s[..., 0, 1] = s[..., 1, 0]
    s[..., 1, 1] = (-a + b / z0 - c * z0 + d) / denom
    return s


def s_parameters(elements, frequencies, z0=REFERENCE_IMPEDANCE):
    abcd, scale = chain(elements, frequencies)
    return abcd_to_s(abcd, z0, scale)


def s21_db(s):
    return magnitude_db(np.abs(s[..., 1, 0]), 1.0)


def cascade(*elements, sweep, z0=REFERENCE_IMPEDANCE):
    """|S21| in dB of series elements chained between z0 ports."""
    return s21_db(s_parameters(elements, sweep.frequencies(), z0))


def two_port_isolation(c, sweep, z0=REFERENCE_IMPEDANCE):
    """|S21| in dB of one circuit, floored at FLOOR_DB."""
    return cascade(c, sweep=sweep, z0=z0)


def impedance_peak(c, frequencies):
    """Frequency of the largest |Z_parallel| on a scan grid."""
    frequencies = np.asarray(frequencies, dtype=float)
    magnitude = np.abs(c.parallel_impedance(frequencies))
    magnitude[np.isnan(magnitude)] = np.inf
    return float(frequencies[int(np.argmax(magnitude))])


def isolation_dip(frequencies, db):
    """Frequency of the deepest |S21| point; ties go to the lowest frequency."""
    return float(np.asarray(frequencies)[int(np.argmin(db))])


def write_sweep_csv(frequencies, db):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for f, value in zip(frequencies, db):
        writer.writerow((fmt(f), fmt(max(value, FLOOR_DB))))
    return out.getvalue()
