# -*- coding: utf-8 -*-
"""Measured S21 traces: background subtraction and pattern comparison."""

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import IncompatibleTracesError, InputError
from .field import _readonly, fmt, magnitude_db

TRACE_LABELS = ("env", "total", "scat")
TRACE_HEADER = ("theta_deg", "re", "im")
DEFAULT_STEP = 5.0
MAIN_LOBE_DB = -10.0
_ATOL = 1e-9


@dataclass(frozen=True, eq=False)
class S21Trace:
    """Complex S21 along one receiver cut at fixed phi."""

    theta: np.ndarray
    values: np.ndarray
    frequency: float
    label: str
    phi: float = 0.0

    def __post_init__(self):
        theta = np.atleast_1d(np.array(self.theta, dtype=float))
        values = np.atleast_1d(np.array(self.values, dtype=complex))
        if self.label not in TRACE_LABELS:
            raise InputError(f"trace label must be one of {TRACE_LABELS}, got {self.label!r}")
        if theta.size == 0 or theta.shape != values.shape:
            raise InputError(f"trace has {values.size} values for {theta.size} angles")
        if theta.size > 1 and np.any(np.diff(theta) <= 0):
            raise InputError("trace angles must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise InputError("trace values must be finite")
        if not self.frequency > 0:
            raise InputError("trace frequency must be positive")
        object.__setattr__(self, "theta", _readonly(theta))
        object.__setattr__(self, "values", _readonly(values))
        object.__setattr__(self, "frequency", float(self.frequency))
        object.__setattr__(self, "phi", float(self.phi))


def _check_compatible(a, b):
    if a.theta.shape != b.theta.shape or not np.allclose(a.theta, b.theta, rtol=0.0, atol=_ATOL):
        raise IncompatibleTracesError("angle grids differ")
    if a.frequency != b.frequency:
        raise IncompatibleTracesError(f"frequencies differ ({a.frequency} vs {b.frequency} Hz)")
    if a.phi != b.phi:
        raise IncompatibleTracesError(f"cuts differ (phi {a.phi} vs {b.phi})")


def background_subtract(total, env):
    """S21,scat = S21,total - S21,env, as complex numbers."""
    _check_compatible(total, env)
    return S21Trace(total.theta, total.values - env.values, total.frequency, "scat", total.phi)


@dataclass(frozen=True)
class CutComparison:
    peak_offset_deg: float
    rms_db: float
    samples: int

    def as_dict(self):
        return {"peak_offset_deg": self.peak_offset_deg, "rms_db": self.rms_db, "samples": self.samples}


def _main_lobe_mask(db):
    peak = int(np.argmax(db))
    mask = np.zeros(db.size, dtype=bool)
    lo = hi = peak
    while lo > 0 and db[lo - 1] >= MAIN_LOBE_DB:
        lo -= 1
    while hi < db.size - 1 and db[hi + 1] >= MAIN_LOBE_DB:
        hi += 1
    mask[lo:hi + 1] = True
    return mask


def compare_cuts(theta_a, values_a, theta_b, values_b):
    """Peak offset and dB RMS error of two cuts on their common angles.

    Each cut is normalized to its own peak over the overlap; the RMS runs
    over the union of both -10 dB main-lobe regions.
    """
    theta_a = np.asarray(theta_a, dtype=float)
    theta_b = np.asarray(theta_b, dtype=float)
    ia, ib = [], []
    for i, t in enumerate(theta_a):
        hits = np.flatnonzero(np.abs(theta_b - t) <= _ATOL)
        if hits.size:
            ia.append(i)
            ib.append(int(hits[0]))
    if not ia:
        raise InputError("empty overlap between the compared cuts")
    theta = theta_a[ia]
    mag_a = np.abs(np.asarray(values_a)[ia])
    mag_b = np.abs(np.asarray(values_b)[ib])
    if mag_a.max() == 0.0 or mag_b.max() == 0.0:
        raise InputError("cannot compare an all-zero cut")
    db_a = magnitude_db(mag_a, mag_a.max())
    db_b = magnitude_db(mag_b, mag_b.max())
    mask = _main_lobe_mask(db_a) | _main_lobe_mask(db_b)
    diff = db_a[mask] - db_b[mask]
    return CutComparison(
        peak_offset_deg=float(abs(theta[int(np.argmax(db_a))] - theta[int(np.argmax(db_b))])),
        rms_db=float(np.sqrt(np.mean(diff ** 2))),
        samples=int(mask.sum()),
    )


def pattern_compare(pattern, trace, cut_phi=None):
    """Compare a simulated pattern cut against a measured trace."""
    phi = trace.phi if cut_phi is None else cut_phi
    return compare_cuts(pattern.grid.theta, pattern.cut(phi), trace.theta, trace.values)


def write_trace_csv(trace):
    out = io.StringIO()
    out.write(f"# freq_hz={fmt(trace.frequency)}\n")
    out.write(f"# label={trace.label}\n")
    if trace.phi:
        out.write(f"# phi_deg={fmt(trace.phi)}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for t, v in zip(trace.theta, trace.values):
        writer.writerow((fmt(t), fmt(v.real), fmt(v.imag)))
    return out.getvalue()


def _metadata(line, lineno, source):
    body = line[1:].strip()
    key, sep, value = body.partition("=")
    if not sep:
        raise InputError(f"{source}:{lineno}:1: metadata line must read '# key=value'")
    return key.strip(), value.strip()


def read_trace_csv(text, source="<trace>"):
    meta = {}
    lines = text.splitlines()
    lineno = 0
    while lineno < len(lines) and lines[lineno].startswith("#"):
        key, value = _metadata(lines[lineno], lineno + 1, source)
        meta[key] = value
        lineno += 1
    if lineno >= len(lines) or tuple(c.strip() for c in lines[lineno].split(",")) != TRACE_HEADER:
        raise InputError(f"{source}:{lineno + 1}:1: expected header {','.join(TRACE_HEADER)}")
    header_line = lineno + 1
    theta, values = [], []
    for offset, row in enumerate(csv.reader(io.StringIO("\n".join(lines[lineno + 1:]))), start=1):
        if not row:
            continue
        where = header_line + offset
        if len(row) != 3:
            raise InputError(f"{source}:{where}:1: expected 3 columns, found {len(row)}")
        parsed = []
        for col, cell in enumerate(row, start=1):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise InputError(f"{source}:{where}:{col}: not a number: {cell!r}")
        theta.append(parsed[0])
        values.append(complex(parsed[1], parsed[2]))
    for key in ("freq_hz", "label"):
        if key not in meta:
            raise InputError(f"{source}:1:1: missing '# {key}=' metadata line")
    try:
        frequency = float(meta["freq_hz"])
        phi = float(meta.get("phi_deg", 0.0))
    except ValueError as e:
        raise InputError(f"{source}:1:1: bad metadata value ({e})")
    return S21Trace(theta, values, frequency, meta["label"], phi)
