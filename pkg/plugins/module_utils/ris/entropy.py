# -*- coding: utf-8 -*-
"""Phase-gap entropy of a reconfigurable element's reflection phases."""

from dataclasses import dataclass

import numpy as np
from scipy.stats import entropy as shannon_entropy

from .errors import InputError


@dataclass(frozen=True, eq=False)
class PhaseSet:
    """2^Q reflection phases in degrees, each in [0, 360)."""

    phases: np.ndarray

    def __post_init__(self):
        phases = np.atleast_1d(np.asarray(self.phases, dtype=float)).copy()
        n = phases.size
        if n == 0 or n & (n - 1):
            raise InputError(f"phase set length must be a power of two, got {n}")
        if np.any(phases < 0.0) or np.any(phases >= 360.0) or not np.all(np.isfinite(phases)):
            raise InputError("phases must lie within [0, 360) degrees")
        phases.setflags(write=False)
        object.__setattr__(self, "phases", phases)

    @classmethod
    def from_degrees(cls, values):
        folded = np.mod(np.asarray(values, dtype=float), 360.0)
        # np.mod can round tiny negatives up to exactly 360
        folded[folded >= 360.0] = 0.0
        return cls(folded)

    @property
    def bits(self):
        return int(self.phases.size).bit_length() - 1

    def __len__(self):
        return self.phases.size


def phase_gaps(s):
    ordered = np.sort(s.phases, kind="stable")
    gaps = np.empty_like(ordered)
    gaps[:-1] = np.diff(ordered)
    gaps[-1] = 360.0 + ordered[0] - ordered[-1]
    return gaps


def entropy(s):
    """Shannon entropy in bits of the normalized phase gaps (0 log 0 = 0)."""
    p = phase_gaps(s) / 360.0
    return float(shannon_entropy(p, base=2))


def entropies(degrees):
    """Entropy per column of a (2^Q, samples) table of phases in degrees."""
    phases = np.mod(np.asarray(degrees, dtype=float), 360.0)
    ordered = np.sort(phases, axis=0)
    gaps = np.diff(ordered, axis=0, append=ordered[:1] + 360.0)
    return shannon_entropy(gaps / 360.0, base=2, axis=0)
