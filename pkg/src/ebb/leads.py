"""Reservoir models: Weiss-function boundary values and band supports.

A lead enters the sample physics only through F(E+i0), the boundary value
of its resolvent matrix element on the coupling vector. F is a Herglotz
function, so Im F >= 0 on the real axis; the set where Im F > 0 is the
lead's open band.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ConfigError, DomainError


@dataclass(frozen=True)
class SemiInfiniteLaplacian:
    """Half-line lead with Hamiltonian -hopping*Laplacian, coupled via
    coupling*delta_0. Band is (-2*hopping, 2*hopping)."""

    hopping: float
    coupling: float

    def __post_init__(self):
        if not (self.hopping > 0):
            raise ConfigError("lead.hopping: must be > 0")
        if self.coupling == 0:
            raise ConfigError("lead.coupling: must be nonzero")


@dataclass(frozen=True)
class TabulatedLead:
    """F(E+i0) sampled on a grid, interpolated linearly in Re and Im."""

    energies: np.ndarray
    re_f: np.ndarray
    im_f: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        re = np.asarray(self.re_f, dtype=float)
        im = np.asarray(self.im_f, dtype=float)
        if not (len(e) == len(re) == len(im)) or len(e) < 2:
            raise ConfigError("lead table: need >= 2 rows of equal length columns")
        if not np.all(np.diff(e) > 0):
            raise ConfigError("lead table: energies must be strictly increasing")
        if np.any(im < -1e-12):
            raise ConfigError("lead table: Im F must be >= 0")
        # Herglotz sign constraint: tiny negative entries are rounding.
        im = np.maximum(im, 0.0)
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "re_f", re)
        object.__setattr__(self, "im_f", im)

    @classmethod
    def from_csv(cls, path: str) -> "TabulatedLead":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or [h.strip() for h in rows[0]] != ["E", "re_F", "im_F"]:
            raise ConfigError(f"lead table {path}: expected header 'E,re_F,im_F'")
        try:
            data = np.array([[float(v) for v in row] for row in rows[1:] if row])
        except ValueError as exc:
            raise ConfigError(f"lead table {path}: non-numeric entry ({exc})")
        if data.ndim != 2 or data.shape[1] != 3:
            raise ConfigError(f"lead table {path}: expected 3 columns")
        return cls(data[:, 0], data[:, 1], data[:, 2])


LeadModel = Union[SemiInfiniteLaplacian, TabulatedLead]


@dataclass(frozen=True)
class EnergyWindow:
    """Disjoint open intervals of energies, sorted and non-touching."""

    intervals: tuple = field(default=())

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals if b > a)
        for (a1, b1), (a2, b2) in zip(ivs, ivs[1:]):
            if a2 < b1:
                raise ValueError("intervals must be disjoint and sorted")
        object.__setattr__(self, "intervals", ivs)

    @property
    def is_empty(self) -> bool:
        return len(self.intervals) == 0

    def total_length(self) -> float:
        return sum(b - a for a, b in self.intervals)

    def contains(self, E: float) -> bool:
        return any(a < E < b for a, b in self.intervals)

    def shrink(self, margin: float) -> "EnergyWindow":
        """Remove a margin at each endpoint of every interval."""
        return EnergyWindow(
            tuple(
                (a + margin, b - margin)
                for a, b in self.intervals
                if b - a > 2 * margin
            )
        )


def weiss_boundary(lead: LeadModel, E: float) -> complex:
    """F(E+i0) for the given lead.

    For the semi-infinite Laplacian lead the closed form is
    coupling^2 * (-E + sqrt(E^2 - 4k^2)) / (2k^2) with the square-root
    branch forced by the Herglotz property (Im F >= 0) and the decay
    F(z) ~ -coupling^2/z at infinity.
    """
    if isinstance(lead, SemiInfiniteLaplacian):
        k = lead.hopping
        kap2 = lead.coupling * lead.coupling
        if abs(E) < 2.0 * k:
            return kap2 * complex(-E, math.sqrt(4.0 * k * k - E * E)) / (2.0 * k * k)
        root = math.sqrt(E * E - 4.0 * k * k)
        if E < 0:
            root = -root
        return complex(kap2 * (-E + root) / (2.0 * k * k), 0.0)
    if isinstance(lead, TabulatedLead):
        e = lead.energies
        if E < e[0] or E > e[-1]:
            raise DomainError(f"E={E} outside table range [{e[0]}, {e[-1]}]")
        re = float(np.interp(E, e, lead.re_f))
        im = max(0.0, float(np.interp(E, e, lead.im_f)))
        return complex(re, im)
    raise TypeError(f"unknown lead model {lead!r}")


def band_support(lead: LeadModel) -> EnergyWindow:
    """Energies where Im F(E+i0) > 0 (the lead's open channel)."""
    if isinstance(lead, SemiInfiniteLaplacian):
        k = lead.hopping
        return EnergyWindow(((-2.0 * k, 2.0 * k),))
    if isinstance(lead, TabulatedLead):
        e, im = lead.energies, lead.im_f
        intervals = []
        lo = None
        for i in range(len(e)):
            if im[i] > 0 and lo is None:
                if i == 0:
                    lo = e[0]
                else:
                    # linear zero crossing between grid points
                    f = im[i] / (im[i] - im[i - 1])
                    lo = e[i] - f * (e[i] - e[i - 1])
            elif im[i] <= 0 and lo is not None:
                f = im[i - 1] / (im[i - 1] - im[i])
                intervals.append((lo, e[i - 1] + f * (e[i] - e[i - 1])))
                lo = None
        if lo is not None:
            intervals.append((lo, e[-1]))
        return EnergyWindow(tuple(intervals))
    raise TypeError(f"unknown lead model {lead!r}")


def sigma_intersection(left: LeadModel, right: LeadModel) -> EnergyWindow:
    """Intersection of the two band supports; empty means no open channel."""
    out = []
    for a1, b1 in band_support(left).intervals:
        for a2, b2 in band_support(right).intervals:
            lo, hi = max(a1, a2), min(b1, b2)
            if hi > lo:
                out.append((lo, hi))
    out.sort()
    return EnergyWindow(tuple(out))
