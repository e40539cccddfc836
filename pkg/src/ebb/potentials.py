"""Generators for the on-site potential v on the half line.

Every generator is deterministic and prefix-stable: generate(spec, L1)
is the first L1+1 entries of generate(spec, L2) for L1 <= L2, so growing
the sample never changes already-generated sites.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class Periodic:
    cell: tuple

    def __post_init__(self):
        cell = tuple(float(c) for c in self.cell)
        if len(cell) == 0:
            raise ConfigError("potential.cell: must be nonempty")
        object.__setattr__(self, "cell", cell)


@dataclass(frozen=True)
class AndersonRandom:
    """I.i.d. disorder, uniform on [-amplitude, amplitude]."""

    amplitude: float
    seed: int

    def __post_init__(self):
        if self.amplitude < 0:
            raise ConfigError("potential.amplitude: must be >= 0")
        if not (0 <= self.seed < 2**64):
            raise ConfigError("potential.seed: must fit in 64 bits")


@dataclass(frozen=True)
class AlmostMathieu:
    """v(x) = coupling * cos(2*pi*(frequency*x + phase))."""

    coupling: float
    frequency: float
    phase: float


@dataclass(frozen=True)
class FromFile:
    """Plain text, one real per line, site order x = 0, 1, 2, ..."""

    path: str


PotentialSpec = Union[Zero, Constant, Periodic, AndersonRandom, AlmostMathieu, FromFile]


def generate(spec: PotentialSpec, L: int) -> np.ndarray:
    """Return the potential values v(0..L) for the given generator."""
    if L < 1:
        raise ConfigError(f"L must be >= 1, got {L}")
    n = L + 1
    if isinstance(spec, Zero):
        return np.zeros(n)
    if isinstance(spec, Constant):
        return np.full(n, float(spec.value))
    if isinstance(spec, Periodic):
        cell = np.asarray(spec.cell, dtype=float)
        reps = -(-n // len(cell))
        return np.tile(cell, reps)[:n]
    if isinstance(spec, AndersonRandom):
        # Philox is counter-based, so a single bulk draw from a freshly
        # keyed generator is prefix-stable across different L.
        rng = np.random.Generator(np.random.Philox(key=spec.seed))
        return rng.uniform(-spec.amplitude, spec.amplitude, size=n)
    if isinstance(spec, AlmostMathieu):
        x = np.arange(n)
        return spec.coupling * np.cos(2.0 * math.pi * (spec.frequency * x + spec.phase))
    if isinstance(spec, FromFile):
        values = np.loadtxt(spec.path, dtype=float, ndmin=1)
        if values.ndim != 1:
            raise ConfigError(f"potential file {spec.path}: expected one value per line")
        if len(values) < n:
            raise ConfigError(
                f"potential file {spec.path}: has {len(values)} entries, need {n}"
            )
        return values[:n].copy()
    raise TypeError(f"unknown potential spec {spec!r}")
