"""Shared domain types and Fermi-Dirac machinery.

Units: hbar = e = 1 and the sample hopping equals 1, so energies are
dimensionless. All integrated fluxes downstream carry the 1/(2*pi)
prefactor of the Landauer-Buttiker formulae.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class ThermoParams:
    """Inverse temperatures and chemical potentials of the two reservoirs."""

    beta_l: float
    beta_r: float
    mu_l: float
    mu_r: float

    def __post_init__(self):
        if not (self.beta_l > 0):
            raise ConfigError("thermo.beta_l: must be > 0")
        if not (self.beta_r > 0):
            raise ConfigError("thermo.beta_r: must be > 0")
        for name in ("beta_l", "beta_r", "mu_l", "mu_r"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"thermo.{name}: must be finite")

    @property
    def is_equilibrium(self) -> bool:
        return self.beta_l == self.beta_r and self.mu_l == self.mu_r


@dataclass(frozen=True)
class SampleSpec:
    """A finite sample on sites 0..L with on-site potential values.

    The left junction attaches at site 0 and the right junction at site L,
    so L >= 1 is required (a single shared coupling site is degenerate).
    """

    length: int
    potential: np.ndarray

    def __post_init__(self):
        if self.length < 1:
            raise ConfigError("sample.length: must be >= 1")
        pot = np.asarray(self.potential, dtype=float)
        if pot.shape != (self.length + 1,):
            raise ConfigError(
                f"sample.potential: expected {self.length + 1} entries, "
                f"got {pot.shape}"
            )
        if not np.all(np.isfinite(pot)):
            raise ConfigError("sample.potential: entries must be finite")
        object.__setattr__(self, "potential", pot)


def xi(E: float, beta: float, mu: float) -> float:
    """Dimensionless energy argument beta*(E - mu) of the Fermi factor."""
    return beta * (E - mu)


def fermi_density(E: float, beta: float, mu: float) -> float:
    """Fermi-Dirac occupation 1/(1 + exp(beta*(E - mu))).

    Evaluated on the branch that never overflows: for positive argument
    the numerator carries the decaying exponential.
    """
    x = xi(E, beta, mu)
    if x >= 0.0:
        z = math.exp(-x)
        return z / (1.0 + z)
    return 1.0 / (1.0 + math.exp(x))
