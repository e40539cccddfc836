"""Steady-state quantum transport through a finite 1D tight-binding sample
coupled to two thermal free-fermion reservoirs."""

__version__ = "0.1.0"

from .model import SampleSpec, ThermoParams, fermi_density, xi  # noqa: F401
