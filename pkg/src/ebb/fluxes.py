"""Steady-state spectral densities and their Landauer-Buttiker integrals.

The pointwise densities at energy E are
    phi_l = T(E) * (rho_l - rho_r) * E        (energy current)
    j_l   = T(E) * (rho_l - rho_r)            (charge current)
    sigma = T(E) * (xi_r - xi_l) * (rho_l - rho_r)   (entropy production)
with the right densities the exact negations of the left ones. The fluxes
are their integrals over the open-channel window with the 1/(2*pi)
prefactor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import leads as leads_mod
from .errors import DomainError
from .green import SelfEnergyPair, coupled_green_direct
from .leads import LeadModel, sigma_intersection, weiss_boundary
from .model import SampleSpec, ThermoParams, fermi_density, xi
from .quadrature import adaptive_gk15
from .scattering import t_matrix, transmission, unitarity_residual

# Densities more negative than this are an upstream fault, not rounding.
_SIGMA_ROUNDING_FLOOR = -1e-30


@dataclass(frozen=True)
class QuadratureParams:
    tolerance: float = 1e-8
    max_evaluations: int = 500_000
    edge_margin: float = 1e-6

    def __post_init__(self):
        if not (self.tolerance > 0):
            raise DomainError("quadrature.tolerance: must be > 0")
        if self.edge_margin < 0:
            raise DomainError("quadrature.edge_margin: must be >= 0")


@dataclass(frozen=True)
class SystemConfig:
    sample: SampleSpec
    lead_l: LeadModel
    lead_r: LeadModel
    thermo: ThermoParams
    quadrature: QuadratureParams = QuadratureParams()


@dataclass(frozen=True)
class SpectralDensities:
    phi_l: float
    phi_r: float
    j_l: float
    j_r: float
    sigma: float


@dataclass(frozen=True)
class FluxResult:
    energy_flux_l: float
    energy_flux_r: float
    charge_flux_l: float
    charge_flux_r: float
    entropy_flux: float
    quadrature_error_estimate: float
    evaluations: int
    converged: bool
    no_open_channel: bool
    max_unitarity_residual: float


@dataclass(frozen=True)
class PointResult:
    """Full scattering pipeline output at one energy."""

    E: float
    transmission: float
    unitarity_residual: float
    green: np.ndarray
    t: np.ndarray
    se: SelfEnergyPair


def spectral_densities(E, T_of_E, thermo: ThermoParams) -> SpectralDensities:
    """Pointwise densities at energy E for transmission T_of_E."""
    rho_l = fermi_density(E, thermo.beta_l, thermo.mu_l)
    rho_r = fermi_density(E, thermo.beta_r, thermo.mu_r)
    drho = rho_l - rho_r
    j_l = T_of_E * drho
    phi_l = j_l * E
    sigma = T_of_E * (xi(E, thermo.beta_r, thermo.mu_r) - xi(E, thermo.beta_l, thermo.mu_l)) * drho
    if sigma < 0.0:
        # (xi_r - xi_l) and (rho_l - rho_r) share their sign analytically;
        # a tiny negative product is rounding at near-equal occupations.
        if sigma < _SIGMA_ROUNDING_FLOOR:
            raise DomainError(f"entropy density {sigma} is negative beyond rounding")
        sigma = 0.0
    return SpectralDensities(phi_l, -phi_l, j_l, -j_l, sigma)


def evaluate_point(sample: SampleSpec, lead_l, lead_r, E) -> PointResult:
    """Self-energies -> coupled Green matrix -> t-matrix -> transmission."""
    se = SelfEnergyPair(weiss_boundary(lead_l, E), weiss_boundary(lead_r, E))
    if se.F_l.imag <= 0 and se.F_r.imag <= 0:
        # Both channels closed: no scattering at this energy.
        zero = np.zeros((2, 2), dtype=complex)
        return PointResult(E, 0.0, 0.0, zero, zero, se)
    G = coupled_green_direct(sample.potential, E, sample.length, se)
    t = t_matrix(G, se)
    return PointResult(E, transmission(t), unitarity_residual(t), G, t, se)


def integration_window(config: SystemConfig) -> leads_mod.EnergyWindow:
    """Open-channel window minus the band-edge margins."""
    window = sigma_intersection(config.lead_l, config.lead_r)
    return window.shrink(config.quadrature.edge_margin)


def integrate_fluxes(config: SystemConfig) -> FluxResult:
    """Adaptive quadrature of the densities over the open-channel window.

    At every node the full pipeline runs through the direct self-energy
    solve. The initial panel width is capped at pi/(L+1) so the rule
    resolves each of the ~L transmission resonances across the band.
    """
    window = integration_window(config)
    if window.is_empty:
        return FluxResult(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0, True, True, 0.0)

    sample = config.sample
    thermo = config.thermo
    max_residual = [0.0]

    def integrand(E):
        point = evaluate_point(sample, config.lead_l, config.lead_r, E)
        if point.unitarity_residual > max_residual[0]:
            max_residual[0] = point.unitarity_residual
        d = spectral_densities(E, point.transmission, thermo)
        return np.array([d.phi_l, d.j_l, d.sigma])

    cap = min(window.total_length(), math.pi / (sample.length + 1))
    res = adaptive_gk15(
        integrand,
        window.intervals,
        tol=config.quadrature.tolerance,
        max_evaluations=config.quadrature.max_evaluations,
        max_initial_width=cap,
    )
    pref = 1.0 / (2.0 * math.pi)
    phi, j, sig = (res.integral * pref).tolist()
    err = float(res.error.max()) * pref
    return FluxResult(
        energy_flux_l=phi,
        energy_flux_r=-phi,
        charge_flux_l=j,
        charge_flux_r=-j,
        entropy_flux=sig,
        quadrature_error_estimate=err,
        evaluations=res.evaluations,
        converged=res.converged,
        no_open_channel=False,
        max_unitarity_residual=max_residual[0],
    )
