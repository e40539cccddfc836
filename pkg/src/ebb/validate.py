"""Built-in invariant suite backing the `validate` CLI command.

A fast, self-contained battery: unitarity on an energy grid, the two
Green-matrix oracle equivalences, the graph-correspondence residual,
conservation and the entropy identity at random nodes, and the
equilibrium null test. Runs in seconds and exits nonzero on any failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ResonanceError
from .fluxes import SystemConfig, evaluate_point, integrate_fluxes, spectral_densities
from .green import (
    SelfEnergyPair,
    condition_estimate,
    coupled_green,
    coupled_green_direct,
    graph_map_check,
    sample_green_direct,
    sample_green_via_transfer,
)
from .leads import SemiInfiniteLaplacian, weiss_boundary
from .model import SampleSpec, ThermoParams
from .potentials import AndersonRandom, Periodic, Zero, generate
from .transfer import product


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _rel_diff(A, B) -> float:
    scale = max(np.max(np.abs(A)), np.max(np.abs(B)), 1e-300)
    return float(np.max(np.abs(A - B)) / scale)


_POTENTIALS = (
    ("zero", Zero()),
    ("periodic-1-0", Periodic((1.0, 0.0))),
    ("anderson-1", AndersonRandom(1.0, 42)),
)
_LEAD = SemiInfiniteLaplacian(1.0, 1.0)
_THERMO = ThermoParams(1.0, 2.0, 0.5, -0.5)


def check_unitarity(grid_points: int = 100, lengths=(10, 200)) -> CheckResult:
    worst = 0.0
    grid = np.linspace(-2 + 1e-6, 2 - 1e-6, grid_points + 2)[1:-1]
    for _, spec in _POTENTIALS:
        for L in lengths:
            sample = SampleSpec(L, generate(spec, L))
            for E in grid:
                point = evaluate_point(sample, _LEAD, _LEAD, E)
                worst = max(worst, point.unitarity_residual)
    return CheckResult("unitarity", worst < 1e-10, f"max residual {worst:.3e}")


def check_decoupled_green_equivalence(n_energies: int = 20, L: int = 100) -> CheckResult:
    rng = np.random.Generator(np.random.Philox(key=1))
    worst = 0.0
    for _, spec in _POTENTIALS:
        pot = generate(spec, L)
        for E in rng.uniform(-1.9, 1.9, n_energies):
            if condition_estimate(pot, E, L) > 1e8:
                continue
            T, _ = product(pot, E, L)
            try:
                via_transfer = sample_green_via_transfer(T)
            except ResonanceError:
                continue
            worst = max(worst, _rel_diff(via_transfer, sample_green_direct(pot, E, L)))
    return CheckResult(
        "decoupled-green-equivalence", worst < 1e-9, f"max rel diff {worst:.3e}"
    )


def check_coupled_green_equivalence(n_energies: int = 20, L: int = 100) -> CheckResult:
    rng = np.random.Generator(np.random.Philox(key=2))
    worst = 0.0
    for _, spec in _POTENTIALS:
        pot = generate(spec, L)
        for E in rng.uniform(-1.9, 1.9, n_energies):
            if condition_estimate(pot, E, L) > 1e8:
                continue
            se = SelfEnergyPair(weiss_boundary(_LEAD, E), weiss_boundary(_LEAD, E))
            via_identity = coupled_green(sample_green_direct(pot, E, L), se)
            worst = max(worst, _rel_diff(via_identity, coupled_green_direct(pot, E, L, se)))
    return CheckResult(
        "coupled-green-equivalence", worst < 1e-8, f"max rel diff {worst:.3e}"
    )


def check_graph_map(L: int = 500) -> CheckResult:
    spec = AndersonRandom(2.0, 7)
    pot = generate(spec, L)
    E = 0.5
    se = SelfEnergyPair(weiss_boundary(_LEAD, E), weiss_boundary(_LEAD, E))
    G = coupled_green_direct(pot, E, L, se)
    T, _ = product(pot, E, L)
    resid = graph_map_check(G, T, se)
    return CheckResult("graph-map-residual", resid < 1e-8, f"residual {resid:.3e}")


def check_density_identities(n_nodes: int = 100) -> CheckResult:
    rng = np.random.Generator(np.random.Philox(key=3))
    L = 40
    sample = SampleSpec(L, generate(AndersonRandom(1.0, 42), L))
    worst_identity = 0.0
    for E in rng.uniform(-1.9, 1.9, n_nodes):
        point = evaluate_point(sample, _LEAD, _LEAD, E)
        d = spectral_densities(E, point.transmission, _THERMO)
        if d.phi_l + d.phi_r != 0.0 or d.j_l + d.j_r != 0.0:
            return CheckResult("density-identities", False, "conservation violated")
        if d.sigma < 0.0:
            return CheckResult("density-identities", False, f"sigma {d.sigma} < 0")
        recon = -_THERMO.beta_l * (d.phi_l - _THERMO.mu_l * d.j_l) - _THERMO.beta_r * (
            d.phi_r - _THERMO.mu_r * d.j_r
        )
        worst_identity = max(worst_identity, abs(recon - d.sigma))
    return CheckResult(
        "density-identities", worst_identity < 1e-12, f"max identity gap {worst_identity:.3e}"
    )


def check_equilibrium_null() -> CheckResult:
    L = 10
    config = SystemConfig(
        SampleSpec(L, generate(Zero(), L)), _LEAD, _LEAD, ThermoParams(1.0, 1.0, 0.3, 0.3)
    )
    res = integrate_fluxes(config)
    worst = max(
        abs(res.energy_flux_l), abs(res.charge_flux_l), abs(res.entropy_flux)
    )
    return CheckResult("equilibrium-null", worst < 1e-12, f"max flux {worst:.3e}")


def run_all() -> list:
    return [
        check_unitarity(),
        check_decoupled_green_equivalence(),
        check_coupled_green_equivalence(),
        check_graph_map(),
        check_density_identities(),
        check_equilibrium_null(),
    ]
