"""Growing-L studies: sweeps of the entropy density against transfer norms.

For a fixed energy the entropy density sigma_L(E) and the transfer norm
||T_L(E)|| are tracked over a checkpoint sequence in L. Empirically,
vanishing transport coincides with divergent transfer norms; the
classifier below labels each energy from finite-L evidence only, and every
report carries the L_max actually used. No claim is made about the true
infinite-L behavior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.stats import linregress

from .errors import DomainError, NumericalFailure
from .fluxes import evaluate_point, spectral_densities
from .green import RESONANCE_RELATIVE_CUTOFF
from .leads import LeadModel, sigma_intersection
from .model import SampleSpec, ThermoParams
from .potentials import PotentialSpec, generate
from .transfer import _smax, checkpoint_products, log_spectral_norm

# Below this the density has decayed hundreds of decades: its logarithm is
# no longer fit-worthy and the point is decisive evidence of vanishing.
SIGMA_UNDERFLOW_FLOOR = 1e-200


@dataclass(frozen=True)
class LSweepPoint:
    L: int
    sigma_density: float
    transmission: float
    log_transfer_norm: float
    resonance_flag: bool


@dataclass(frozen=True)
class ClassificationThresholds:
    """Finite-L labeling heuristics; tunable, reported alongside L_max."""

    vanishing_slope_factor: float = 10.0   # slope < -factor/L_max
    vanishing_r2: float = 0.8
    persistent_floor: float = 0.5          # min sigma > floor * median
    bounded_norm_slope_factor: float = 1.0  # norm slope < factor/L_max
    divergent_norm_slope_factor: float = 10.0  # contradiction screening


@dataclass(frozen=True)
class TransportClassification:
    label: str  # persistent | vanishing | indeterminate
    norm_slope: float
    norm_r2: float
    sigma_slope: float
    sigma_r2: float
    l_max: int
    underflowed: bool = False


@dataclass(frozen=True)
class EnergyPoint:
    E: float
    transmission: float
    phi_l: float
    j_l: float
    sigma: float
    unitarity_residual: float
    error: Optional[str] = None


@dataclass(frozen=True)
class EquivalenceRow:
    E: float
    label: str
    norm_slope: float
    sigma_slope: float
    sigma_at_l_max: float
    contradiction: bool


@dataclass(frozen=True)
class EquivalenceReport:
    rows: tuple
    l_max: int
    counts: dict = field(default_factory=dict)
    mean_sigma_persistent: float = float("nan")
    mean_sigma_vanishing: float = float("nan")
    contradictions: int = 0


def _sigma_envelope(E, T_of_E, thermo: ThermoParams) -> float:
    """Crude explicit upper bound on the entropy density."""
    bmax = max(thermo.beta_l, thermo.beta_r)
    bmin = min(thermo.beta_l, thermo.beta_r)
    return 4.0 * T_of_E * bmax * (abs(E) + abs(thermo.mu_l) + abs(thermo.mu_r) + 2.0 / bmin)


def l_sweep(
    spec: PotentialSpec,
    E: float,
    lead_l: LeadModel,
    lead_r: LeadModel,
    thermo: ThermoParams,
    checkpoints: Sequence[int],
) -> list:
    """Entropy density, transmission, and transfer norm at each checkpoint.

    The potential is generated once at the largest checkpoint (prefix
    stability) and the transfer norms come from a single scaled product
    pass; the Green-function pipeline runs independently per checkpoint.
    """
    cps = sorted(set(int(c) for c in checkpoints))
    if not cps or cps[0] < 1:
        raise DomainError("checkpoints must be increasing integers >= 1")
    if not sigma_intersection(lead_l, lead_r).contains(E):
        raise DomainError(
            f"E={E} is outside the band intersection; sigma vanishes trivially"
        )
    pot = generate(spec, cps[-1])
    snapshots = checkpoint_products(pot, E, cps)
    points = []
    for (L, T), Lc in zip(snapshots, cps):
        assert L == Lc
        m = T.m
        resonance = abs(m[0, 0]) < RESONANCE_RELATIVE_CUTOFF * _smax(
            m[0, 0], m[0, 1], m[1, 0], m[1, 1]
        )
        sample = SampleSpec(L, pot[: L + 1])
        point = evaluate_point(sample, lead_l, lead_r, E)
        d = spectral_densities(E, point.transmission, thermo)
        if d.sigma > _sigma_envelope(E, point.transmission, thermo):
            raise NumericalFailure(
                f"entropy density {d.sigma} exceeds its explicit envelope at L={L}"
            )
        points.append(
            LSweepPoint(L, d.sigma, point.transmission, log_spectral_norm(T), resonance)
        )
    return points


def _fit(xs, ys):
    if len(xs) < 2 or np.ptp(ys) == 0.0:
        # Degenerate fit; a flat series has slope 0 and perfect quality.
        return 0.0, 1.0
    res = linregress(xs, ys)
    return float(res.slope), float(res.rvalue**2)


def classify_transport(
    sweep: Sequence[LSweepPoint],
    thresholds: ClassificationThresholds = ClassificationThresholds(),
) -> TransportClassification:
    """Label an L-sweep as persistent, vanishing, or indeterminate."""
    if len(sweep) < 8:
        raise DomainError("need at least 8 checkpoints to classify")
    Ls = np.array([p.L for p in sweep], dtype=float)
    if Ls.max() < 10 * Ls.min():
        raise DomainError("checkpoints must span at least a factor 10 in L")
    l_max = int(Ls.max())
    sigmas = np.array([p.sigma_density for p in sweep])
    norms = np.array([p.log_transfer_norm for p in sweep])

    norm_slope, norm_r2 = _fit(Ls, norms)
    alive = sigmas > SIGMA_UNDERFLOW_FLOOR
    underflowed = bool(np.any(~alive))
    if np.any(alive):
        sigma_slope, sigma_r2 = _fit(Ls[alive], np.log(sigmas[alive]))
    else:
        sigma_slope, sigma_r2 = -math.inf, 1.0

    vanishing = underflowed or (
        sigma_slope < -thresholds.vanishing_slope_factor / l_max
        and sigma_r2 > thresholds.vanishing_r2
    )
    persistent = (
        not underflowed
        and float(sigmas.min()) > thresholds.persistent_floor * float(np.median(sigmas))
        and norm_slope < thresholds.bounded_norm_slope_factor / l_max
    )
    if vanishing:
        label = "vanishing"
    elif persistent:
        label = "persistent"
    else:
        label = "indeterminate"
    return TransportClassification(
        label, norm_slope, norm_r2, sigma_slope, sigma_r2, l_max, underflowed
    )


def energy_sweep(
    spec: PotentialSpec,
    L: int,
    lead_l: LeadModel,
    lead_r: LeadModel,
    thermo: ThermoParams,
    grid: Sequence[float],
) -> list:
    """Full pipeline at each grid energy; failures are recorded per point."""
    pot = generate(spec, L)
    sample = SampleSpec(L, pot)
    out = []
    for E in grid:
        try:
            point = evaluate_point(sample, lead_l, lead_r, E)
            d = spectral_densities(E, point.transmission, thermo)
            out.append(
                EnergyPoint(
                    E, point.transmission, d.phi_l, d.j_l, d.sigma,
                    point.unitarity_residual,
                )
            )
        except (DomainError, NumericalFailure) as exc:
            out.append(
                EnergyPoint(E, math.nan, math.nan, math.nan, math.nan, math.nan, str(exc))
            )
    return out


def equivalence_rows(
    spec: PotentialSpec,
    grid: Sequence[float],
    checkpoints: Sequence[int],
    lead_l: LeadModel,
    lead_r: LeadModel,
    thermo: ThermoParams,
    thresholds: ClassificationThresholds = ClassificationThresholds(),
) -> list:
    """Classification rows for each grid energy.

    A contradiction is finite-L evidence against the norm/transport
    equivalence: a vanishing label with bounded norms, or a persistent
    label with clearly growing norms.
    """
    rows = []
    l_max = int(max(checkpoints))
    for E in grid:
        sweep = l_sweep(spec, E, lead_l, lead_r, thermo, checkpoints)
        cls = classify_transport(sweep, thresholds)
        sigma_last = sweep[-1].sigma_density
        if cls.label == "vanishing":
            contradiction = cls.norm_slope < thresholds.bounded_norm_slope_factor / l_max
        elif cls.label == "persistent":
            contradiction = cls.norm_slope > thresholds.divergent_norm_slope_factor / l_max
        else:
            contradiction = False
        rows.append(
            EquivalenceRow(
                E, cls.label, cls.norm_slope, cls.sigma_slope, sigma_last, contradiction
            )
        )
    return rows


def summarize_equivalence(rows: Sequence[EquivalenceRow], l_max: int) -> EquivalenceReport:
    counts = {}
    for row in rows:
        counts[row.label] = counts.get(row.label, 0) + 1
    persistent_sigma = [r.sigma_at_l_max for r in rows if r.label == "persistent"]
    vanishing_sigma = [r.sigma_at_l_max for r in rows if r.label == "vanishing"]
    return EquivalenceReport(
        rows=tuple(rows),
        l_max=l_max,
        counts=counts,
        mean_sigma_persistent=float(np.mean(persistent_sigma)) if persistent_sigma else math.nan,
        mean_sigma_vanishing=float(np.mean(vanishing_sigma)) if vanishing_sigma else math.nan,
        contradictions=sum(r.contradiction for r in rows),
    )


def equivalence_report(
    spec: PotentialSpec,
    grid: Sequence[float],
    checkpoints: Sequence[int],
    lead_l: LeadModel,
    lead_r: LeadModel,
    thermo: ThermoParams,
    thresholds: ClassificationThresholds = ClassificationThresholds(),
) -> EquivalenceReport:
    rows = equivalence_rows(spec, grid, checkpoints, lead_l, lead_r, thermo, thresholds)
    return summarize_equivalence(rows, int(max(checkpoints)))
