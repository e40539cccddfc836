import math

import numpy as np
import pytest

from ebb.errors import DomainError
from ebb.model import ThermoParams
from ebb.potentials import AndersonRandom, Periodic, Zero
from ebb.scan import (
    ClassificationThresholds,
    LSweepPoint,
    classify_transport,
    energy_sweep,
    equivalence_report,
    l_sweep,
)

THERMO = ThermoParams(1.0, 2.0, 0.5, -0.5)
CHECKPOINTS = [10, 16, 25, 40, 63, 100, 158, 251, 398, 631, 1000]


def test_l_sweep_free_sample(lead11):
    points = l_sweep(Zero(), 0.5, lead11, lead11, THERMO, CHECKPOINTS)
    assert [p.L for p in points] == CHECKPOINTS
    for p in points:
        assert 0.0 < p.transmission <= 1.0
        assert p.sigma_density > 0.0
        assert not p.resonance_flag
    # Free transfer norms stay bounded along the whole sweep.
    assert max(p.log_transfer_norm for p in points) < 2.0


def test_l_sweep_rejects_out_of_band_energy(lead11):
    with pytest.raises(DomainError, match="band"):
        l_sweep(Zero(), 3.0, lead11, lead11, THERMO, CHECKPOINTS)
    with pytest.raises(DomainError, match="checkpoints"):
        l_sweep(Zero(), 0.5, lead11, lead11, THERMO, [0, 10])


def test_classify_persistent_free(lead11):
    points = l_sweep(Zero(), 0.5, lead11, lead11, THERMO, CHECKPOINTS)
    cls = classify_transport(points)
    assert cls.label == "persistent"
    assert cls.l_max == 1000
    assert abs(cls.norm_slope) < 1.0 / 1000
    assert not cls.underflowed


def test_classify_vanishing_strong_disorder(lead11):
    points = l_sweep(AndersonRandom(2.0, 7), 0.5, lead11, lead11, THERMO, CHECKPOINTS)
    cls = classify_transport(points)
    assert cls.label == "vanishing"
    assert cls.norm_slope > 0.0
    assert cls.norm_r2 > 0.9
    # sigma either decays with a clean fit or underflows outright.
    assert cls.underflowed or (cls.sigma_slope < 0 and cls.sigma_r2 > 0.8)


def test_classify_requirements():
    pts = [LSweepPoint(L, 1.0, 1.0, 0.0, False) for L in (10, 20, 30, 40)]
    with pytest.raises(DomainError, match="8 checkpoints"):
        classify_transport(pts)
    pts = [LSweepPoint(10 + i, 1.0, 1.0, 0.0, False) for i in range(8)]
    with pytest.raises(DomainError, match="factor 10"):
        classify_transport(pts)


def test_classify_synthetic_underflow_is_vanishing():
    Ls = [10, 20, 40, 80, 160, 320, 640, 1280]
    pts = [LSweepPoint(L, 0.0 if L > 100 else 1e-150, 0.0, 0.1 * L, False) for L in Ls]
    cls = classify_transport(pts)
    assert cls.label == "vanishing"
    assert cls.underflowed


def test_classify_indeterminate_between_regimes():
    # Flat norms but strongly fluctuating sigma: neither test should fire
    # with the default thresholds.
    Ls = [10, 20, 40, 80, 160, 320, 640, 1280]
    sigmas = [1.0, 1e-3, 1.0, 1e-3, 1.0, 1e-3, 1.0, 1e-3]
    pts = [LSweepPoint(L, s, 0.5, 0.0, False) for L, s in zip(Ls, sigmas)]
    assert classify_transport(pts).label == "indeterminate"


def test_thresholds_are_tunable():
    Ls = [10, 20, 40, 80, 160, 320, 640, 1280]
    # min/median ratio ~ 0.3: below the default floor, above a loose one.
    sigmas = [1.0, 0.9, 1.1, 0.3, 1.0, 0.95, 1.05, 0.9]
    pts = [LSweepPoint(L, s, 0.5, 0.0, False) for L, s in zip(Ls, sigmas)]
    assert classify_transport(pts).label == "indeterminate"
    loose = ClassificationThresholds(persistent_floor=0.1)
    assert classify_transport(pts, loose).label == "persistent"


def test_energy_sweep_records_errors_per_point(lead11):
    # E = 3 is out of band: a closed-channel zero, not an error.
    grid = [0.5, 1.0, 3.0]
    out = energy_sweep(Zero(), 10, lead11, lead11, THERMO, grid)
    assert len(out) == 3
    assert out[0].error is None
    assert out[0].transmission > 0.0
    assert out[2].transmission == 0.0
    assert all(p.sigma >= 0.0 for p in out if p.error is None)


def test_equivalence_report_clean_split(lead11):
    # Grid avoids E = -1.5, where the two Fermi factors of THERMO cross
    # and the entropy density vanishes identically for any potential.
    grid = np.linspace(-1.2, 1.5, 8)
    free = equivalence_report(Zero(), grid, CHECKPOINTS, lead11, lead11, THERMO)
    assert free.counts.get("persistent", 0) == len(grid)
    assert free.contradictions == 0
    assert free.l_max == 1000
    assert free.mean_sigma_persistent > 0.0
    assert math.isnan(free.mean_sigma_vanishing)

    disordered = equivalence_report(
        AndersonRandom(2.0, 7), grid, CHECKPOINTS, lead11, lead11, THERMO
    )
    assert disordered.counts.get("vanishing", 0) == len(grid)
    assert disordered.contradictions == 0


def test_periodic_band_energy_is_persistent(lead11):
    # At E = -0.5 the trace of the 2-cell transfer, E^2 - 3E - 2 = -0.25,
    # lies inside (-2, 2): a band energy of the period-2 potential.
    loose = ClassificationThresholds(persistent_floor=0.1)
    rep = equivalence_report(
        Periodic((3.0, 0.0)), [-0.5], CHECKPOINTS, lead11, lead11, THERMO, loose
    )
    assert rep.rows[0].label == "persistent"
