import math

import numpy as np
import pytest

from ebb.errors import DomainError, NumericalFailure, ResonanceError
from ebb.green import (
    SelfEnergyPair,
    condition_estimate,
    coupled_green,
    coupled_green_direct,
    graph_map_check,
    sample_green_direct,
    sample_green_via_transfer,
)
from ebb.leads import weiss_boundary
from ebb.potentials import AndersonRandom, generate
from ebb.transfer import product

from conftest import dense_green


def test_self_energy_pair_sign_check():
    SelfEnergyPair(1j, 0.5 + 0.0j)
    with pytest.raises(DomainError):
        SelfEnergyPair(-1e-6j, 1j)


def test_decoupled_worked_example():
    # L = 1, v = 0, E = 0: h - E = [[0, -1], [-1, 0]], G0 = [[0, -1], [-1, 0]].
    G0 = sample_green_direct(np.zeros(2), 0.0, 1)
    np.testing.assert_allclose(G0, [[0.0, -1.0], [-1.0, 0.0]], atol=1e-15)
    T, _ = product(np.zeros(2), 0.0, 1)
    np.testing.assert_allclose(sample_green_via_transfer(T), G0, atol=1e-15)


def test_decoupled_routes_agree_and_match_dense_oracle():
    rng = np.random.default_rng(2)
    for L in (1, 7, 40):
        pot = rng.uniform(-1.2, 1.2, L + 1)
        E = 0.37
        direct = sample_green_direct(pot, E, L)
        T, _ = product(pot, E, L)
        via = sample_green_via_transfer(T)
        np.testing.assert_allclose(via, direct, atol=1e-10)
        ref = dense_green(pot, E, L).real
        np.testing.assert_allclose(direct, ref, atol=1e-10)


def test_decoupled_symmetry():
    pot = generate(AndersonRandom(1.0, 21), 60)
    G0 = sample_green_direct(pot, -0.4, 60)
    assert G0[0, 1] == pytest.approx(G0[1, 0], abs=1e-14)


def test_resonance_detection_both_routes():
    # v = 0, L = 1, E = 1 is an exact Dirichlet eigenvalue.
    with pytest.raises(ResonanceError):
        sample_green_direct(np.zeros(2), 1.0, 1)
    T, _ = product(np.zeros(2), 1.0, 1)
    with pytest.raises(ResonanceError):
        sample_green_via_transfer(T)


def test_condition_estimate_blows_up_at_resonance():
    pot = np.zeros(2)
    near = condition_estimate(pot, 1.0 + 1e-9, 1)
    far = condition_estimate(pot, 0.3, 1)
    assert near > 1e7 * far


def test_offdiagonal_underflow_for_long_localized_sample():
    # ||T|| ~ exp(gamma*L) >> float range: g_lr underflows cleanly to 0.
    pot = generate(AndersonRandom(2.0, 4), 5000)
    T, _ = product(pot, 0.0, 5000)
    G0 = sample_green_via_transfer(T)
    assert G0[0, 1] == 0.0
    assert np.all(np.isfinite(G0))


def _se(lead, E):
    F = weiss_boundary(lead, E)
    return SelfEnergyPair(F, F)


def test_coupled_routes_agree_and_match_dense_oracle(lead11):
    rng = np.random.default_rng(3)
    for L in (1, 9, 50):
        pot = rng.uniform(-1, 1, L + 1)
        E = -0.6
        se = _se(lead11, E)
        direct = coupled_green_direct(pot, E, L, se)
        via = coupled_green(sample_green_direct(pot, E, L), se)
        np.testing.assert_allclose(via, direct, atol=1e-10)
        ref = dense_green(pot, E, L, se.F_l, se.F_r)
        np.testing.assert_allclose(direct, ref, atol=1e-10)


def test_coupled_direct_survives_dirichlet_resonance(lead11):
    # E = 1 is a Dirichlet eigenvalue of the decoupled L = 1 sample, but
    # the coupled system stays invertible because Im F > 0.
    se = _se(lead11, 1.0)
    G = coupled_green_direct(np.zeros(2), 1.0, 1, se)
    ref = dense_green(np.zeros(2), 1.0, 1, se.F_l, se.F_r)
    np.testing.assert_allclose(G, ref, atol=1e-12)


def test_coupled_direct_requires_open_channel():
    with pytest.raises(DomainError):
        coupled_green_direct(np.zeros(2), 0.0, 1, SelfEnergyPair(0.5 + 0j, -0.5 + 0j))


def test_coupled_green_singular_junction_rejected():
    # G0 = [[0, -1], [-1, 0]], F = diag(0+0j not allowed) -- use a real F
    # pair with Im = 0 that makes I - G0 F singular: F_l = F_r = 1 gives
    # I - G0 F = [[1, 1], [1, 1]].
    G0 = np.array([[0.0, -1.0], [-1.0, 0.0]])
    with pytest.raises(NumericalFailure):
        coupled_green(G0, SelfEnergyPair(1.0 + 0j, 1.0 + 0j))


def test_graph_map_residual_small(lead11):
    for seed, L, E in ((7, 500, 0.5), (1, 50, -1.1), (2, 2000, 0.2)):
        pot = generate(AndersonRandom(2.0, seed), L)
        se = _se(lead11, E)
        G = coupled_green_direct(pot, E, L, se)
        T, _ = product(pot, E, L)
        assert graph_map_check(G, T, se) < 1e-8


def test_graph_map_detects_wrong_green(lead11):
    pot = generate(AndersonRandom(1.0, 8), 30)
    se = _se(lead11, 0.5)
    G = coupled_green_direct(pot, 0.5, 30, se)
    T, _ = product(pot, 0.5, 30)
    assert graph_map_check(G + 0.01, T, se) > 1e-4
