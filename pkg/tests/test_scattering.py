import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ebb.errors import UnitarityError
from ebb.green import SelfEnergyPair, coupled_green_direct
from ebb.leads import SemiInfiniteLaplacian, weiss_boundary
from ebb.potentials import AndersonRandom, generate
from ebb.scattering import t_matrix, transmission, unitarity_residual


def test_worked_free_point(lead11):
    # L = 1, v = 0, E = 0: F = i, G = [[i, -1], [-1, i]] / 2,
    # t = [[-1, -i], [-i, -1]], so s = 1 + t is unitary and T = 1.
    se = SelfEnergyPair(1j, 1j)
    G = coupled_green_direct(np.zeros(2), 0.0, 1, se)
    np.testing.assert_allclose(G, np.array([[1j, -1.0], [-1.0, 1j]]) / 2, atol=1e-14)
    t = t_matrix(G, se)
    np.testing.assert_allclose(t, [[-1.0, -1j], [-1j, -1.0]], atol=1e-14)
    assert unitarity_residual(t) < 1e-14
    assert transmission(t) == pytest.approx(1.0, abs=1e-14)


def test_closed_channel_row_is_zero():
    G = np.array([[0.3 + 0.2j, 0.1j], [0.1j, -0.4 + 0.5j]])
    se = SelfEnergyPair(2j, 0.7 + 0j)
    t = t_matrix(G, se)
    assert np.all(t[1, :] == 0) and np.all(t[:, 1] == 0)
    assert transmission(t) == 0.0


def test_transmission_overshoot_raises_and_rounding_clamps():
    bad = np.array([[0.0, 1.0 + 1e-4], [0.0, 0.0]])
    with pytest.raises(UnitarityError):
        transmission(bad)
    edge = np.array([[0.0, 1.0 + 1e-12], [0.0, 0.0]])
    assert transmission(edge) == 1.0


def test_unitarity_residual_flags_broken_t():
    t = np.array([[-1.0, -1j], [-1j, -1.0]])
    assert unitarity_residual(t) < 1e-14
    assert unitarity_residual(t * 1.01) > 1e-3


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 500),
    L=st.integers(1, 120),
    E=st.floats(-1.9, 1.9),
    k=st.floats(1.0, 1.5),
)
def test_unitarity_everywhere_in_band(seed, L, E, k):
    lead = SemiInfiniteLaplacian(k, 1.0)
    pot = generate(AndersonRandom(1.0, seed), L)
    F = weiss_boundary(lead, E)
    se = SelfEnergyPair(F, F)
    G = coupled_green_direct(pot, E, L, se)
    t = t_matrix(G, se)
    assert unitarity_residual(t) < 1e-10
    assert 0.0 <= transmission(t) <= 1.0
