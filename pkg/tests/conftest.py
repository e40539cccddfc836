"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the code paths they check: the lead
boundary value is recomputed from a large truncated lead, and small Green
matrices from dense matrix inversion.
"""

import numpy as np
import pytest
from scipy.linalg import lapack

from ebb.leads import SemiInfiniteLaplacian


@pytest.fixture(scope="session")
def lead11():
    return SemiInfiniteLaplacian(1.0, 1.0)


def truncated_weiss(k, kappa, E, N=100_000, eps=1e-4):
    """coupling^2 * <d0, (h_N - E - i*eps)^(-1) d0> on an N-site lead."""
    diag = np.full(N, -E - 1j * eps)
    off = np.full(N - 1, -k, dtype=complex)
    rhs = np.zeros((N, 1), dtype=complex)
    rhs[0, 0] = 1.0
    _, _, _, x, info = lapack.zgtsv(off, diag, off.copy(), rhs)
    assert info == 0
    return kappa * kappa * x[0, 0]


def dense_hamiltonian(pot, L):
    """Full (L+1)x(L+1) sample Hamiltonian as a dense matrix."""
    h = np.diag(np.asarray(pot, dtype=float)[: L + 1])
    idx = np.arange(L)
    h[idx, idx + 1] = -1.0
    h[idx + 1, idx] = -1.0
    return h


def dense_green(pot, E, L, F_l=0.0, F_r=0.0):
    """Boundary 2x2 block of (h - E - F_l P_0 - F_r P_L)^(-1), densely."""
    h = dense_hamiltonian(pot, L).astype(complex)
    h[0, 0] -= F_l
    h[L, L] -= F_r
    g = np.linalg.inv(h - E * np.eye(L + 1))
    return np.array([[g[0, 0], g[0, L]], [g[L, 0], g[L, L]]])
