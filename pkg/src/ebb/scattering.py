"""On-shell t-matrix, unitarity diagnostics, and transmission probability."""

from __future__ import annotations

import math

import numpy as np

from .errors import UnitarityError
from .green import SelfEnergyPair

TRANSMISSION_OVERSHOOT = 1e-10


def t_matrix(G: np.ndarray, se: SelfEnergyPair) -> np.ndarray:
    """t(E) = 2i (Im F)^(1/2) G (Im F)^(1/2), entrywise for diagonal F.

    A lead with Im F = 0 has no open channel; its row and column of t are
    structurally zero and it carries no flux.
    """
    sq = np.array([math.sqrt(max(0.0, se.F_l.imag)), math.sqrt(max(0.0, se.F_r.imag))])
    return 2j * (sq[:, None] * np.asarray(G, dtype=complex) * sq[None, :])


def unitarity_residual(t: np.ndarray) -> float:
    """Spectral norm of t*t + t + t*; zero iff s = 1 + t is unitary.

    Never used to repair t: residual growth is the primary numerical
    health signal of the pipeline.
    """
    th = t.conj().T
    return float(np.linalg.norm(th @ t + t + th, 2))


def transmission(t: np.ndarray) -> float:
    """Transmission probability |t_lr|^2, in [0, 1].

    An overshoot beyond rounding tolerance signals an upstream numerical
    fault and is raised, not clamped.
    """
    val = abs(t[0, 1]) ** 2
    if val > 1.0 + TRANSMISSION_OVERSHOOT:
        raise UnitarityError(f"transmission {val} exceeds 1 beyond tolerance")
    return min(1.0, val)
