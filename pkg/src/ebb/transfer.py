"""Overflow-safe transfer-matrix products and norm diagnostics.

The running product of one-step factors [[v(x)-E, -1], [1, 0]] grows like
exp(gamma*L) for localized potentials, far beyond float range for large L.
The product is therefore kept as a ScaledMatrix2: a well-conditioned 2x2
matrix times exp(log_scale), renormalized by its max entry whenever that
entry leaves [1/2, 2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass
class ScaledMatrix2:
    """A 2x2 real matrix with separated logarithmic scale.

    Represents the matrix exp(log_scale) * m. Each transfer factor is
    unimodular, so the represented determinant det(m)*exp(2*log_scale)
    stays equal to 1 up to accumulated rounding.

    log_det carries the determinant bookkeeping of the product that built
    this matrix. It cannot be recovered from m once the product's
    condition number passes 1/eps (the small singular value drowns in
    rounding noise), so the product loop accumulates it from short,
    well-conditioned segments whose determinants are computable at full
    precision.
    """

    m: np.ndarray
    log_scale: float
    log_det: float = None

    def represented_log_det(self) -> float:
        """log|det| of the represented matrix; 0 for an exact product."""
        if self.log_det is not None:
            return self.log_det
        det = self.m[0, 0] * self.m[1, 1] - self.m[0, 1] * self.m[1, 0]
        return math.log(abs(det)) + 2.0 * self.log_scale


def one_step(v_x: float, E: float) -> np.ndarray:
    """Single transfer factor at site x; determinant 1 by construction."""
    return np.array([[v_x - E, -1.0], [1.0, 0.0]])


def _smax(a: float, b: float, c: float, d: float) -> float:
    """Largest singular value of [[a,b],[c,d]], closed form."""
    f = a * a + b * b + c * c + d * d
    det = a * d - b * c
    disc = f * f - 4.0 * det * det
    if disc < 0.0:
        disc = 0.0
    return math.sqrt(0.5 * (f + math.sqrt(disc)))


def log_spectral_norm(M: ScaledMatrix2) -> float:
    """log of the spectral norm of the represented matrix.

    Clamped at 0: a real unimodular 2x2 matrix has norm >= 1, so any
    negative value is pure rounding.
    """
    a, b = M.m[0, 0], M.m[0, 1]
    c, d = M.m[1, 0], M.m[1, 1]
    val = M.log_scale + math.log(_smax(a, b, c, d))
    return val if val > 0.0 else 0.0


def _scan(pot, E: float, L: int, checkpoints: Sequence[int]):
    """Core product loop; returns the final scaled entries and snapshots.

    Snapshots are (x, a, b, c, d, log_scale) at each requested checkpoint,
    taken after the factor for site x has been applied.
    """
    cps = sorted(set(int(c) for c in checkpoints))
    if cps and (cps[0] < 0 or cps[-1] > L):
        raise ValueError(f"checkpoints must lie in [0, {L}]")
    if len(pot) < L + 1:
        raise ValueError(f"potential has {len(pot)} entries, need {L + 1}")
    pot = np.asarray(pot, dtype=float)

    a, b, c, d = 1.0, 0.0, 0.0, 1.0
    ls = 0.0
    # Determinant bookkeeping: an independent unscaled segment product,
    # closed while still well-conditioned (entries <= 32) so its
    # determinant is exact to rounding. Segment log-dets sum to the
    # represented log-det of the full product.
    sa, sb, sc, sd = 1.0, 0.0, 0.0, 1.0
    log_det = 0.0
    snapshots = []
    ci = 0
    ncp = len(cps)
    vals = pot[: L + 1].tolist()
    for x in range(L + 1):
        t = vals[x] - E
        a, b, c, d = t * a - c, t * b - d, a, b
        mx = abs(a)
        for e in (b, c, d):
            ae = abs(e)
            if ae > mx:
                mx = ae
        if mx > 2.0 or mx < 0.5:
            a /= mx
            b /= mx
            c /= mx
            d /= mx
            ls += math.log(mx)
        sa, sb, sc, sd = t * sa - sc, t * sb - sd, sa, sb
        if max(abs(sa), abs(sb), abs(sc), abs(sd)) > 32.0:
            log_det += math.log(abs(sa * sd - sb * sc))
            sa, sb, sc, sd = 1.0, 0.0, 0.0, 1.0
        if ci < ncp and cps[ci] == x:
            snapshots.append((x, a, b, c, d, ls, log_det + math.log(abs(sa * sd - sb * sc))))
            ci += 1
    log_det += math.log(abs(sa * sd - sb * sc))
    return (a, b, c, d, ls, log_det), snapshots


def product(pot, E: float, L: int, checkpoints: Iterable[int] = ()):
    """Transfer matrix T_L(E) in scaled form, plus checkpoint log-norms.

    Returns (ScaledMatrix2, trace) where trace is a list of
    (checkpoint L, log spectral norm of T at that L), in increasing L.
    Bit-reproducible for fixed inputs.
    """
    (a, b, c, d, ls, log_det), snaps = _scan(pot, E, L, list(checkpoints))
    trace = [
        (x, max(0.0, sls + math.log(_smax(sa, sb, sc, sd))))
        for (x, sa, sb, sc, sd, sls, _) in snaps
    ]
    final = ScaledMatrix2(np.array([[a, b], [c, d]]), ls, log_det)
    return final, trace


def checkpoint_products(pot, E: float, checkpoints: Sequence[int]):
    """Scaled transfer matrices at each checkpoint, from a single pass."""
    cps = sorted(set(int(c) for c in checkpoints))
    _, snaps = _scan(pot, E, cps[-1], cps)
    return [
        (x, ScaledMatrix2(np.array([[a, b], [c, d]]), ls, ld))
        for (x, a, b, c, d, ls, ld) in snaps
    ]
