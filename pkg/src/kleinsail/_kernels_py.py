"""Pure-Python reference implementations of the hot loops.

The compiled module ``_ckernels`` provides the same three functions; the
selection happens in :mod:`kleinsail._kernels`.
"""

from __future__ import annotations

import math
from typing import Callable, Iterator, Sequence

import numpy as np


def visible(pts: Sequence[tuple], i: int, j: int, k: int, cand: Sequence[int]) -> list[int]:
    """Indices q in ``cand`` strictly above the oriented plane (i, j, k)."""
    ax, ay, az = pts[i]
    bx, by, bz = pts[j]
    cx, cy, cz = pts[k]
    ux, uy, uz = bx - ax, by - ay, bz - az
    vx, vy, vz = cx - ax, cy - ay, cz - az
    nx = uy * vz - uz * vy
    ny = uz * vx - ux * vz
    nz = ux * vy - uy * vx
    off = nx * ax + ny * ay + nz * az
    out = []
    for q in cand:
        x, y, z = pts[q]
        if nx * x + ny * y + nz * z > off:
            out.append(q)
    return out


def slab_candidates(
    lo: int, hi: int, a_lo, a_hi, lower: Sequence[tuple], upper: Sequence[tuple], shift: int
) -> Iterator[tuple[int, int, int]]:
    """Superset of lattice coordinates (h, a, b) of a cone slab.

    ``lower`` and ``upper`` hold scaled interval ratios (zeta, upsilon) so that
    the admissible b at (h, a) lies between the floors and ceilings of
    ``-(h * zeta + a * upsilon)``.
    """
    for h in range(lo, hi + 1):
        amin = math.floor(h * a_lo)
        amax = math.ceil(h * a_hi)
        for a in range(amin, amax + 1):
            blo = None
            for zl, zh, ul, uh in lower:
                m = h * zh + (a * uh if a >= 0 else a * ul)
                bnd = (-m) >> shift
                if blo is None or bnd > blo:
                    blo = bnd
            bhi = None
            for zl, zh, ul, uh in upper:
                m = h * zl + (a * ul if a >= 0 else a * uh)
                bnd = -(m >> shift)
                if bhi is None or bnd < bhi:
                    bhi = bnd
            for b in range(blo, bhi + 1):
                yield h, a, b


def pareto_filter(
    ly: np.ndarray, order: Sequence[int], dominated: Callable[[int, Sequence[int]], bool], tol: float = 1e-9
) -> list[int]:
    """Indices surviving a dominance sweep in ``order``.

    ``ly`` holds log-coordinates; a kept point whose coordinates are all at
    most those of the current point (up to ``tol``) is a candidate dominator,
    and ``dominated`` makes the exact decision.
    """
    n = len(order)
    kept_ly = np.empty((n, 3))
    kept: list[int] = []
    for i in order:
        m = len(kept)
        if m:
            mask = (kept_ly[:m] <= ly[i] + tol).all(axis=1)
            if mask.any():
                cands = [kept[t] for t in np.flatnonzero(mask)]
                if dominated(i, cands):
                    continue
        kept_ly[m] = ly[i]
        kept.append(i)
    return kept
