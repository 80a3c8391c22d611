# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in :mod:`kleinsail._kernels_py`.

Integer work runs in 64-bit arithmetic only when every input is small enough
that no intermediate can overflow; otherwise the call is delegated to the
pure-Python version.  The slab kernel may return a few extra candidates,
which the exact membership test downstream discards, so computed sails never
depend on the backend.
"""

from libc.math cimport ceil, fabs, floor

import math

import numpy as np

from . import _kernels_py

cdef enum:
    # |coordinate| below 2**19 keeps every triple product under 2**62
    COORD_LIMIT = 524288
    # bound on h and a for which the double-precision slab bounds are trusted
    INDEX_LIMIT = 1073741824


cdef inline bint _small(tuple p):
    cdef object c
    for c in p:
        if not (-COORD_LIMIT < c < COORD_LIMIT):
            return False
    return True


def visible(pts, int i, int j, int k, cand):
    """Indices q in ``cand`` strictly above the oriented plane (i, j, k)."""
    if not (_small(pts[i]) and _small(pts[j]) and _small(pts[k])):
        return _kernels_py.visible(pts, i, j, k, cand)
    cdef long long ax, ay, az, bx, by, bz, cx, cy, cz
    cdef long long nx, ny, nz, off, x, y, z
    ax, ay, az = pts[i]
    bx, by, bz = pts[j]
    cx, cy, cz = pts[k]
    nx = (by - ay) * (cz - az) - (bz - az) * (cy - ay)
    ny = (bz - az) * (cx - ax) - (bx - ax) * (cz - az)
    nz = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    off = nx * ax + ny * ay + nz * az
    out = []
    cdef tuple p
    for q in cand:
        p = pts[q]
        if not _small(p):
            return _kernels_py.visible(pts, i, j, k, cand)
        x, y, z = p
        if nx * x + ny * y + nz * z > off:
            out.append(q)
    return out


def slab_candidates(lo, hi, a_lo, a_hi, lower, upper, shift):
    """Superset of lattice coordinates (h, a, b) of a cone slab, as a list.

    Each row bound is evaluated in double precision together with a bound on
    its rounding error; rows whose error bound is not comfortably below one
    are redone in exact integer arithmetic.
    """
    if hi >= INDEX_LIMIT or lo <= -INDEX_LIMIT:
        return list(_kernels_py.slab_candidates(lo, hi, a_lo, a_hi, lower, upper, shift))
    lw = np.array([[math.ldexp(v, -shift) for v in r] for r in lower], dtype=np.float64).reshape(len(lower), 4)
    up = np.array([[math.ldexp(v, -shift) for v in r] for r in upper], dtype=np.float64).reshape(len(upper), 4)
    out = []
    for h in range(lo, hi + 1):
        amin = math.floor(h * a_lo)
        amax = math.ceil(h * a_hi)
        if amax >= INDEX_LIMIT or amin <= -INDEX_LIMIT:
            out.extend(_kernels_py.slab_candidates(h, h, a_lo, a_hi, lower, upper, shift))
        else:
            _slab_level(h, amin, amax, lw, up, lower, upper, shift, out)
    return out


cdef inline double _row_bound(double hz, double au, double* err):
    # products and sum each round once; inputs carry one rounding from ldexp
    err[0] = 4e-16 * (fabs(hz) + fabs(au)) + 1e-300
    return hz + au


cdef void _slab_level(long h, long amin, long amax, double[:, :] lw, double[:, :] up,
                      lower, upper, int shift, list out):
    cdef long a, b, blo, bhi
    cdef double m, best, err, worst
    cdef Py_ssize_t r
    for a in range(amin, amax + 1):
        best = -1e300
        worst = 0.0
        for r in range(lw.shape[0]):
            m = _row_bound(h * lw[r, 1], a * lw[r, 3] if a >= 0 else a * lw[r, 2], &err)
            if err > worst:
                worst = err
            if -m > best:
                best = -m
        if worst < 0.25:
            blo = <long>floor(best - 2 * worst)
        else:
            blo = max((-(h * zh + (a * uh if a >= 0 else a * ul))) >> shift for zl, zh, ul, uh in lower)
        best = 1e300
        worst = 0.0
        for r in range(up.shape[0]):
            m = _row_bound(h * up[r, 0], a * up[r, 2] if a >= 0 else a * up[r, 3], &err)
            if err > worst:
                worst = err
            if -m < best:
                best = -m
        if worst < 0.25:
            bhi = <long>ceil(best + 2 * worst)
        else:
            bhi = min(-((h * zl + (a * ul if a >= 0 else a * uh)) >> shift) for zl, zh, ul, uh in upper)
        for b in range(blo, bhi + 1):
            out.append((h, a, b))


def pareto_filter(ly, order, dominated, double tol=1e-9):
    """Indices surviving a dominance sweep in ``order``; see the Python version."""
    cdef double[:, :] L = np.ascontiguousarray(ly, dtype=np.float64)
    cdef Py_ssize_t n = len(order)
    cdef double[:, :] kept_ly = np.empty((max(n, 1), 3))
    cdef long[:] kept_idx = np.empty(max(n, 1), dtype=np.int_)
    cdef Py_ssize_t m = 0, t
    cdef long i
    cdef double y0, y1, y2
    for i in order:
        y0 = L[i, 0] + tol
        y1 = L[i, 1] + tol
        y2 = L[i, 2] + tol
        cands = None
        for t in range(m):
            if kept_ly[t, 0] <= y0 and kept_ly[t, 1] <= y1 and kept_ly[t, 2] <= y2:
                if cands is None:
                    cands = []
                cands.append(kept_idx[t])
        if cands is not None and dominated(i, cands):
            continue
        kept_ly[m, 0] = L[i, 0]
        kept_ly[m, 1] = L[i, 1]
        kept_ly[m, 2] = L[i, 2]
        kept_idx[m] = i
        m += 1
    return [kept_idx[t] for t in range(m)]
