"""Positive unit group of the commutant order of a hyperbolic operator.

The integer operators commuting with ``A`` form the order
``L = Q[A] ∩ M_3(Z)``.  Its determinant-one elements with positive spectrum
form a free abelian group of rank two; this module finds generators for it.
Real logarithms only steer the search: every group-theoretic claim that
reaches the caller (membership, relations, roots) is verified with exact
integer matrix arithmetic.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Optional, Sequence

import mpmath
import numpy as np

from .exact import refine
from .linalg import (
    Mat3,
    det3,
    hermite_normal_form,
    identity,
    is_integral,
    mat_add,
    mat_inv,
    mat_mul,
    mat_pow,
    mat_scale,
    mat_vec,
    saturate,
    smith_diagonal,
    solve_rational,
    to_int,
)
from .spectral import EigenData, NotHyperbolic, eigen_structure

log = logging.getLogger(__name__)

DEFAULT_HEIGHT = 20
MAX_DOUBLINGS = 3
SATURATION_PRIMES = (2, 3, 5)


class RankDeficient(RuntimeError):
    """Fewer than two multiplicatively independent units were found."""


def _flat(m: Mat3) -> list[int]:
    return [x for r in m for x in r]


def _unflat(v: Sequence[int]) -> Mat3:
    return (tuple(v[0:3]), tuple(v[3:6]), tuple(v[6:9]))


def commutes(a: Mat3, b: Mat3) -> bool:
    return mat_mul(a, b) == mat_mul(b, a)


def power_coords(a: Mat3, x: Mat3) -> Optional[tuple]:
    """Rationals (p, q, r) with ``x == p I + q A + r A^2``, or None if ``x`` is not in Q[A]."""
    a2 = mat_mul(a, a)
    cols = [_flat(identity()), _flat(a), _flat(a2)]
    sol = solve_rational(cols, _flat(x))
    return None if sol is None else tuple(sol)


def from_power_coords(a: Mat3, c: Sequence) -> Mat3:
    a2 = mat_mul(a, a)
    out = mat_scale(identity(), c[0])
    out = mat_add(out, a, c[1])
    return mat_add(out, a2, c[2])


@dataclass(frozen=True)
class CommutantOrder:
    """Basis of the lattice of integer matrices commuting with ``A``."""

    matrix: Mat3
    basis: tuple  # three Mat3
    coords: tuple  # power-basis coordinates of each basis element
    index: int  # [L : Z[A]]

    def element(self, x: Sequence[int]) -> Mat3:
        out = mat_scale(identity(), 0)
        for xi, b in zip(x, self.basis):
            out = mat_add(out, b, xi)
        return out

    def coordinates(self, m: Mat3) -> Optional[tuple]:
        sol = solve_rational([_flat(b) for b in self.basis], _flat(m))
        if sol is None or any(s.denominator != 1 for s in sol):
            return None
        return tuple(int(s) for s in sol)

    def key(self) -> tuple:
        """Hashable canonical description (the HNF basis), equal iff same Q[A]."""
        return tuple(tuple(r) for r in saturate([_flat(b) for b in self.basis]))


def _trace(m: Mat3) -> int:
    return m[0][0] + m[1][1] + m[2][2]


def _trace_reduce(mats: list) -> tuple:
    """LLL-reduce a basis of Q[A] ∩ M_3(Z) for the form tr(X^2).

    With a real spectrum tr(X^2) is the sum of squared eigenvalues, so the
    form is positive definite and invariant under conjugating ``A``.  The
    reduced basis keeps small units at small coordinates whatever the
    entries of ``A`` look like.
    """
    b = [m for m in mats]
    n = len(b)

    def ip(x, y):
        return _trace(mat_mul(x, y))

    def gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        norms = []
        for i in range(n):
            norms_i = Fraction(ip(b[i], b[i]))
            for j in range(i):
                # <b_i, b*_j> / |b*_j|^2, with b*_j expanded through mu
                dot = Fraction(ip(b[i], b[j])) - sum(mu[j][k] * mu[i][k] * norms[k] for k in range(j))
                mu[i][j] = dot / norms[j]
                norms_i -= mu[i][j] ** 2 * norms[j]
            norms.append(norms_i)
        return mu, norms

    k = 1
    while k < n:
        mu, norms = gso()
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = mat_add(b[k], b[j], -q)
                mu, norms = gso()
        if norms[k] >= (Fraction(3, 4) - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            k = max(k - 1, 1)
    return tuple(b)


def commutant_order(a: Mat3) -> CommutantOrder:
    eigen_structure(a)  # raises NotHyperbolic
    a2 = mat_mul(a, a)
    gens = [_flat(identity()), _flat(a), _flat(a2)]
    basis = saturate(gens)
    if len(basis) != 3:  # pragma: no cover - irreducible char poly forces rank 3
        raise NotHyperbolic("Q[A] does not have dimension 3")
    mats = _trace_reduce([_unflat(b) for b in basis])
    coords = tuple(power_coords(a, m) for m in mats)
    # index of Z[A] in L from the coordinates of I, A, A^2 on the L basis
    rel = []
    for g in gens:
        sol = solve_rational(basis, g)
        rel.append([int(s) for s in sol])
    idx = 1
    for d in smith_diagonal(rel):
        idx *= d
    return CommutantOrder(a, mats, coords, idx)


# -- eigenvalues of elements of Q[A] ----------------------------------------------


@lru_cache(maxsize=256)
def _mp_roots(e: EigenData, dps: int) -> tuple:
    bits = int(dps * 3.33) + 16
    out = []
    for r in e.roots:
        rr = refine(r, Fraction(1, 2**bits))
        m = rr.midpoint()
        out.append(mpmath.mpf(m.numerator) / m.denominator)
    return tuple(out)


def eigenvalues(e: EigenData, x: Mat3, dps: int = 50) -> tuple:
    """High-precision eigenvalues of ``x`` (an element of Q[A]) in root order."""
    c = power_coords(e.matrix, x)
    if c is None:
        raise ValueError("matrix does not commute with the operator")
    with mpmath.workdps(dps):
        lam = _mp_roots(e, dps)
        return tuple(
            mpmath.mpf(c[0].numerator) / c[0].denominator
            + mpmath.mpf(c[1].numerator) / c[1].denominator * l
            + mpmath.mpf(c[2].numerator) / c[2].denominator * l * l
            for l in lam
        )


def log_vector(e: EigenData, x: Mat3) -> tuple:
    with mpmath.workdps(50):
        return tuple(float(mpmath.log(abs(v))) for v in eigenvalues(e, x))


def has_positive_spectrum(x: Mat3) -> bool:
    """All eigenvalues positive, for ``x`` known to have a real spectrum.

    With three real roots, x^3 - t x^2 + m x - d has only positive roots iff
    t, m and d are all positive (Descartes).
    """
    tr = x[0][0] + x[1][1] + x[2][2]
    m2 = (
        x[0][0] * x[1][1] - x[0][1] * x[1][0]
        + x[0][0] * x[2][2] - x[0][2] * x[2][0]
        + x[1][1] * x[2][2] - x[1][2] * x[2][1]
    )
    return tr > 0 and m2 > 0 and det3(x) > 0


def is_positive_unit(a: Mat3, x: Mat3) -> bool:
    return (
        is_integral(x)
        and det3(x) == 1
        and commutes(a, x)
        and has_positive_spectrum(x)
    )


# -- enumeration ------------------------------------------------------------------


def _det_form(basis: Sequence[Mat3]) -> dict:
    """det(x1 B1 + x2 B2 + x3 B3) as a cubic form {exponents: coefficient}."""
    lin = [[tuple(b[r][c] for b in basis) for c in range(3)] for r in range(3)]
    total: dict = {}
    for perm, sgn in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                      ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1)):
        term = {(0, 0, 0): sgn}
        for r in range(3):
            lf = lin[r][perm[r]]
            nxt: dict = {}
            for mono, c in term.items():
                for k in range(3):
                    if lf[k]:
                        m = list(mono)
                        m[k] += 1
                        nxt[tuple(m)] = nxt.get(tuple(m), 0) + c * lf[k]
            term = nxt
        for m, c in term.items():
            total[m] = total.get(m, 0) + c
    return {m: c for m, c in total.items() if c}


def enumerate_units(order: CommutantOrder, height: int) -> list[Mat3]:
    """All positive units ``sum x_i B_i`` of the order with ``|x_i| <= height``."""
    if height < 1:
        raise ValueError("height must be >= 1")
    form = _det_form(order.basis)
    rng = np.arange(-height, height + 1, dtype=np.int64)
    maxc = max(abs(c) for c in form.values())
    use_object = maxc * 10 * height**3 >= 2**62
    x1, x2, x3 = np.meshgrid(rng, rng, rng, indexing="ij")
    if use_object:
        x1, x2, x3 = (v.astype(object) for v in (x1, x2, x3))
    det = np.zeros(x1.shape, dtype=object if use_object else np.int64)
    for (i, j, k), c in form.items():
        det = det + c * x1**i * x2**j * x3**k
    hits = np.argwhere(det == 1)
    out = []
    for h in hits:
        x = tuple(int(rng[t]) for t in h)
        m = order.element(x)
        if has_positive_spectrum(m):
            out.append(m)
    out.sort(key=lambda m: (sum(abs(v) for r in m for v in r), m))
    return out


# -- generators -------------------------------------------------------------------


@dataclass(frozen=True)
class UnitPair:
    u: Mat3
    v: Mat3
    log_u: tuple
    log_v: tuple
    saturation: dict = field(default_factory=dict, compare=False, hash=False)
    status: str = "heuristic-certified"

    def element(self, a: int, b: int) -> Mat3:
        return mat_mul(mat_pow(self.u, a), mat_pow(self.v, b))

    def regulator(self) -> float:
        """Area of the log-lattice cell (first two log coordinates)."""
        return abs(self.log_u[0] * self.log_v[1] - self.log_u[1] * self.log_v[0])


def _plane2(lv: Sequence[float]) -> np.ndarray:
    # coordinates in an orthonormal basis of the sum-zero plane
    b1 = np.array([1.0, -1.0, 0.0]) / math.sqrt(2)
    b2 = np.array([1.0, 1.0, -2.0]) / math.sqrt(6)
    v = np.array(lv)
    return np.array([v @ b1, v @ b2])


def _reduce_pair(e, u, v):
    lu, lv = _plane2(log_vector(e, u)), _plane2(log_vector(e, v))
    for _ in range(200):
        if lv @ lv < lu @ lu:
            u, v, lu, lv = v, u, lv, lu
        k = round(float(lu @ lv / (lu @ lu)))
        if k == 0:
            break
        v = mat_mul(v, mat_pow(u, -k))
        lv = lv - k * lu
    return u, v


def _coords_in(lu, lv, lw) -> tuple[float, float]:
    m = np.array([lu, lv]).T
    return tuple(np.linalg.solve(m, lw))


def _adjoin(e, u, v, w):
    """Basis of the group generated by u, v and w (w possibly outside <u, v>)."""
    lu, lv, lw = (_plane2(log_vector(e, x)) for x in (u, v, w))
    alpha, beta = _coords_in(lu, lv, lw)
    a, b = round(alpha), round(beta)
    if abs(alpha - a) < 1e-6 and abs(beta - b) < 1e-6:
        if mat_mul(mat_pow(u, a), mat_pow(v, b)) == w:
            return u, v, False
    fa = Fraction(alpha).limit_denominator(64)
    fb = Fraction(beta).limit_denominator(64)
    d = fa.denominator * fb.denominator // math.gcd(fa.denominator, fb.denominator)
    p, q = int(fa * d), int(fb * d)
    if mat_pow(w, d) != mat_mul(mat_pow(u, p), mat_pow(v, q)):
        raise ArithmeticError("could not find an exact multiplicative relation")
    h, t = hermite_normal_form([[d, 0], [0, d], [p, q]])
    gens = (u, v, w)
    new = []
    for row in t[:2]:
        m = identity()
        for g, k in zip(gens, row):
            m = mat_mul(m, mat_pow(g, k))
        new.append(m)
    return new[0], new[1], True


def kth_root_in_order(e: EigenData, order: CommutantOrder, u: Mat3, k: int) -> Optional[Mat3]:
    """The positive k-th root of the unit ``u`` inside the order, if it exists."""
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return u
    dps = 60
    with mpmath.workdps(dps):
        mu = eigenvalues(e, u, dps)
        if any(m <= 0 for m in mu):
            return None
        nu = [mpmath.root(m, k) for m in mu]
        lam = _mp_roots(e, dps)
        rows = []
        for l in lam:
            rows.append([
                sum(mpmath.mpf(c.numerator) / c.denominator * l**j for j, c in enumerate(bc))
                for bc in order.coords
            ])
        sol = mpmath.lu_solve(mpmath.matrix(rows), mpmath.matrix(nu))
        x = [int(mpmath.nint(s)) for s in sol]
        if any(abs(s - xi) > mpmath.mpf(10) ** -20 for s, xi in zip(sol, x)):
            return None
    cand = order.element(x)
    # a square root with a sign-twisted spectrum can also square to u
    if has_positive_spectrum(cand) and mat_pow(cand, k) == u:
        return cand
    return None


def _p1_classes(u: Mat3, v: Mat3, k: int) -> list[Mat3]:
    """Representatives of the nontrivial cyclic subgroups of G/G^k for prime k."""
    out = [u]
    for i in range(k):
        out.append(mat_mul(mat_pow(u, i), v))
    return out


def generator_pair(e: EigenData, order: CommutantOrder, units: Sequence[Mat3]) -> UnitPair:
    """Reduced basis of the group generated by ``units``, saturated at 2, 3, 5."""
    pool = [m for m in units if m != identity()]
    if len(pool) < 2:
        raise RankDeficient("need at least two units")
    logs = [_plane2(log_vector(e, m)) for m in pool]
    order_idx = sorted(range(len(pool)), key=lambda i: (float(logs[i] @ logs[i]), pool[i]))
    u = None
    v = None
    for i in order_idx:
        if logs[i] @ logs[i] < 1e-18:
            continue
        if u is None:
            u, lu = pool[i], logs[i]
            continue
        lw = logs[i]
        if abs(lu[0] * lw[1] - lu[1] * lw[0]) > 1e-9 * math.sqrt((lu @ lu) * (lw @ lw)):
            v = pool[i]
            break
    if u is None or v is None:
        raise RankDeficient("units span a group of rank < 2")
    for i in order_idx:
        u, v, _ = _adjoin(e, u, v, pool[i])
    u, v = _reduce_pair(e, u, v)

    saturation = {}
    changed = True
    while changed:
        changed = False
        for k in SATURATION_PRIMES:
            for w in _p1_classes(u, v, k):
                r = kth_root_in_order(e, order, w, k)
                if r is not None:
                    log.info("adjoining a %d-th root", k)
                    u, v, _ = _adjoin(e, u, v, r)
                    u, v = _reduce_pair(e, u, v)
                    changed = True
                    break
            if changed:
                break
            saturation[k] = "no root"
    return UnitPair(u, v, log_vector(e, u), log_vector(e, v), saturation)


def unit_group(a: Mat3, height: int = DEFAULT_HEIGHT) -> tuple[CommutantOrder, UnitPair]:
    """Commutant order and a saturated generator pair, doubling the search box as needed."""
    e = eigen_structure(a)
    return _unit_group_cached(e, height)


@lru_cache(maxsize=512)
def _unit_group_cached(e: EigenData, height: int):
    order = commutant_order(e.matrix)
    h = height
    for attempt in range(MAX_DOUBLINGS + 1):
        units = enumerate_units(order, h)
        try:
            return order, generator_pair(e, order, units)
        except RankDeficient:
            if attempt == MAX_DOUBLINGS:
                raise
            h *= 2
            log.info("unit search: raising height to %d", h)
    raise RankDeficient("unreachable")  # pragma: no cover


def group_coordinates(e: EigenData, pair: UnitPair, w: Mat3) -> Optional[tuple[int, int]]:
    """Exponents (a, b) with ``w == U^a V^b``, verified exactly; None if w is not in the group."""
    lu, lv, lw = (_plane2(x) for x in (pair.log_u, pair.log_v, log_vector(e, w)))
    alpha, beta = _coords_in(lu, lv, lw)
    a, b = round(alpha), round(beta)
    for da, db in product((0, -1, 1), repeat=2):
        if pair.element(a + da, b + db) == w:
            return a + da, b + db
    return None


def unit_mapping(a: Mat3, v: Sequence[int], w: Sequence[int], kinv: Optional[Mat3] = None):
    """The positive unit g in Q[A] with g v = w, or None when no such integral unit exists.

    ``v`` is cyclic for ``A`` (true for every nonzero vector when the
    characteristic polynomial is irreducible), so g is unique in Q[A].
    ``v`` and ``w`` must lie in the same open orthant; positivity of the
    spectrum then follows automatically.
    """
    if kinv is None:
        kinv = krylov_inverse(a, v)
    # power-basis coordinates may be fractional when [L : Z[A]] > 1
    g = from_power_coords(a, mat_vec(kinv, w))
    if not is_integral(g):
        return None
    g = to_int(g)
    if det3(g) != 1:
        return None
    return g


def krylov_inverse(a: Mat3, v: Sequence[int]) -> Mat3:
    av = mat_vec(a, v)
    a2v = mat_vec(a, av)
    k = tuple(tuple(col[i] for col in (v, av, a2v)) for i in range(3))
    return mat_inv(k)
