"""Small exact integer linear algebra: 3x3 operators, HNF/SNF, plane lattices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence, Union

from .exact import IntPoly

Vec3 = tuple  # (int, int, int)
Mat3 = tuple  # ((int,)*3,)*3, row-major

INFINITE = math.inf


def mat(rows: Iterable[Iterable[int]]) -> Mat3:
    m = tuple(tuple(int(x) for x in r) for r in rows)
    if len(m) != 3 or any(len(r) != 3 for r in m):
        raise ValueError("expected a 3x3 matrix")
    return m


def identity() -> Mat3:
    return ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def parse_matrix(text: str) -> Mat3:
    """Parse ``"a,b,c;d,e,f;g,h,i"``."""
    rows = [r for r in text.replace(" ", "").split(";") if r]
    return mat([int(x) for x in r.split(",")] for r in rows)


def format_matrix(m: Mat3) -> str:
    return ";".join(",".join(str(x) for x in r) for r in m)


def mat_mul(a: Mat3, b: Mat3) -> Mat3:
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)) for i in range(3)
    )


def mat_vec(a: Mat3, v: Sequence) -> Vec3:
    return tuple(a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2] for i in range(3))


def vec_mat(v: Sequence, a: Mat3) -> Vec3:
    return tuple(v[0] * a[0][j] + v[1] * a[1][j] + v[2] * a[2][j] for j in range(3))


def mat_add(a: Mat3, b: Mat3, scale=1) -> Mat3:
    return tuple(tuple(a[i][j] + scale * b[i][j] for j in range(3)) for i in range(3))


def mat_scale(a: Mat3, s) -> Mat3:
    return tuple(tuple(s * x for x in r) for r in a)


def transpose(a: Mat3) -> Mat3:
    return tuple(tuple(a[j][i] for j in range(3)) for i in range(3))


def det3(a: Sequence[Sequence]) -> int:
    return (
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    )


def adjugate(a: Mat3) -> Mat3:
    c = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            r = [x for x in range(3) if x != i]
            s = [y for y in range(3) if y != j]
            minor = a[r[0]][s[0]] * a[r[1]][s[1]] - a[r[0]][s[1]] * a[r[1]][s[0]]
            c[j][i] = (-1) ** (i + j) * minor
    return tuple(tuple(r) for r in c)


def mat_inv(a: Mat3) -> Mat3:
    """Exact inverse; integer entries when ``a`` is unimodular, Fractions otherwise."""
    d = det3(a)
    if d == 0:
        raise ZeroDivisionError("singular matrix")
    adj = adjugate(a)
    if d in (1, -1):
        return tuple(tuple(d * x for x in r) for r in adj)
    return tuple(tuple(Fraction(x, d) for x in r) for r in adj)


def mat_pow(a: Mat3, k: int) -> Mat3:
    if k < 0:
        a, k = mat_inv(a), -k
    out = identity()
    base = a
    while k:
        if k & 1:
            out = mat_mul(out, base)
        base = mat_mul(base, base)
        k >>= 1
    return out


def is_integral(a: Mat3) -> bool:
    return all(isinstance(x, int) or x.denominator == 1 for r in a for x in r)


def to_int(a: Mat3) -> Mat3:
    return tuple(tuple(int(x) for x in r) for r in a)


def l1_norm(a: Mat3) -> int:
    return sum(abs(x) for r in a for x in r)


def cross(u: Sequence, v: Sequence) -> Vec3:
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> Vec3:
    return tuple(a - b for a, b in zip(u, v))


def add(u: Sequence, v: Sequence) -> Vec3:
    return tuple(a + b for a, b in zip(u, v))


def char_poly(a: Mat3) -> IntPoly:
    """det(xI - A) as a monic cubic."""
    tr = a[0][0] + a[1][1] + a[2][2]
    m2 = (
        a[0][0] * a[1][1] - a[0][1] * a[1][0]
        + a[0][0] * a[2][2] - a[0][2] * a[2][0]
        + a[1][1] * a[2][2] - a[1][2] * a[2][1]
    )
    return IntPoly.from_high(1, -tr, m2, -det3(a))


def content(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def primitive(v: Sequence[int]) -> Vec3:
    g = content(v)
    if g == 0:
        raise ValueError("zero vector has no primitive direction")
    return tuple(x // g for x in v)


# -- Hermite and Smith normal forms -------------------------------------------


def hermite_normal_form(m: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Row Hermite normal form.

    Returns ``(H, U)`` with ``U`` unimodular and ``U @ M == H``.  Pivots are
    positive and entries above a pivot lie in ``[0, pivot)``; zero rows sit at
    the bottom.
    """
    h = [[int(x) for x in r] for r in m]
    nrows = len(h)
    ncols = len(h[0]) if nrows else 0
    u = [[int(i == j) for j in range(nrows)] for i in range(nrows)]

    def swap(i, j):
        h[i], h[j] = h[j], h[i]
        u[i], u[j] = u[j], u[i]

    def addrow(dst, src, f):
        if f:
            hd, hs = h[dst], h[src]
            for k in range(ncols):
                hd[k] -= f * hs[k]
            ud, us = u[dst], u[src]
            for k in range(nrows):
                ud[k] -= f * us[k]

    row = 0
    for col in range(ncols):
        if row >= nrows:
            break
        while True:
            nz = [i for i in range(row, nrows) if h[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(h[i][col]))
            swap(row, piv)
            done = True
            for i in range(row + 1, nrows):
                if h[i][col]:
                    addrow(i, row, h[i][col] // h[row][col])
                    if h[i][col]:
                        done = False
            if done:
                break
        if all(h[i][col] == 0 for i in range(row, nrows)):
            continue
        if h[row][col] < 0:
            h[row] = [-x for x in h[row]]
            u[row] = [-x for x in u[row]]
        p = h[row][col]
        for i in range(row):
            addrow(i, row, h[i][col] // p)
        row += 1
    return h, u


def smith_diagonal(m: Sequence[Sequence[int]]) -> list[int]:
    """Invariant factors (nonzero Smith diagonal) of an integer matrix."""
    a = [[int(x) for x in r] for r in m]
    if not a or not a[0]:
        return []
    nr, nc = len(a), len(a[0])
    out = []
    t = 0
    while t < min(nr, nc):
        nz = [(abs(a[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if a[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        clean = False
        while not clean:
            clean = True
            for i in range(t + 1, nr):
                if a[i][t]:
                    f = a[i][t] // a[t][t]
                    a[i] = [x - f * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, nc):
                if a[t][j]:
                    f = a[t][j] // a[t][t]
                    for r in a:
                        r[j] -= f * r[t]
                    if a[t][j]:
                        clean = False
            if not clean:
                nz = [(abs(a[i][t]), i, t) for i in range(t, nr) if a[i][t]]
                nz += [(abs(a[t][j]), t, j) for j in range(t, nc) if a[t][j]]
                _, i, j = min(nz)
                a[t], a[i] = a[i], a[t]
                for r in a:
                    r[t], r[j] = r[j], r[t]
                continue
            # divisibility condition on the remaining block
            bad = [
                (i, j)
                for i in range(t + 1, nr)
                for j in range(t + 1, nc)
                if a[i][j] % a[t][t]
            ]
            if bad:
                i, _ = bad[0]
                a[t] = [x + y for x, y in zip(a[t], a[i])]
                clean = False
        out.append(abs(a[t][t]))
        t += 1
    return out


def rank(m: Sequence[Sequence[int]]) -> int:
    h, _ = hermite_normal_form(m)
    return sum(1 for r in h if any(r))


def integer_kernel(m: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis of {y in Z^n : M y = 0} for an r x n matrix M."""
    mt = [list(col) for col in zip(*m)]
    h, u = hermite_normal_form(mt)
    return [u[i] for i in range(len(h)) if not any(h[i])]


def saturate(vectors: Sequence[Sequence[int]]) -> list[list[int]]:
    """HNF basis of (Q-span of vectors) intersected with Z^n."""
    vectors = [list(v) for v in vectors]
    n = len(vectors[0])
    k = integer_kernel(vectors)
    if not k:
        basis = [[int(i == j) for j in range(n)] for i in range(n)]
    else:
        basis = integer_kernel(k)
    h, _ = hermite_normal_form(basis)
    return [r for r in h if any(r)]


def solve_rational(cols: Sequence[Sequence], target: Sequence) -> Optional[list[Fraction]]:
    """Solve sum_i x_i * cols[i] = target over Q; None when inconsistent."""
    k = len(cols)
    n = len(target)
    aug = [[Fraction(cols[j][i]) for j in range(k)] + [Fraction(target[i])] for i in range(n)]
    piv_cols = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, n) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(n):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
    if any(aug[i][k] != 0 for i in range(r, n)):
        return None
    if len(piv_cols) < k:
        return None
    x = [Fraction(0)] * k
    for i, c in enumerate(piv_cols):
        x[c] = aug[i][k]
    return x


# -- affine lattices -------------------------------------------------------------


@dataclass(frozen=True)
class AffineLattice:
    """Integer affine subspace: ``anchor`` plus the saturated lattice spanned by ``basis``."""

    anchor: tuple
    basis: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def ambient_dim(self) -> int:
        return len(self.anchor)

    def coords(self, point: Sequence[int]) -> tuple:
        d = sub(point, self.anchor)
        if not self.basis:
            if any(d):
                raise ValueError("point not on the lattice")
            return ()
        x = solve_rational(self.basis, d)
        if x is None or any(c.denominator != 1 for c in x):
            raise ValueError("point not on the lattice")
        return tuple(int(c) for c in x)

    def contains(self, point: Sequence[int]) -> bool:
        try:
            self.coords(point)
        except ValueError:
            return False
        return True


class PlaneLattice(AffineLattice):
    """Two-dimensional affine lattice of all integer points of a plane in Z^3."""

    @property
    def normal(self) -> Vec3:
        return primitive(cross(self.basis[0], self.basis[1]))

    def coords(self, point: Sequence[int]) -> tuple:
        d = sub(point, self.anchor)
        u, w = self.basis
        n = cross(u, w)
        nn = dot(n, n)
        a = dot(cross(d, w), n)
        b = dot(cross(u, d), n)
        if a % nn or b % nn:
            raise ValueError("point not on the plane lattice")
        return (a // nn, b // nn)


def affine_lattice(anchor: Sequence[int], directions: Sequence[Sequence[int]]) -> AffineLattice:
    """Affine lattice through ``anchor`` whose direction lattice saturates ``directions``."""
    dirs = [list(v) for v in directions if any(v)]
    basis = tuple(tuple(v) for v in saturate(dirs)) if dirs else ()
    return AffineLattice(tuple(anchor), basis)


def _reduce2(u: list, w: list) -> tuple[list, list]:
    # Lagrange-Gauss reduction with exact integer arithmetic
    while True:
        if dot(w, w) < dot(u, u):
            u, w = w, u
        uu = dot(u, u)
        t = Fraction(dot(u, w), uu)
        k = math.floor(t + Fraction(1, 2))
        if k == 0:
            return u, w
        w = [b - k * a for a, b in zip(u, w)]


def plane_lattice_basis(p0: Sequence[int], p1: Sequence[int], p2: Sequence[int]) -> PlaneLattice:
    """Anchor and basis generating every integer point of the plane through three points."""
    d1, d2 = sub(p1, p0), sub(p2, p0)
    n = cross(d1, d2)
    if not any(n):
        raise ValueError("points are collinear")
    k = integer_kernel([primitive(n)])
    u, w = _reduce2(list(k[0]), list(k[1]))
    if dot(cross(u, w), n) < 0:
        w = [-x for x in w]
    return PlaneLattice(tuple(p0), (tuple(u), tuple(w)))


def sublattice_index(
    generators: Sequence[Sequence[int]],
    ambient: Union[None, AffineLattice, Sequence[Sequence[int]]] = None,
) -> Union[int, float]:
    """Index of the lattice spanned by ``generators`` inside ``ambient``.

    ``ambient`` is ``None`` (all of Z^n), an :class:`AffineLattice` (generators
    are direction vectors of it) or an explicit basis.  Returns ``INFINITE``
    when the ranks differ.
    """
    gens = [list(g) for g in generators]
    if ambient is None:
        n = len(gens[0]) if gens else 0
        coords = gens
    else:
        basis = ambient.basis if isinstance(ambient, AffineLattice) else [list(b) for b in ambient]
        n = len(basis)
        coords = []
        for g in gens:
            if isinstance(ambient, PlaneLattice):
                c = ambient.coords(add(ambient.anchor, g))
            else:
                x = solve_rational(basis, g)
                if x is None or any(v.denominator != 1 for v in x):
                    raise ValueError("generator not in the ambient lattice")
                c = [int(v) for v in x]
            coords.append(list(c))
    if n == 0:
        return 1
    if not coords:
        return INFINITE
    d = smith_diagonal(coords)
    if len(d) < n:
        return INFINITE
    out = 1
    for x in d:
        out *= x
    return out


def unimodular_completion(n: Sequence[int]) -> tuple[Vec3, Vec3, Vec3]:
    """Integer vectors ``(z, u, w)`` with ``n.z = 1``, ``n.u = n.w = 0``, det = +-1.

    ``n`` must be primitive.
    """
    h, u = hermite_normal_form([[x] for x in n])
    if h[0][0] != 1:
        raise ValueError("normal vector is not primitive")
    # first row of U pairs with n to give 1, the others annihilate it
    z, a, b = (tuple(r) for r in u)
    a2, b2 = _reduce2(list(a), list(b))
    return z, tuple(a2), tuple(b2)
