"""Eigen-structure of a hyperbolic operator and exact sign evaluation.

The three invariant planes of ``A`` are represented by eigen-covectors
``w(t) = row 0 of adj(tI - A)`` evaluated at the three real roots.  A covector
entry is an integer polynomial of degree <= 2 in the root, so every sign
question reduces to the sign of an integer polynomial at an isolated root.

Signs are first decided with dyadic interval bounds (pure integer
arithmetic).  When an interval straddles zero the precision is doubled; the
final fallback is :func:`kleinsail.exact.sign_at_root`.  A nonzero integer
vector can never lie on an eigenplane of an operator with irreducible
characteristic polynomial, so the refinement always terminates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .exact import (
    IntPoly,
    RootInterval,
    discriminant_cubic,
    is_irreducible_cubic,
    isolate_real_roots,
    refine,
    sign_at_root,
)
from .linalg import Mat3, Vec3, char_poly, content, det3

_BASE_BITS = 64
_MAX_FAST_BITS = 1024


class NotHyperbolic(ValueError):
    """Characteristic polynomial is reducible or has complex roots."""


def _poly_mat_adj_row0(a: Mat3) -> tuple[IntPoly, IntPoly, IntPoly]:
    """Row 0 of adj(tI - A) as integer polynomials in t."""
    (a00, a01, a02), (a10, a11, a12), (a20, a21, a22) = a
    # cofactors C_{j,0} transposed: adj[0][j] = cofactor(j, 0) of (tI - A)
    r0 = IntPoly((a11 * a22 - a12 * a21, -(a11 + a22), 1))
    r1 = IntPoly((a02 * a21 - a01 * a22, a01))
    r2 = IntPoly((a01 * a12 - a02 * a11, a02))
    return r0, r1, r2


def _poly_mat_adj_col0(a: Mat3) -> tuple[IntPoly, IntPoly, IntPoly]:
    """Column 0 of adj(tI - A) as integer polynomials in t."""
    at = tuple(tuple(a[j][i] for j in range(3)) for i in range(3))
    return _poly_mat_adj_row0(at)


@dataclass(frozen=True)
class Orthant:
    signs: tuple

    def __neg__(self) -> "Orthant":
        return Orthant(tuple(-s for s in self.signs))

    def __str__(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)

    @classmethod
    def parse(cls, text: str) -> "Orthant":
        if len(text) != 3 or any(c not in "+-" for c in text):
            raise ValueError(f"bad orthant {text!r}")
        return cls(tuple(1 if c == "+" else -1 for c in text))

    @classmethod
    def all(cls) -> list["Orthant"]:
        out = []
        for a in (1, -1):
            for b in (1, -1):
                for c in (1, -1):
                    out.append(cls((a, b, c)))
        return out

    @classmethod
    def representatives(cls) -> list["Orthant"]:
        """One orthant from each pair {s, -s}."""
        return [o for o in cls.all() if o.signs[0] > 0]


@dataclass(frozen=True, eq=False)
class EigenData:
    """Exact eigen-structure of a hyperbolic 3x3 integer operator.

    ``covector[k]`` and ``vector[k]`` are integer polynomials; evaluated at
    root ``i`` they give the k-th coordinate of the left (resp. right)
    eigenvector for that root.
    """

    matrix: Mat3
    poly: IntPoly
    roots: tuple
    covector: tuple
    vector: tuple

    # everything else is determined by the matrix; keeps cache lookups cheap
    def __eq__(self, other: object) -> bool:
        return isinstance(other, EigenData) and other.matrix == self.matrix

    def __hash__(self) -> int:
        return hash(self.matrix)

    def covector_at(self, i: int, v: Sequence[int]) -> tuple:
        """Integer polynomial q with q(root_i) = l_i(v) (same q for every root)."""
        acc = [0, 0, 0]
        for k in range(3):
            c = self.covector[k].coeffs
            for j, a in enumerate(c):
                acc[j] += a * v[k]
        return tuple(acc)

    def sign_of_form(self, i: int, v: Sequence[int]) -> int:
        return sign_of_form(self, i, v)

    def orthant_of(self, v: Sequence[int]) -> Orthant:
        return orthant_of(self, v)

    def float_roots(self) -> tuple:
        return tuple(float(refine(r, Fraction(1, 2**60)).midpoint()) for r in self.roots)


def eigen_structure(a: Mat3) -> EigenData:
    p = char_poly(a)
    if not is_irreducible_cubic(p):
        raise NotHyperbolic(f"characteristic polynomial {p} is reducible over Q")
    if discriminant_cubic(p) <= 0:
        raise NotHyperbolic(f"characteristic polynomial {p} has complex roots")
    roots = tuple(isolate_real_roots(p))
    if len(roots) != 3:  # pragma: no cover - excluded by the discriminant test
        raise NotHyperbolic("expected three real roots")
    return EigenData(a, p, roots, _poly_mat_adj_row0(a), _poly_mat_adj_col0(a))


# -- dyadic interval machinery ---------------------------------------------------


def _floor_shift(x: int, s: int) -> int:
    return x >> s


def _ceil_shift(x: int, s: int) -> int:
    return -((-x) >> s)


def _poly_interval(c: Sequence[int], lo: int, hi: int, bits: int) -> tuple[int, int]:
    """Bounds (scaled by 2**bits) of an integer polynomial over [lo, hi] / 2**bits."""
    # Horner over scaled intervals, rounding outward at each step
    rlo = rhi = 0
    first = True
    for a in reversed(c):
        if first:
            rlo = rhi = a << bits
            first = False
            continue
        prods = (rlo * lo, rlo * hi, rhi * lo, rhi * hi)
        plo, phi = min(prods), max(prods)
        rlo = _floor_shift(plo, bits) + (a << bits)
        rhi = _ceil_shift(phi, bits) + (a << bits)
    if first:
        return 0, 0
    return rlo, rhi


@dataclass(frozen=True)
class _Approx:
    bits: int
    roots: tuple  # ((lo, hi), ...) scaled
    cov: tuple  # cov[i][k] = (lo, hi) for covector coordinate k at root i
    vec: tuple  # vec[i][k] for right eigenvector coordinate k at root i


@lru_cache(maxsize=4096)
def _approx(e: EigenData, bits: int) -> _Approx:
    width = Fraction(1, 2 ** (bits + 2))
    roots = []
    cov = []
    vec = []
    for r in e.roots:
        rr = refine(r, width)
        lo = (rr.lo.numerator << bits) // rr.lo.denominator
        hi = -((-(rr.hi.numerator << bits)) // rr.hi.denominator)
        roots.append((lo, hi))
        cov.append(tuple(_poly_interval(q.coeffs, lo, hi, bits) for q in e.covector))
        vec.append(tuple(_poly_interval(q.coeffs, lo, hi, bits) for q in e.vector))
    return _Approx(bits, tuple(roots), tuple(cov), tuple(vec))


def _dot_interval(iv: Sequence[tuple[int, int]], v: Sequence[int]) -> tuple[int, int]:
    lo = hi = 0
    for (a, b), x in zip(iv, v):
        if x >= 0:
            lo += a * x
            hi += b * x
        else:
            lo += b * x
            hi += a * x
    return lo, hi


def sign_of_form(e: EigenData, i: int, v: Sequence[int]) -> int:
    """Exact sign of the i-th eigen linear form at the nonzero integer vector v."""
    if not any(v):
        raise ValueError("zero vector")
    bits = _BASE_BITS
    while bits <= _MAX_FAST_BITS:
        lo, hi = _dot_interval(_approx(e, bits).cov[i], v)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        bits *= 2
    s = sign_at_root(e.covector_at(i, v), e.roots[i])
    if s == 0:  # pragma: no cover - impossible for irreducible char poly
        raise ArithmeticError("integer vector on an eigenplane")
    return s


def sign_on_vector(e: EigenData, i: int, n: Sequence[int]) -> int:
    """Exact sign of the integer covector ``n`` applied to the i-th right eigenvector."""
    if not any(n):
        raise ValueError("zero covector")
    bits = _BASE_BITS
    while bits <= _MAX_FAST_BITS:
        lo, hi = _dot_interval(_approx(e, bits).vec[i], n)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        bits *= 2
    q = [0, 0, 0]
    for k in range(3):
        for j, a in enumerate(e.vector[k].coeffs):
            q[j] += a * n[k]
    s = sign_at_root(q, e.roots[i])
    if s == 0:  # pragma: no cover
        raise ArithmeticError("integer covector vanishes on an eigenvector")
    return s


def orthant_of(e: EigenData, v: Sequence[int]) -> Orthant:
    return Orthant(tuple(sign_of_form(e, i, v) for i in range(3)))


def in_orthant(e: EigenData, orthant: Orthant, v: Sequence[int]) -> bool:
    if not any(v):
        return False
    for i, s in enumerate(orthant.signs):
        if sign_of_form(e, i, v) != s:
            return False
    return True


def edge_signs(e: EigenData, orthant: Orthant) -> tuple:
    """Signs sigma_i making ``sigma_i * e_i`` the edge rays of the orthant's closure.

    ``l_i(e_i)`` is a nonzero field element; the edge ray of the cone along
    eigenvector ``e_i`` points where ``s_i * l_i > 0``.
    """
    q = _mul_mod(e.covector, e.vector, e.poly)  # l(t) . v(t) as a polynomial in t
    return tuple(s * sign_at_root_cached(e, i, q) for i, s in enumerate(orthant.signs))


@lru_cache(maxsize=4096)
def sign_at_root_cached(e: EigenData, i: int, q: tuple) -> int:
    return sign_at_root(q, e.roots[i])


def _mul_mod(a: Sequence[IntPoly], b: Sequence[IntPoly], p: IntPoly) -> tuple:
    acc = {}
    for x, y in zip(a, b):
        for i, u in enumerate(x.coeffs):
            for j, w in enumerate(y.coeffs):
                acc[i + j] = acc.get(i + j, 0) + u * w
    coeffs = [acc.get(k, 0) for k in range(max(acc) + 1)] if acc else []
    # reduce modulo the monic cubic p
    pc = p.coeffs
    while len(coeffs) > 3:
        top = coeffs.pop()
        shift = len(coeffs) - 3
        for k in range(3):
            coeffs[shift + k] -= top * pc[k]
    return tuple(coeffs)


def dual_interior(e: EigenData, orthant: Orthant, n: Sequence[int]) -> bool:
    """True iff the covector ``n`` is strictly positive on the closed orthant minus 0."""
    sig = edge_signs(e, orthant)
    return all(sign_on_vector(e, i, n) == sig[i] for i in range(3))


def float_frame(e: EigenData) -> tuple[list[list[float]], list[list[float]]]:
    """Floating approximations of the eigen covectors and vectors (guidance only)."""
    lam = e.float_roots()
    cov = [[float(sum(a * l**j for j, a in enumerate(q.coeffs))) for q in e.covector] for l in lam]
    vec = [[float(sum(a * l**j for j, a in enumerate(q.coeffs))) for q in e.vector] for l in lam]
    return cov, vec


# -- norm form ----------------------------------------------------------------------


@dataclass(frozen=True)
class NormForm:
    """Primitive integer ternary cubic proportional to l_1 * l_2 * l_3.

    ``coeffs`` maps exponent triples to integer coefficients.  ``scale`` is the
    rational ``c`` with ``f = c * l_1 l_2 l_3`` for the covectors of the
    originating :class:`EigenData`.
    """

    coeffs: tuple  # ((i, j, k), coefficient) sorted
    scale: Fraction

    def __call__(self, v: Sequence[int]) -> int:
        x, y, z = v
        return sum(c * x**i * y**j * z**k for (i, j, k), c in self.coeffs)

    def __str__(self) -> str:
        terms = []
        for (i, j, k), c in self.coeffs:
            mono = "".join(
                f"{s}" + (f"^{p}" if p > 1 else "") for s, p in (("x", i), ("y", j), ("z", k)) if p
            )
            terms.append(f"{c}*{mono}")
        return " + ".join(terms)


def _companion(p: IntPoly) -> Mat3:
    c0, c1, c2, _ = p.coeffs
    # multiplication by t on the basis 1, t, t^2 of Q[t]/(p), columns = images
    return ((0, 0, -c0), (1, 0, -c1), (0, 1, -c2))


def _lin_mat_poly(q: IntPoly, comp: Mat3) -> list[list[tuple]]:
    """q(C) as a matrix (entries integers)."""
    from .linalg import identity, mat_add, mat_mul, mat_scale

    out = mat_scale(identity(), 0)
    power = identity()
    for a in q.coeffs:
        out = mat_add(out, mat_scale(power, a))
        power = mat_mul(power, comp)
    return out


def norm_form(e: EigenData) -> NormForm:
    """Integer cubic form proportional to the product of the three eigen forms."""
    comp = _companion(e.poly)
    # each entry of M(x) = sum_k x_k w_k(C) is a linear form in x
    mats = [_lin_mat_poly(q, comp) for q in e.covector]
    lin = [[tuple(mats[k][r][c] for k in range(3)) for c in range(3)] for r in range(3)]

    def mul(p1: dict, lf: tuple) -> dict:
        out: dict = {}
        for mono, c in p1.items():
            for k in range(3):
                if lf[k]:
                    m = list(mono)
                    m[k] += 1
                    m = tuple(m)
                    out[m] = out.get(m, 0) + c * lf[k]
        return out

    total: dict = {}
    for perm, sgn in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                      ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1)):
        term = {(0, 0, 0): sgn}
        for r in range(3):
            term = mul(term, lin[r][perm[r]])
        for m, c in term.items():
            total[m] = total.get(m, 0) + c
    total = {m: c for m, c in total.items() if c}
    g = content(total.values())
    items = sorted(total.items(), reverse=True)
    sgn = 1 if items[0][1] > 0 else -1
    coeffs = tuple((m, sgn * c // g) for m, c in items)
    # det of the multiplication matrix equals the product over conjugates exactly
    return NormForm(coeffs, Fraction(sgn, g))


def float_root_logs(values: Sequence[float]) -> list[float]:
    return [math.log(abs(v)) for v in values]


def det_sign(e: EigenData) -> int:
    d = det3(e.matrix)
    return (d > 0) - (d < 0)
