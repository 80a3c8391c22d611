"""Exact univariate polynomial arithmetic and certified real-root isolation.

Everything here works over Python integers and :class:`fractions.Fraction`;
no floating point value ever decides a sign.  Polynomials of degree at most
three are all the library needs, but the Sturm machinery is written for any
degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence, Union

Number = Union[int, Fraction]


def _strip(coeffs: Sequence[Number]) -> tuple:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class IntPoly:
    """Polynomial with integer coefficients, stored low degree first."""

    coeffs: tuple

    def __post_init__(self) -> None:
        c = _strip(int(a) for a in self.coeffs)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_high(cls, *coeffs: int) -> "IntPoly":
        """Build from coefficients listed highest degree first."""
        return cls(tuple(reversed(coeffs)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __call__(self, x: Number) -> Number:
        acc: Number = 0
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def derivative(self) -> "IntPoly":
        return IntPoly(tuple(k * a for k, a in enumerate(self.coeffs))[1:])

    def content(self) -> int:
        g = 0
        for a in self.coeffs:
            g = gcd(g, a)
        return g

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            a = self.coeffs[k]
            if a == 0:
                continue
            sign = "-" if a < 0 else "+"
            mag = abs(a)
            if k == 0:
                body = str(mag)
            else:
                mono = "x" if k == 1 else f"x^{k}"
                body = mono if mag == 1 else f"{mag}{mono}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


# -- generic rational polynomial helpers (tuples, low degree first) ---------


def _pdivmod(a: Sequence[Number], b: Sequence[Number]) -> tuple[tuple, tuple]:
    a = [Fraction(x) for x in _strip(a)]
    b = [Fraction(x) for x in _strip(b)]
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        f = a[-1] / b[-1]
        q[shift] = f
        for i, bi in enumerate(b):
            a[i + shift] -= f * bi
        a = list(_strip(a))
    return _strip(q), tuple(a)


def poly_rem(a: Sequence[Number], b: Sequence[Number]) -> tuple:
    return _pdivmod(a, b)[1]


def poly_gcd(a: Sequence[Number], b: Sequence[Number]) -> tuple:
    a, b = _strip(a), _strip(b)
    while b:
        a, b = b, poly_rem(a, b)
    if not a:
        return ()
    lead = Fraction(a[-1])
    return tuple(Fraction(x) / lead for x in a)


def _peval(c: Sequence[Number], x: Number) -> Number:
    acc: Number = 0
    for a in reversed(c):
        acc = acc * x + a
    return acc


def _sign(x: Number) -> int:
    return (x > 0) - (x < 0)


def sturm_sequence(p: Sequence[Number]) -> list[tuple]:
    """Standard Sturm chain p, p', -rem(p, p'), ..."""
    p = _strip(p)
    seq = [p, _strip(tuple(k * a for k, a in enumerate(p))[1:])]
    while seq[-1]:
        r = poly_rem(seq[-2], seq[-1])
        if not r:
            break
        seq.append(tuple(-x for x in r))
    return [s for s in seq if s]


def _variations(seq: list[tuple], x: Number) -> int:
    signs = [s for s in (_sign(_peval(c, x)) for c in seq) if s]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def sturm_count(seq: list[tuple], lo: Number, hi: Number) -> int:
    """Number of distinct real roots in the half-open interval (lo, hi]."""
    return _variations(seq, lo) - _variations(seq, hi)


def cauchy_bound(p: IntPoly) -> Fraction:
    lead = abs(Fraction(p.lead))
    return 1 + max((abs(Fraction(a)) / lead for a in p.coeffs[:-1]), default=Fraction(0))


# -- root intervals -----------------------------------------------------------


@dataclass(frozen=True)
class RootInterval:
    """Open interval (lo, hi) holding exactly one real root of ``poly``."""

    poly: IntPoly
    lo: Fraction
    hi: Fraction
    sign_lo: int
    sign_hi: int

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __float__(self) -> float:
        return float(self.midpoint())


def _check_poly(p: IntPoly) -> None:
    if not isinstance(p, IntPoly):
        raise TypeError("expected IntPoly")
    if p.is_zero:
        raise ValueError("zero polynomial has no isolated roots")
    if p.degree < 1 or p.degree > 3:
        raise ValueError(f"degree must be between 1 and 3, got {p.degree}")


def _make(p: IntPoly, lo: Fraction, hi: Fraction) -> RootInterval:
    return RootInterval(p, lo, hi, _sign(p(lo)), _sign(p(hi)))


def _split_point(p: IntPoly, lo: Fraction, hi: Fraction) -> Fraction:
    # avoid landing exactly on a root
    for num, den in ((1, 2), (1, 3), (2, 3), (1, 5), (4, 5)):
        m = lo + (hi - lo) * num / den
        if p(m) != 0:
            return m
    raise AssertionError("polynomial of degree <= 3 has at most 3 roots")


def isolate_real_roots(p: IntPoly) -> list[RootInterval]:
    """Disjoint isolating intervals for the distinct real roots of ``p``, ascending."""
    _check_poly(p)
    seq = sturm_sequence(p.coeffs)
    bound = Fraction(int(cauchy_bound(p)) + 1)
    out: list[RootInterval] = []
    stack = [(-bound, bound)]
    while stack:
        lo, hi = stack.pop()
        n = sturm_count(seq, lo, hi)
        if n == 0:
            continue
        if n == 1:
            out.append(_make(p, lo, hi))
            continue
        mid = _split_point(p, lo, hi)
        stack.append((lo, mid))
        stack.append((mid, hi))
    out.sort(key=lambda r: r.lo)
    return out


def refine(r: RootInterval, width: Number) -> RootInterval:
    """Shrink ``r`` by exact bisection until its width is at most ``width``."""
    width = Fraction(width)
    if width <= 0:
        raise ValueError("width must be positive")
    p, lo, hi = r.poly, r.lo, r.hi
    if hi - lo <= width:
        return r
    slo = _sign(p(lo))
    simple = slo != 0 and slo != _sign(p(hi))
    seq = None if simple else sturm_sequence(p.coeffs)
    while hi - lo > width:
        mid = (lo + hi) / 2
        sm = _sign(p(mid))
        if sm == 0:
            # mid is the root itself; keep a tiny window around it
            lo, hi = mid - width / 4, mid + width / 4
            break
        if simple:
            if sm == slo:
                lo = mid
            else:
                hi = mid
        elif sturm_count(seq, lo, mid) == 1:
            hi = mid
        else:
            lo = mid
    return _make(p, lo, hi)


def sign_at_root(q: Sequence[Number], r: RootInterval) -> int:
    """Exact sign of the polynomial ``q`` at the root isolated by ``r``.

    ``q`` may have rational coefficients.  The interval is bisected until ``q``
    has no root in its closure, which terminates unless ``q`` vanishes at the
    root; that case is detected up front with a gcd.
    """
    q = _strip(q)
    if not q:
        return 0
    p = r.poly
    g = poly_gcd(p.coeffs, q)
    if len(g) > 1:
        gseq = sturm_sequence(g)
        if sturm_count(gseq, r.lo, r.hi) > 0:
            return 0
    qseq = sturm_sequence(q) if len(q) > 1 else None
    cur = r
    while True:
        vlo = _peval(q, cur.lo)
        if vlo != 0 and _peval(q, cur.hi) != 0:
            if qseq is None or sturm_count(qseq, cur.lo, cur.hi) == 0:
                return _sign(vlo)
        cur = refine(cur, cur.width / 4)


def is_irreducible_cubic(p: IntPoly) -> bool:
    """True iff the cubic ``p`` has no rational root (equivalently, is irreducible over Q)."""
    if p.degree != 3:
        raise ValueError("expected a cubic")
    a0, an = p.coeffs[0], p.coeffs[-1]
    if a0 == 0:
        return False
    nums = _divisors(abs(a0))
    dens = _divisors(abs(an))
    for num in nums:
        for den in dens:
            for s in (1, -1):
                if p(Fraction(s * num, den)) == 0:
                    return False
    return True


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def discriminant_cubic(p: IntPoly) -> int:
    """Discriminant of a*x^3 + b*x^2 + c*x + d."""
    if p.degree != 3:
        raise ValueError("expected a cubic")
    d, c, b, a = p.coeffs
    return b * b * c * c - 4 * a * c**3 - 4 * b**3 * d - 27 * a * a * d * d + 18 * a * b * c * d
