from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from kleinsail.exact import (
    IntPoly,
    cauchy_bound,
    discriminant_cubic,
    is_irreducible_cubic,
    isolate_real_roots,
    refine,
    sign_at_root,
    sturm_count,
    sturm_sequence,
)

GOLDEN_POLY = IntPoly.from_high(1, -6, 5, -1)
PAIR_POLY = IntPoly.from_high(1, 11, -4, -1)

coeff = st.integers(-20, 20)
cubics = st.tuples(st.integers(1, 3), coeff, coeff, coeff).map(lambda c: IntPoly.from_high(*c))


def test_golden_roots_match_oracle(derived):
    roots = isolate_real_roots(GOLDEN_POLY)
    assert len(roots) == 3
    for r, ref in zip(roots, derived["golden_roots"]):
        ref = Fraction(ref)
        assert r.lo < ref < r.hi or abs(r.midpoint() - ref) < r.width
        assert refine(r, Fraction(1, 10**12)).lo < ref + Fraction(1, 10**11)
    assert [round(float(refine(r, Fraction(1, 10**6))), 2) for r in roots] == [0.31, 0.64, 5.05]


def test_single_real_root():
    roots = isolate_real_roots(IntPoly.from_high(1, 0, 0, -1))
    assert len(roots) == 1
    assert roots[0].lo < 1 < roots[0].hi


def test_same_polynomial_pair_has_three_real_roots(derived):
    assert len(isolate_real_roots(PAIR_POLY)) == derived["companion11_real_root_count"] == 3


def test_refine_sqrt2():
    (r,) = [r for r in isolate_real_roots(IntPoly.from_high(1, 0, -2)) if r.hi > 0]
    r = refine(r, Fraction(1, 1000))
    assert Fraction(141, 100) <= r.lo and r.hi <= Fraction(142, 100)


def test_refine_idempotent_when_already_narrow():
    r = isolate_real_roots(GOLDEN_POLY)[0]
    assert refine(r, r.width * 2) == r


def test_refine_largest_golden_root(derived):
    r = refine(isolate_real_roots(GOLDEN_POLY)[-1], Fraction(1, 10**6))
    assert r.width <= Fraction(1, 10**6)
    assert r.lo < Fraction(derived["golden_largest_root"]) < r.hi


def test_irreducibility(derived):
    assert is_irreducible_cubic(GOLDEN_POLY) is derived["golden_irreducible"] is True
    assert not is_irreducible_cubic(IntPoly.from_high(1, 0, 0, -1))
    assert is_irreducible_cubic(PAIR_POLY)


def test_discriminants(derived):
    assert discriminant_cubic(IntPoly.from_high(1, 0, -3, 1)) == derived["disc_x3_m3x_p1"] == 81
    assert discriminant_cubic(IntPoly.from_high(1, 0, 0, 0)) == 0
    assert discriminant_cubic(GOLDEN_POLY) == derived["disc_golden"] > 0


def test_sign_at_root():
    r = isolate_real_roots(GOLDEN_POLY)[-1]
    assert sign_at_root((-5, 1), r) == 1  # root > 5
    assert sign_at_root((-6, 1), r) == -1


@settings(max_examples=1000, deadline=None)
@given(cubics)
def test_sturm_count_matches_isolation(p):
    b = cauchy_bound(p)
    assert sturm_count(sturm_sequence(p.coeffs), -b - 1, b + 1) == len(isolate_real_roots(p))


@settings(max_examples=1000, deadline=None)
@given(cubics)
def test_discriminant_sign_matches_root_count(p):
    assert (discriminant_cubic(p) > 0) == (len(isolate_real_roots(p)) == 3)


@settings(max_examples=200, deadline=None)
@given(cubics)
def test_discriminant_against_sympy(p):
    x = sp.symbols("x")
    expr = sum(c * x**k for k, c in enumerate(p.coeffs))
    assert discriminant_cubic(p) == int(sp.discriminant(expr, x))


@settings(max_examples=200, deadline=None)
@given(cubics, st.integers(1, 40))
def test_refine_keeps_the_root(p, bits):
    seq = sturm_sequence(p.coeffs)
    for r in isolate_real_roots(p):
        s = refine(r, Fraction(1, 2**bits))
        assert r.lo <= s.lo < s.hi <= r.hi
        assert sturm_count(seq, s.lo, s.hi) == 1


def test_rejects_zero_polynomial():
    with pytest.raises(ValueError):
        isolate_real_roots(IntPoly(()))
