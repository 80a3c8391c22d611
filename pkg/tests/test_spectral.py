import ast
import itertools
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kleinsail.classify import is_hyperbolic
from kleinsail.exact import refine
from kleinsail.linalg import mat_vec, transpose
from kleinsail.spectral import NotHyperbolic, Orthant, eigen_structure, norm_form, sign_of_form

from conftest import EXAMPLE2, EXAMPLE3, GOLDEN

PAIR = ((0, 1, 0), (0, 0, 1), (1, 4, -11))
small = st.integers(-3, 3)
matrices = st.tuples(*[st.tuples(small, small, small)] * 3)


def _forms(d):
    return {ast.literal_eval(k): v for k, v in d.items()}


def _mp_covectors(e, v, dps=60):
    mpmath.mp.dps = dps
    out = []
    for i, r in enumerate(e.roots):
        r = refine(r, Fraction(1, 2**150))
        lam = mpmath.mpf(r.lo.numerator) / r.lo.denominator
        q = e.covector_at(i, v)
        out.append(sum(c * lam**j for j, c in enumerate(q)))
    return out


@pytest.mark.parametrize("a", [((1, 0, 0), (0, 1, 0), (0, 0, 1)),  # reducible
                               ((0, 1, 0), (0, 0, 1), (1, 0, 0)),  # x^3 - 1
                               ((0, 1, 0), (0, 0, 1), (2, 0, 0))])  # x^3 - 2, complex pair
def test_not_hyperbolic(a):
    with pytest.raises(NotHyperbolic):
        eigen_structure(a)


def test_norm_form_golden(derived):
    assert dict(norm_form(eigen_structure(GOLDEN)).coeffs) == _forms(derived["golden_norm_form"])


def test_norm_form_companion_up_to_sign(derived):
    ours = dict(norm_form(eigen_structure(PAIR)).coeffs)
    ref = _forms(derived["companion11_norm_form"])
    assert ours == {m: -c for m, c in ref.items()}
    assert norm_form(eigen_structure(PAIR))((1, 0, 0)) == -derived["companion11_norm_form_at_e1"]


@pytest.mark.parametrize("a", [GOLDEN, EXAMPLE2, EXAMPLE3, PAIR])
def test_norm_form_is_scaled_product(a):
    e = eigen_structure(a)
    f = norm_form(e)
    rng = random.Random(5)
    for _ in range(20):
        v = tuple(rng.randint(-9, 9) for _ in range(3))
        if not any(v):
            continue
        prod = mpmath.fprod(_mp_covectors(e, v))
        assert abs(f(v) - f.scale.numerator * prod / f.scale.denominator) < mpmath.mpf(10) ** -20


@pytest.mark.parametrize("a", [GOLDEN, EXAMPLE2, EXAMPLE3, PAIR])
def test_norm_form_vanishes_on_no_lattice_point(a):
    f = norm_form(eigen_structure(a))
    for v in itertools.product(range(-5, 6), repeat=3):
        if any(v):
            assert f(v) != 0


@pytest.mark.parametrize("a", [GOLDEN, EXAMPLE3])
def test_signs_agree_with_high_precision(a):
    e = eigen_structure(a)
    for v in itertools.product(range(-3, 4), repeat=3):
        if not any(v):
            continue
        vals = _mp_covectors(e, v)
        for i in range(3):
            assert sign_of_form(e, i, v) == (1 if vals[i] > 0 else -1)


@settings(max_examples=200, deadline=None)
@given(st.tuples(*[st.integers(-10**6, 10**6)] * 3).filter(any))
def test_orthant_is_odd(v):
    e = eigen_structure(GOLDEN)
    assert e.orthant_of(tuple(-x for x in v)) == -e.orthant_of(v)


@settings(max_examples=100, deadline=None)
@given(st.tuples(*[st.integers(-50, 50)] * 3).filter(any))
def test_operator_moves_orthants_by_root_signs(v):
    e = eigen_structure(EXAMPLE3)
    # left eigenforms satisfy l_i(Av) = lambda_i l_i(v)
    root_signs = [1 if r.lo >= 0 else -1 for r in e.roots]
    before = e.orthant_of(v).signs
    after = e.orthant_of(mat_vec(EXAMPLE3, v)).signs
    assert list(after) == [s * r for s, r in zip(before, root_signs)]


@settings(max_examples=300, deadline=None)
@given(matrices)
def test_transpose_hyperbolic(a):
    assert is_hyperbolic(a) == is_hyperbolic(transpose(a))


def test_orthant_parse_and_representatives():
    assert str(Orthant.parse("+-+")) == "+-+"
    assert len(Orthant.all()) == 8
    reps = Orthant.representatives()
    assert len(reps) == 4 and all(-o not in reps for o in reps)
    with pytest.raises(ValueError):
        Orthant.parse("++")
