import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kleinsail.classify import family
from kleinsail.linalg import det3, mat_inv, mat_mul, mat_pow, mat_vec
from kleinsail.spectral import eigen_structure
from kleinsail.units import (
    commutant_order,
    commutes,
    enumerate_units,
    group_coordinates,
    has_positive_spectrum,
    is_positive_unit,
    kth_root_in_order,
    unit_group,
    unit_mapping,
)

from conftest import EXAMPLE2, EXAMPLE3, GOLDEN, random_unimodular

OPERATORS = [GOLDEN, EXAMPLE2, EXAMPLE3, family("korkina", m=2), family("oneparam", a=2),
             family("quadrangle", a=1, b=0)]


def test_golden_order_and_regulator(derived):
    order, pair = unit_group(GOLDEN)
    assert order.index == derived["golden_order_index"]
    assert abs(pair.regulator() - float(derived["golden_unit_regulator"])) < 1e-9


@pytest.mark.parametrize("a", OPERATORS)
def test_generators_are_positive_units(a):
    _, pair = unit_group(a)
    for g in (pair.u, pair.v):
        assert commutes(a, g)
        assert det3(g) == 1
        assert has_positive_spectrum(g)
        assert is_positive_unit(a, g)
    assert pair.regulator() > 1e-6
    assert pair.status == "heuristic-certified"
    assert set(pair.saturation) == {2, 3, 5}


@pytest.mark.parametrize("a", OPERATORS)
def test_square_of_operator_is_in_group(a):
    e = eigen_structure(a)
    _, pair = unit_group(a)
    a2 = mat_mul(a, a)
    c = group_coordinates(e, pair, a2)
    assert c is not None and pair.element(*c) == a2


@pytest.mark.parametrize("a", OPERATORS[:3])
def test_enumerated_units_lie_in_group(a):
    e = eigen_structure(a)
    order, pair = unit_group(a)
    for w in enumerate_units(order, 6):
        assert group_coordinates(e, pair, w) is not None


def test_no_square_root_of_generator():
    e = eigen_structure(GOLDEN)
    order, pair = unit_group(GOLDEN)
    for k in (2, 3, 5):
        assert kth_root_in_order(e, order, pair.u, k) is None
    u2 = mat_pow(pair.u, 2)
    assert kth_root_in_order(e, order, u2, 2) == pair.u


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_unit_group_conjugation_covariant(seed):
    rng = random.Random(seed)
    w = random_unimodular(rng)
    a = mat_mul(mat_mul(w, EXAMPLE3), mat_inv(w))
    _, p0 = unit_group(EXAMPLE3)
    _, p1 = unit_group(a)
    assert abs(p0.regulator() - p1.regulator()) < 1e-9


@settings(max_examples=50, deadline=None)
@given(st.tuples(*[st.integers(-20, 20)] * 3).filter(any), st.integers(-2, 2), st.integers(-2, 2))
def test_unit_mapping_recovers_group_element(v, i, j):
    _, pair = unit_group(GOLDEN)
    g = pair.element(i, j)
    assert unit_mapping(GOLDEN, v, mat_vec(g, v)) == g


def test_unit_mapping_rejects_non_units():
    assert unit_mapping(GOLDEN, (1, 0, 0), (2, 0, 0)) is None


def test_commutant_order_basis():
    order = commutant_order(EXAMPLE3)
    assert order.index == 1
    assert order.coordinates(EXAMPLE3) is not None
