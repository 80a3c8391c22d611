import itertools
import random

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from kleinsail.linalg import (
    INFINITE,
    char_poly,
    det3,
    hermite_normal_form,
    identity,
    mat_inv,
    mat_mul,
    parse_matrix,
    plane_lattice_basis,
    primitive,
    smith_diagonal,
    sublattice_index,
    unimodular_completion,
)

from conftest import GOLDEN, random_unimodular


def _sympy_det(m):
    return int(sp.Matrix(m).det())


def test_char_poly_examples(derived):
    assert char_poly(identity()).coeffs == (-1, 3, -3, 1)
    assert list(reversed(char_poly(GOLDEN).coeffs)) == derived["golden_charpoly_high"]
    pair = ((0, 1, 0), (0, 0, 1), (1, 4, -11))
    assert list(reversed(char_poly(pair).coeffs)) == derived["companion11_charpoly_high"]


def test_hnf_examples(derived):
    h, u = hermite_normal_form([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert h == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    h, _ = hermite_normal_form([[2, 0], [0, 3]])
    assert h == [[2, 0], [0, 3]]
    h, u = hermite_normal_form([[2, 4], [1, 3]])
    assert abs(h[0][0] * h[1][1] - h[0][1] * h[1][0]) == derived["hnf_2413_absdet"]
    assert abs(_sympy_det(u)) == 1


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=1, max_size=5))
def test_hnf_transform_is_unimodular(m):
    h, u = hermite_normal_form(m)
    assert abs(_sympy_det(u)) == 1
    assert (sp.Matrix(u) * sp.Matrix(m)).tolist() == h


def test_primitive():
    assert primitive((2, 4, 6)) == (1, 2, 3)
    assert primitive((0, 0, 5)) == (0, 0, 1)
    assert primitive((-3, 3, 0)) == (-1, 1, 0)
    with pytest.raises(ValueError):
        primitive((0, 0, 0))


def _plane_points(n, c, box=3):
    for p in itertools.product(range(-box, box + 1), repeat=3):
        if sum(a * b for a, b in zip(n, p)) == c:
            yield p


def test_plane_lattice_basis_examples(derived):
    pl = plane_lattice_basis((0, 0, 0), (1, 0, 0), (0, 1, 0))
    assert sublattice_index([(1, 0, 0), (0, 1, 0)], pl) == 1
    pl = plane_lattice_basis((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert all(pl.contains(p) for p in _plane_points((1, 1, 1), 1))
    assert sublattice_index([(-1, 1, 0), (-1, 0, 1)], pl) == derived["plane_xyz1_index"]
    pl = plane_lattice_basis((0, 0, 0), (2, 0, 0), (0, 2, 0))
    assert sublattice_index([(1, 0, 0), (0, 1, 0)], pl) == 1
    assert pl.contains((1, 1, 0))
    with pytest.raises(ValueError):
        plane_lattice_basis((0, 0, 0), (1, 1, 1), (2, 2, 2))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(*[st.integers(-4, 4)] * 3), min_size=3, max_size=3, unique=True))
def test_plane_basis_is_saturated(pts):
    try:
        pl = plane_lattice_basis(*pts)
    except ValueError:
        return
    assert smith_diagonal([list(b) for b in pl.basis]) == [1, 1]


def test_sublattice_index_examples():
    assert sublattice_index([(2, 0), (0, 1)]) == 2
    assert sublattice_index([(1, 0), (0, 1)]) == 1
    assert sublattice_index([(1, 0)], [(1, 0), (0, 1)]) == INFINITE
    # corner of a triangle with edges to (-1,-1) and (1,0) from (0,1)
    assert sublattice_index([(-1, -2), (1, -1)]) == 3


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_sublattice_index_invariant_under_basis_change(seed):
    rng = random.Random(seed)
    gens = [[rng.randint(-5, 5) for _ in range(3)] for _ in range(3)]
    w = random_unimodular(rng)
    moved = [[sum(w[i][k] * gens[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
    assert sublattice_index(gens) == sublattice_index(moved)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_char_poly_conjugation_invariant(seed):
    rng = random.Random(seed)
    w = random_unimodular(rng, steps=10)
    a = tuple(tuple(rng.randint(-4, 4) for _ in range(3)) for _ in range(3))
    assert char_poly(mat_mul(mat_mul(w, a), mat_inv(w))) == char_poly(a)


@settings(max_examples=100, deadline=None)
@given(st.tuples(*[st.integers(-30, 30)] * 3).filter(lambda v: any(v)))
def test_unimodular_completion(n):
    import math

    g = math.gcd(*n)
    n = tuple(x // g for x in n)
    z, u, w = unimodular_completion(n)
    assert sum(a * b for a, b in zip(n, z)) == 1
    assert sum(a * b for a, b in zip(n, u)) == 0 == sum(a * b for a, b in zip(n, w))
    assert abs(det3((z, u, w))) == 1


def test_parse_matrix():
    assert parse_matrix("1,1,1;1,2,2;1,2,3") == GOLDEN
