import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kleinsail.linalg import affine_lattice, cross, dot, mat_inv, mat_mul, mat_vec, primitive, sub
from kleinsail.sail import Face
from kleinsail.spectral import Orthant
from kleinsail.torus import (
    affine_canonical_form,
    certificate,
    integer_angle,
    integer_area,
    integer_distance_by_index,
    integer_distance_or_angle_between_planes,
    integer_distance_to_origin,
    integer_length,
    sail_certificate,
)

from conftest import EXAMPLE2, EXAMPLE3, GOLDEN, all_sails, random_unimodular, sail


def _affine(rng):
    g = random_unimodular(rng, steps=5, bound=2)
    t = tuple(rng.randint(-9, 9) for _ in range(3))
    return lambda p: tuple(x + s for x, s in zip(mat_vec(g, p), t)), g


def _random_polygon(rng):
    """A lattice polygon lying in a random plane of Z^3 (convex by construction)."""
    w = random_unimodular(rng, steps=4, bound=2)
    wd = rng.randint(1, 4)
    base = [(0, 0), (wd, 0), (wd, rng.randint(1, 3)), (0, rng.randint(1, 3))]
    h = rng.randint(1, 5)
    return [tuple(mat_vec(w, (x, y, h))) for x, y in base]


def test_lengths_and_areas():
    assert integer_length((0, 0, 0), (2, 4, 6)) == 2
    assert integer_length((1, 2, 3), (2, 3, 5)) == 1
    assert integer_area([(0, 0), (1, 0), (0, 1)]) == 1
    assert integer_area([(0, 0), (2, 0), (2, 2), (0, 2)]) == 8
    assert integer_area([(1, 0, 0), (0, 1, 0), (0, 0, 1)]) == 1
    with pytest.raises(ValueError):
        integer_length((1, 1, 1), (1, 1, 1))


def test_angles(derived):
    assert integer_angle((0, 0), (1, 0), (0, 1)) == 1
    assert integer_angle((0, 0), (1, 0), (1, 3)) == derived["line_angle_index"]
    assert integer_angle((0, 0), (2, 0), (0, 5)) == 1
    with pytest.raises(ValueError):
        integer_angle((0, 0), (1, 1), (2, 2))


def test_distances():
    f = Face.from_points([(2, 0, 0), (0, 2, 0), (0, 0, 2)], (1, 1, 1))
    assert integer_distance_to_origin(f) == 2 == integer_distance_by_index(f)
    g = Face.from_points([(1, 0, 0), (0, 1, 0), (0, 0, 1)], (1, 1, 1))
    assert integer_distance_or_angle_between_planes(f, g) == ("distance", 1)
    p = affine_lattice((0, 0, 0), [(1, 0, 0), (0, 1, 0)])
    q = affine_lattice((0, 0, 0), [(1, 0, 0), (0, 1, 3)])
    assert integer_distance_or_angle_between_planes(p, q) == ("angle", 3)


def test_canonical_form_triangle():
    # the area-3 triangle with vertices (-1,-1), (0,1), (1,0)
    tri = [(-1, -1), (0, 1), (1, 0)]
    assert integer_area(tri) == 3
    assert affine_canonical_form(tri) == affine_canonical_form([(0, 0), (1, 0), (2, 3)])
    assert affine_canonical_form(tri) != affine_canonical_form([(0, 0), (3, 0), (0, 1)])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_invariants_under_unimodular_affine_maps(seed):
    rng = random.Random(seed)
    poly = _random_polygon(rng)
    phi, g = _affine(rng)
    img = [phi(p) for p in poly]
    n = len(poly)
    for i in range(n):
        assert integer_length(poly[i], poly[(i + 1) % n]) == integer_length(img[i], img[(i + 1) % n])
        a0 = integer_angle(poly[i], poly[i - 1], poly[(i + 1) % n])
        assert a0 == integer_angle(img[i], img[i - 1], img[(i + 1) % n])
    assert integer_area(poly) == integer_area(img)
    assert affine_canonical_form(poly) == affine_canonical_form(img)
    # distance to the origin only sees the linear part
    lin = [tuple(mat_vec(g, p)) for p in poly]
    f0 = Face.from_points(poly[:3], _normal(poly))
    f1 = Face.from_points(lin[:3], _normal(lin))
    assert integer_distance_by_index(f0) == integer_distance_by_index(f1)


def _normal(pts):
    n = primitive(cross(sub(pts[1], pts[0]), sub(pts[2], pts[0])))
    return n if dot(n, pts[0]) >= 0 else tuple(-x for x in n)


@pytest.mark.parametrize("a", [GOLDEN, EXAMPLE2, EXAMPLE3])
def test_euler_characteristic_zero(a):
    for cert, td, patch in all_sails(a):
        assert td.euler == 0
        assert certificate(td) == cert


@pytest.mark.parametrize("a", [GOLDEN, EXAMPLE3])
def test_certificate_independent_of_start(a):
    cert, td, _ = sail(a, "+++")
    assert cert.data.startswith(b"cert-v1:")
    assert len(cert.digest()) == 64


def _cert_multiset(a):
    return sorted(sail_certificate(a, o)[0].data for o in Orthant.representatives())


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**9))
def test_certificates_invariant_under_conjugation(seed):
    rng = random.Random(seed)
    base = rng.choice([GOLDEN, EXAMPLE2, EXAMPLE3])
    w = random_unimodular(rng, steps=3, bound=1)
    a = mat_mul(mat_mul(w, base), mat_inv(w))
    a = tuple(tuple(int(x) for x in r) for r in a)
    assert _cert_multiset(a) == sorted(c.data for c, _, _ in all_sails(base))
