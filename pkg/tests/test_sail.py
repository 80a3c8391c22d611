import itertools

import pytest

from kleinsail.linalg import dot, mat_inv, mat_vec, to_int
from kleinsail.sail import (
    DegenerateInput,
    Face,
    NonTermination,
    certify_face,
    cone_points,
    convex_hull_3d,
    stable_sail_patch,
)
from kleinsail.spectral import Orthant, eigen_structure

from conftest import EXAMPLE2, EXAMPLE3, GOLDEN, sail

CASES = [(GOLDEN, "+++"), (GOLDEN, "+-+"), (EXAMPLE2, "++-"), (EXAMPLE3, "+++"), (EXAMPLE3, "+--")]


def _in_cone(e, o, x):
    return all(e.sign_of_form(i, x) == o.signs[i] for i in range(3))


def test_hull_of_cube():
    cube = list(itertools.product((0, 1), repeat=3))
    faces = convex_hull_3d(cube + [(0, 0, 0)])
    assert len(faces) == 6
    assert all(len(f) == 4 for f in faces)
    for f in faces:
        assert all(dot(f.normal, p) <= f.offset for p in cube)  # outward normals


def test_hull_of_simplex_with_interior_point():
    pts = [(0, 0, 0), (4, 0, 0), (0, 4, 0), (0, 0, 4), (1, 1, 1)]
    faces = convex_hull_3d(pts)
    assert len(faces) == 4
    assert all((1, 1, 1) not in f.vertices for f in faces)


def test_hull_degenerate():
    with pytest.raises(DegenerateInput):
        convex_hull_3d([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)])


def test_face_contains_and_transform():
    f = Face.from_points([(1, 0, 0), (0, 1, 0), (0, 0, 1)], (1, 1, 1))
    assert f.offset == 1
    assert f.contains((1, 0, 0)) and not f.contains((2, -1, 0))
    g = ((1, 1, 0), (0, 1, 0), (0, 0, 1))
    assert {tuple(mat_vec(g, v)) for v in f.vertices} == set(f.transform(g).vertices)


@pytest.mark.parametrize("a,o", CASES)
def test_patch_faces_support_the_cone(a, o):
    """Brute force: no cone point in a box lies below any certified face plane."""
    e = eigen_structure(a)
    orth = Orthant.parse(o)
    _, _, patch = sail(a, o)
    box = [x for x in itertools.product(range(-7, 8), repeat=3) if any(x) and _in_cone(e, orth, x)]
    assert box
    for f in patch.faces:
        assert all(_in_cone(e, orth, v) for v in f.vertices)
        for x in box:
            assert dot(f.normal, x) >= f.offset
            if dot(f.normal, x) == f.offset:
                assert f.contains(x)


@pytest.mark.parametrize("a,o", CASES)
def test_unit_images_are_sail_faces(a, o):
    e = eigen_structure(a)
    orth = Orthant.parse(o)
    _, _, patch = sail(a, o)
    assert patch.unit_invariance
    for f in patch.representatives():
        for g in (patch.pair.u, patch.pair.v, mat_inv(patch.pair.u)):
            img = f.transform(to_int(g))
            assert certify_face(e, orth, img).status == "genuine"


def test_certify_rejects_non_face():
    e = eigen_structure(GOLDEN)
    orth = Orthant.parse("+++")
    _, _, patch = sail(GOLDEN, "+++")
    f = patch.faces[0]
    # same polygon pushed away from the origin is not supporting
    bigger = Face(tuple(tuple(2 * c for c in v) for v in f.vertices), f.normal, 2 * f.offset)
    assert certify_face(e, orth, bigger).status == "violated"


@pytest.mark.parametrize("a,o", CASES[:3])
def test_cone_points_match_brute_force(a, o):
    e = eigen_structure(a)
    orth = Orthant.parse(o)
    _, _, patch = sail(a, o)
    n = patch.faces[0].normal
    hi = patch.faces[0].offset + 2
    got = set(cone_points(e, orth, n, hi))
    assert all(_in_cone(e, orth, x) and 1 <= dot(n, x) <= hi for x in got)
    box = {x for x in itertools.product(range(-12, 13), repeat=3)
           if any(x) and 1 <= dot(n, x) <= hi and _in_cone(e, orth, x)}
    assert box <= got


def test_nontermination_is_reported():
    with pytest.raises(NonTermination):
        stable_sail_patch(EXAMPLE3, Orthant.parse("+++"), bound=1, radius=0, max_steps=1, cert_cap=1)


def test_patch_obj_export():
    _, _, patch = sail(GOLDEN, "+++")
    text = patch.to_obj()
    assert text.startswith("# kleinsail patch (non-normative)")
    assert sum(1 for line in text.splitlines() if line.startswith("f ")) == len(patch.faces)
