"""Integer invariants, torus quotients and canonical certificates of sails.

All invariants here are invariants of integer-affine maps (unimodular
linear part, integer translation): lengths, areas and angles are lattice
indices, and the distance of a face to the origin is the index of the
lattice its plane generates.  A certificate is the lexicographically least
encoding of the quotient complex over every starting dart, so two sails
with different certificates are not equivalent.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .linalg import (
    INFINITE,
    AffineLattice,
    PlaneLattice,
    cross,
    dot,
    plane_lattice_basis,
    rank,
    saturate,
    sub,
    sublattice_index,
)
from .sail import Face, SailPatch, convex_polygon_2d


class QuotientInconsistent(RuntimeError):
    """Edge identifications of a patch do not form a torus."""


# -- basic integer invariants ------------------------------------------------------


def integer_length(p: Sequence[int], q: Sequence[int]) -> int:
    d = [b - a for a, b in zip(p, q)]
    if not any(d):
        raise ValueError("segment endpoints coincide")
    return math.gcd(*d)


def _to_plane(points: Sequence[Sequence[int]], plane: Optional[AffineLattice]) -> list[tuple]:
    pts = [tuple(p) for p in points]
    if plane is not None:
        return [tuple(plane.coords(p)) for p in pts]
    if all(len(p) == 2 for p in pts):
        return pts
    if len(pts) < 3:
        raise ValueError("need at least three points")
    plane = _plane_of(pts)
    return [tuple(plane.coords(p)) for p in pts]


def _plane_of(pts: Sequence[tuple]) -> PlaneLattice:
    p0 = pts[0]
    for i in range(1, len(pts)):
        for j in range(i + 1, len(pts)):
            if any(cross(sub(pts[i], p0), sub(pts[j], p0))):
                return plane_lattice_basis(p0, pts[i], pts[j])
    raise ValueError("points are collinear")


def _double_area(c: Sequence[tuple]) -> int:
    s = 0
    for i in range(len(c)):
        x0, y0 = c[i]
        x1, y1 = c[(i + 1) % len(c)]
        s += x0 * y1 - x1 * y0
    return s


def integer_area(polygon: Sequence[Sequence[int]], plane: Optional[AffineLattice] = None) -> int:
    """Lattice area normalised so that the smallest lattice triangle has area 1."""
    c = _to_plane(polygon, plane)
    a = abs(_double_area(c))
    if a == 0:
        raise ValueError("degenerate polygon")
    return a


def integer_angle(
    vertex: Sequence[int],
    p1: Sequence[int],
    p2: Sequence[int],
    plane: Optional[AffineLattice] = None,
) -> int:
    """Index of the lattice spanned by the primitive directions of the two rays."""
    u = sub(p1, vertex)
    w = sub(p2, vertex)
    if plane is not None and len(u) == 3:
        u = sub(plane.coords(p1), plane.coords(vertex))
        w = sub(plane.coords(p2), plane.coords(vertex))
    if not any(u) or not any(w):
        raise ValueError("ray of zero length")
    gu, gw = math.gcd(*u), math.gcd(*w)
    u = [x // gu for x in u]
    w = [x // gw for x in w]
    if len(u) == 2:
        d = abs(u[0] * w[1] - u[1] * w[0])
    else:
        # primitive directions inside a plane: |det| in plane coordinates is
        # the content of their cross product
        d = math.gcd(*cross(u, w))
    if d == 0:
        raise ValueError("rays are collinear")
    return d


def integer_distance_to_origin(face: Face) -> int:
    if face.offset == 0:
        raise ValueError("face plane passes through the origin")
    return abs(face.offset)


def integer_distance_by_index(face: Face) -> Union[int, float]:
    """Same quantity as the index of the lattice generated by the plane's integer points."""
    pl = plane_lattice_basis(*face.vertices[:3])
    return sublattice_index([pl.anchor, *pl.basis])


def _as_affine(x) -> AffineLattice:
    if isinstance(x, AffineLattice):
        return x
    if isinstance(x, Face):
        return plane_lattice_basis(*x.vertices[:3])
    raise TypeError("expected an affine lattice or a face")


def integer_distance_or_angle_between_planes(p1, p2) -> tuple[str, int]:
    """Index of the lattice generated by the integer points of both planes.

    The index is taken inside the integer points of their joint affine span.
    The result is labelled ``"angle"`` when the planes meet and
    ``"distance"`` when they are disjoint.
    """
    a1, a2 = _as_affine(p1), _as_affine(p2)
    b1 = [list(v) for v in a1.basis]
    b2 = [list(v) for v in a2.basis]
    shift = list(sub(a2.anchor, a1.anchor))
    r1, r2 = rank(b1) if b1 else 0, rank(b2) if b2 else 0
    r12 = rank(b1 + b2) if b1 + b2 else 0
    if r12 == r1 and (not any(shift) or rank(b1 + [shift]) == r1):
        raise ValueError("second plane is contained in the first")
    if r12 == r2 and (not any(shift) or rank(b2 + [shift]) == r2):
        raise ValueError("first plane is contained in the second")
    meet = not any(shift) or rank(b1 + b2 + [shift]) == r12
    gens = b1 + b2 + ([shift] if any(shift) else [])
    span = saturate(gens)
    idx = sublattice_index(gens, span)
    if idx == INFINITE:  # pragma: no cover - gens span their own saturation
        raise ArithmeticError("rank mismatch")
    return ("angle" if meet else "distance", int(idx))


# -- affine normal form of lattice polygons --------------------------------------------


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def framed_coords(cyc: Sequence[tuple]) -> tuple:
    """Coordinates of a convex cycle in the frame fixed by its first edge.

    Origin at the first vertex, first axis along the primitive first edge,
    polygon on the nonnegative side of the second axis, shear chosen so the
    third vertex has ``0 <= a < b``.
    """
    p0 = cyc[0]
    dx, dy = cyc[1][0] - p0[0], cyc[1][1] - p0[1]
    g = math.gcd(dx, dy)
    ex, ey = dx // g, dy // g
    # second axis (fx, fy) with ex*fy - ey*fx == 1
    _, s, t = _ext_gcd(ex, ey)
    fx, fy = -t, s
    rel = [(x - p0[0], y - p0[1]) for x, y in cyc]
    out = [(fy * x - fx * y, ex * y - ey * x) for x, y in rel]
    if any(b < 0 for _, b in out):
        out = [(a, -b) for a, b in out]
    a2, b2 = out[2]
    k = a2 // b2
    return tuple((a - k * b, b) for a, b in out)


def affine_canonical_form(polygon: Sequence[Sequence[int]], plane: Optional[AffineLattice] = None) -> tuple:
    """Least framed coordinate sequence over all starting vertices and directions."""
    c = _to_plane(polygon, plane)
    idx = convex_polygon_2d(c)
    if len(idx) < 3:
        raise ValueError("degenerate polygon")
    cyc = [c[i] for i in idx]
    n = len(cyc)
    best = None
    for start in range(n):
        for d in (1, -1):
            seq = [cyc[(start + d * k) % n] for k in range(n)]
            form = framed_coords(seq)
            if best is None or form < best:
                best = form
    return best


# -- quotient complex -----------------------------------------------------------------


@dataclass(frozen=True)
class FaceCell:
    vertices: tuple  # sail coordinates of the chosen representative
    normal: tuple
    distance: int
    area: int
    canonical_form: tuple
    lengths: tuple  # edge i joins vertex i to vertex i+1
    angles: tuple  # corner angle at vertex i
    coords2d: tuple


@dataclass(frozen=True)
class TorusDecomposition:
    """Faces of a sail modulo its unit group, with every integer invariant."""

    matrix: tuple
    orthant: str
    faces: tuple  # FaceCell
    gluing: tuple  # ((f, s), (g, t)) pairs, each unordered edge once
    edge_angles: tuple  # per entry of ``gluing``: integer angle between the two face planes
    vertex_orbits: tuple  # tuples of (face, corner)

    @property
    def counts(self) -> tuple[int, int, int]:
        return len(self.vertex_orbits), len(self.gluing), len(self.faces)

    @property
    def euler(self) -> int:
        v, e, f = self.counts
        return v - e + f

    def glue_map(self) -> dict:
        out = {}
        for (a, b) in self.gluing:
            out[a] = b
            out[b] = a
        return out

    def edge_angle_map(self) -> dict:
        out = {}
        for (a, b), ang in zip(self.gluing, self.edge_angles):
            out[a] = ang
            out[b] = ang
        return out


def face_cell(face: Face) -> FaceCell:
    pl = plane_lattice_basis(*face.vertices[:3])
    c2 = tuple(tuple(pl.coords(v)) for v in face.vertices)
    n = len(face)
    vs = face.vertices
    lengths = tuple(integer_length(vs[i], vs[(i + 1) % n]) for i in range(n))
    angles = tuple(integer_angle(vs[i], vs[i - 1], vs[(i + 1) % n]) for i in range(n))
    return FaceCell(
        vertices=vs,
        normal=face.normal,
        distance=integer_distance_to_origin(face),
        area=integer_area(c2),
        canonical_form=affine_canonical_form(c2),
        lengths=lengths,
        angles=angles,
        coords2d=c2,
    )


def quotient(patch: SailPatch) -> TorusDecomposition:
    reps = patch.representatives()
    cells = tuple(face_cell(f) for f in reps)
    glue = {k: (v[0], v[1]) for k, v in patch.gluing.items()}
    nslots = sum(len(f) for f in reps)
    if len(glue) != nslots:
        raise QuotientInconsistent("some edges are not glued")
    for a, b in glue.items():
        if glue.get(b) != a:
            raise QuotientInconsistent(f"gluing is not an involution at {a}")
        if a == b:
            raise QuotientInconsistent(f"edge {a} glued to itself")
    pairs = []
    angles = []
    for a in sorted(glue):
        b = glue[a]
        if a < b:
            pairs.append((a, b))
            f = reps[a[0]]
            nb = patch.neighbour[a]
            kind, val = integer_distance_or_angle_between_planes(f, nb)
            if kind != "angle":  # pragma: no cover - adjacent faces share an edge
                raise QuotientInconsistent("adjacent faces do not meet")
            angles.append(val)
    # vertex orbits: edge (f, s) runs from corner s to s+1 and is glued reversed
    parent: dict = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for (f, s), (g, t) in pairs:
        nf, ng = len(reps[f]), len(reps[g])
        union((f, s), (g, (t + 1) % ng))
        union((f, (s + 1) % nf), (g, t))
    corners = [(f, i) for f in range(len(reps)) for i in range(len(reps[f]))]
    groups: dict = {}
    for c in corners:
        groups.setdefault(find(c), []).append(c)
    vorb = tuple(sorted(tuple(sorted(g)) for g in groups.values()))
    td = TorusDecomposition(
        matrix=patch.matrix,
        orthant=str(patch.orthant),
        faces=cells,
        gluing=tuple(pairs),
        edge_angles=tuple(angles),
        vertex_orbits=vorb,
    )
    if td.euler != 0:
        raise QuotientInconsistent(f"Euler characteristic {td.euler}, expected 0")
    return td


# -- certificates -----------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Certificate:
    data: bytes

    def hex(self) -> str:
        return self.data.hex()

    def digest(self) -> str:
        return hashlib.sha256(self.data).hexdigest()


def _local(cell: FaceCell, slot: int, d: int) -> tuple[list[int], list[int]]:
    """Corner order and edge-slot order of a face entered through ``slot``."""
    n = len(cell.vertices)
    if d > 0:
        corners = [(slot + k) % n for k in range(n)]
        edges = [(slot + k) % n for k in range(n)]
    else:
        corners = [(slot + 1 - k) % n for k in range(n)]
        edges = [(slot - k) % n for k in range(n)]
    return corners, edges


def _encode_from(td: TorusDecomposition, glue: dict, eang: dict, start: tuple) -> tuple:
    labels = {start[0]: 0}
    entry = {start[0]: (start[1], start[2])}
    queue = [start[0]]
    out = []
    k = 0
    while k < len(queue):
        f = queue[k]
        k += 1
        cell = td.faces[f]
        slot, d = entry[f]
        corners, edges = _local(cell, slot, d)
        form = framed_coords([cell.coords2d[c] for c in corners])
        lengths = tuple(cell.lengths[e] for e in edges)
        angles = tuple(cell.angles[c] for c in corners)
        adj = []
        for e in edges:
            g, t = glue[(f, e)]
            if g not in labels:
                labels[g] = len(labels)
                entry[g] = (t, d)
                queue.append(g)
            gs, gd = entry[g]
            _, gedges = _local(td.faces[g], gs, gd)
            adj.append((labels[g], gedges.index(t), eang[(f, e)]))
        out.append((len(corners), cell.distance, cell.area, form, lengths, angles, tuple(adj)))
    return tuple(out)


def certificate(td: TorusDecomposition) -> Certificate:
    glue = td.glue_map()
    eang = td.edge_angle_map()
    best = None
    for f, cell in enumerate(td.faces):
        for s in range(len(cell.vertices)):
            for d in (1, -1):
                enc = _encode_from(td, glue, eang, (f, s, d))
                if best is None or enc < best:
                    best = enc
    v, e, nf = td.counts
    body = json.dumps([[v, e, nf], best], separators=(",", ":"))
    return Certificate(b"cert-v1:" + body.encode())


def sail_certificate(a, orthant, **kw) -> tuple[Certificate, TorusDecomposition, SailPatch]:
    from .sail import stable_sail_patch

    patch = stable_sail_patch(a, orthant, **kw)
    td = quotient(patch)
    return certificate(td), td, patch


def fraction_certificate(a, jobs: int = 1, **kw) -> tuple:
    """Sorted certificates of all eight sails (four computed, each counted twice)."""
    from .spectral import Orthant

    reps = Orthant.representatives()
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=min(jobs, len(reps))) as ex:
            certs = list(ex.map(_cert_only, [(a, o, kw) for o in reps]))
    else:
        certs = [_cert_only((a, o, kw)) for o in reps]
    return tuple(sorted(certs + certs))


def _cert_only(args) -> Certificate:
    a, o, kw = args
    return sail_certificate(a, o, **kw)[0]
