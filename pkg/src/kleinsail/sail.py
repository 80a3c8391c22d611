"""Certified finite patches of Klein sails.

A sail is the boundary of the convex hull of the nonzero integer points of
one open orthant of the eigen-decomposition of a hyperbolic operator.  The
construction here samples cone points of small norm, takes their exact
convex hull, and then certifies each candidate face directly: every integer
point of the simplex cut from the cone by the face plane is enumerated, so a
face is only admitted when no lattice point lies beneath it.  Faces are
grouped into orbits of the full positive unit group by exact matrix tests,
and the construction stops once every orbit has a representative whose
neighbours are all certified.  Floating point is used to pick sample
regions and to order work, never to decide membership, orientation or
equivalence.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import mpmath
import numpy as np

from . import _kernels
from .exact import refine
from .linalg import (
    Mat3,
    cross,
    det3,
    dot,
    mat_inv,
    mat_mul,
    mat_pow,
    mat_vec,
    primitive,
    sub,
    to_int,
    unimodular_completion,
    vec_mat,
)
from .spectral import (
    EigenData,
    Orthant,
    _approx,
    _dot_interval,
    dual_interior,
    edge_signs,
    eigen_structure,
    float_frame,
    in_orthant,
    norm_form,
    sign_of_form,
)
from .units import UnitPair, krylov_inverse, unit_group, unit_mapping

log = logging.getLogger(__name__)

Vec3 = tuple


class DegenerateInput(ValueError):
    """All points are coplanar (or there are fewer than four)."""


class NonTermination(RuntimeError):
    """The growth schedule ran out before the patch closed up."""


# -- faces ----------------------------------------------------------------------------


def plane_frame(n: Sequence[int]) -> tuple[Vec3, Vec3]:
    """Basis (u, w) of the lattice n^perp with u x w == n, for primitive n."""
    _, u, w = unimodular_completion(n)
    if tuple(cross(u, w)) != tuple(n):
        w = tuple(-x for x in w)
    return u, w


def plane_coords(n: Sequence[int], frame, anchor: Sequence[int], p: Sequence[int]) -> tuple[int, int]:
    u, w = frame
    d = sub(p, anchor)
    nn = dot(n, n)
    return dot(cross(d, w), n) // nn, dot(cross(u, d), n) // nn


def _cross2(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_polygon_2d(pts: Iterable[tuple]) -> list[int]:
    """Indices of the strict convex hull of 2D integer points, counter-clockwise."""
    pts = list(pts)
    order = sorted(range(len(pts)), key=lambda i: pts[i])
    uniq = []
    for i in order:
        if not uniq or pts[uniq[-1]] != pts[i]:
            uniq.append(i)
    if len(uniq) < 3:
        return uniq
    lower: list[int] = []
    for i in uniq:
        while len(lower) >= 2 and _cross2(pts[lower[-2]], pts[lower[-1]], pts[i]) <= 0:
            lower.pop()
        lower.append(i)
    upper: list[int] = []
    for i in reversed(uniq):
        while len(upper) >= 2 and _cross2(pts[upper[-2]], pts[upper[-1]], pts[i]) <= 0:
            upper.pop()
        upper.append(i)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class Face:
    """Convex lattice polygon with its supporting plane ``normal . x == offset``.

    ``normal`` is primitive and the vertex cycle runs counter-clockwise when
    viewed against ``normal``.  For sail faces the normal points away from the
    origin, so ``offset`` is positive and ``det(v0, v1, v2) > 0``.
    """

    vertices: tuple
    normal: tuple
    offset: int

    @classmethod
    def from_points(cls, points: Iterable[Sequence[int]], normal: Sequence[int]) -> "Face":
        pts = sorted({tuple(p) for p in points})
        n = tuple(normal)
        c = dot(n, pts[0])
        frame = plane_frame(n)
        coords = [plane_coords(n, frame, pts[0], p) for p in pts]
        idx = convex_polygon_2d(coords)
        if len(idx) < 3:
            raise DegenerateInput("face is degenerate")
        cyc = [pts[i] for i in idx]
        k = cyc.index(min(cyc))
        return cls(tuple(cyc[k:] + cyc[:k]), n, c)

    @property
    def key(self) -> frozenset:
        return frozenset(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def edges(self) -> list[tuple]:
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def frame(self) -> tuple[Vec3, Vec3]:
        return plane_frame(self.normal)

    def coords2d(self) -> list[tuple[int, int]]:
        fr = self.frame()
        return [plane_coords(self.normal, fr, self.vertices[0], v) for v in self.vertices]

    def contains(self, p: Sequence[int]) -> bool:
        """Point of the supporting plane inside the closed polygon."""
        if dot(self.normal, p) != self.offset:
            return False
        fr = self.frame()
        cs = self.coords2d()
        q = plane_coords(self.normal, fr, self.vertices[0], p)
        return all(_cross2(cs[i], cs[(i + 1) % len(cs)], q) >= 0 for i in range(len(cs)))

    def transform(self, g: Mat3) -> "Face":
        """Image under an integer matrix of determinant one."""
        vs = [tuple(mat_vec(g, v)) for v in self.vertices]
        n = tuple(to_int((vec_mat(self.normal, mat_inv(g)),))[0])
        k = vs.index(min(vs))
        return Face(tuple(vs[k:] + vs[:k]), n, self.offset)


# -- exact 3D hull ------------------------------------------------------------------


def orient3(a, b, c, d) -> int:
    return det3((sub(b, a), sub(c, a), sub(d, a)))


def convex_hull_3d(points: Iterable[Sequence[int]]) -> list[Face]:
    """Facets of the convex hull of integer points, coplanar triangles merged.

    Normals point outward.  Incremental insertion with conflict lists; every
    predicate is an exact integer determinant.
    """
    pts = sorted({tuple(int(x) for x in p) for p in points})
    if len(pts) < 4:
        raise DegenerateInput("need at least four points")
    p0 = pts[0]
    i1 = next((i for i, p in enumerate(pts) if p != p0), None)
    if i1 is None:
        raise DegenerateInput("all points coincide")
    p1 = pts[i1]
    i2 = next((i for i, p in enumerate(pts) if any(cross(sub(p1, p0), sub(p, p0)))), None)
    if i2 is None:
        raise DegenerateInput("all points are collinear")
    p2 = pts[i2]
    i3 = next((i for i, p in enumerate(pts) if orient3(p0, p1, p2, p) != 0), None)
    if i3 is None:
        raise DegenerateInput("all points are coplanar")
    tris = _hull_triangles(pts, (0, i1, i2, i3))
    groups: dict = {}
    for a, b, c in tris:
        m = cross(sub(pts[b], pts[a]), sub(pts[c], pts[a]))
        m = primitive(m)
        key = (m, dot(m, pts[a]))
        groups.setdefault(key, set()).update((a, b, c))
    faces = [Face.from_points([pts[i] for i in idx], key[0]) for key, idx in groups.items()]
    faces.sort(key=lambda f: (f.normal, f.offset))
    return faces


def _hull_triangles(pts: list, init: tuple) -> list[tuple]:
    a, b, c, d = init
    faces: dict[int, tuple] = {}
    edge: dict[tuple, int] = {}
    conflict: dict[int, list] = {}
    seen_by: list[set] = [set() for _ in pts]
    nxt = 0

    def add_face(i, j, k):
        nonlocal nxt
        fid = nxt
        nxt += 1
        faces[fid] = (i, j, k)
        edge[(i, j)] = fid
        edge[(j, k)] = fid
        edge[(k, i)] = fid
        return fid

    for tri, other in (((a, b, c), d), ((a, b, d), c), ((a, c, d), b), ((b, c, d), a)):
        i, j, k = tri
        if orient3(pts[i], pts[j], pts[k], pts[other]) > 0:
            i, j = j, i
        add_face(i, j, k)
    initial = set(init)
    for fid, (i, j, k) in faces.items():
        conflict[fid] = []
    rest = [p for p in range(len(pts)) if p not in initial]
    for fid, (i, j, k) in list(faces.items()):
        vis = _kernels.visible(pts, i, j, k, rest)
        conflict[fid] = vis
        for p in vis:
            seen_by[p].add(fid)

    for p in rest:
        vis = seen_by[p]
        if not vis:
            continue
        vis = set(vis)
        horizon = []
        for fid in vis:
            i, j, k = faces[fid]
            for u, v in ((i, j), (j, k), (k, i)):
                g = edge[(v, u)]
                if g not in vis:
                    horizon.append((u, v, fid, g))
        for fid in vis:
            i, j, k = faces.pop(fid)
            for u, v in ((i, j), (j, k), (k, i)):
                if edge.get((u, v)) == fid:
                    del edge[(u, v)]
        cand_of = {}
        for u, v, fid, g in horizon:
            cand = set(conflict[fid])
            cand.update(conflict[g])
            cand_of[(u, v)] = cand
        for fid in vis:
            for q in conflict.pop(fid):
                seen_by[q].discard(fid)
        for u, v, fid, g in horizon:
            nf = add_face(u, v, p)
            cand = sorted(q for q in cand_of[(u, v)] if q != p and seen_by[q] is not None)
            vis_q = _kernels.visible(pts, u, v, p, cand)
            conflict[nf] = vis_q
            for q in vis_q:
                seen_by[q].add(nf)
        seen_by[p] = set()
    return list(faces.values())


# -- exact enumeration of cone slabs -------------------------------------------


@dataclass(frozen=True)
class _SlabGeometry:
    z: Vec3
    u: Vec3
    w: Vec3
    a_lo: object  # Fraction: min over edge rays of the a-coordinate at level 1
    a_hi: object
    lower: tuple  # (zeta_lo, zeta_hi, ups_lo, ups_hi) scaled, for b > bound
    upper: tuple
    shift: int


def _ratio_interval(num, den):

    nl, nh = num
    dl, dh = den
    if dl <= 0 <= dh:
        return None
    cands = [Fraction(x, y) for x in (nl, nh) for y in (dl, dh)]
    return min(cands), max(cands)


def _section_basis(e: EigenData, orthant: Orthant, n: Sequence[int], u: Vec3, w: Vec3) -> tuple[Vec3, Vec3]:
    """Gauss-reduce the level-plane lattice basis against the shape of the cone section.

    Any unimodular change of (u, w) is exact; the float metric only decides
    which basis keeps the number of enumerated rows small.
    """
    _, vec = float_frame(e)
    sig = edge_signs(e, orthant)
    pts = []
    for s_, v in zip(sig, vec):
        r = np.array([s_ * x for x in v])
        pts.append(r / float(np.dot(n, r)))
    shape = np.array([pts[0] - pts[2], pts[1] - pts[2]]).T

    def q(d):
        sol = np.linalg.lstsq(shape, np.array(d, dtype=float), rcond=None)[0]
        return float(sol @ sol)

    def bq(d1, d2):
        s1 = np.linalg.lstsq(shape, np.array(d1, dtype=float), rcond=None)[0]
        s2 = np.linalg.lstsq(shape, np.array(d2, dtype=float), rcond=None)[0]
        return float(s1 @ s2)

    for _ in range(200):
        if q(u) > q(w):
            u, w = w, u
        qu = q(u)
        if qu == 0:
            break
        k = round(bq(u, w) / qu)
        if k == 0:
            break
        w = tuple(wi - k * ui for wi, ui in zip(w, u))
    # the inner loop runs along w, so w gets the short vector: thin sections
    # then cost one row per lattice line they cross
    return w, u


def _slab_geometry(e: EigenData, orthant: Orthant, n: Sequence[int]) -> _SlabGeometry:
    z, u, w = unimodular_completion(n)
    u, w = _section_basis(e, orthant, n, u, w)
    minv = mat_inv(tuple(tuple(col[i] for col in (z, u, w)) for i in range(3)))
    ra = minv[1]
    sig = edge_signs(e, orthant)
    bits = 64
    while True:
        ap = _approx(e, bits)
        ok = True
        a_lo = a_hi = None
        for i in range(3):
            num = _dot_interval(ap.vec[i], ra)
            den = _dot_interval(ap.vec[i], n)
            if sig[i] < 0:
                num = (-num[1], -num[0])
                den = (-den[1], -den[0])
            r = _ratio_interval(num, den)
            if r is None or den[1] <= 0:
                ok = False
                break
            a_lo = r[0] if a_lo is None else min(a_lo, r[0])
            a_hi = r[1] if a_hi is None else max(a_hi, r[1])
        lower, upper = [], []
        if ok:
            shift = 2 * bits
            for j, s in enumerate(orthant.signs):
                zz = _dot_interval(ap.cov[j], z)
                uu = _dot_interval(ap.cov[j], u)
                ww = _dot_interval(ap.cov[j], w)
                if s < 0:
                    zz, uu, ww = ((-t[1], -t[0]) for t in (zz, uu, ww))
                rz = _ratio_interval(zz, ww)
                ru = _ratio_interval(uu, ww)
                if rz is None or ru is None:
                    ok = False
                    break
                scaled = (
                    math.floor(rz[0] * 2**shift),
                    math.ceil(rz[1] * 2**shift),
                    math.floor(ru[0] * 2**shift),
                    math.ceil(ru[1] * 2**shift),
                )
                (lower if ww[0] > 0 else upper).append(scaled)
        if ok and lower and upper:
            return _SlabGeometry(z, u, w, a_lo, a_hi, tuple(lower), tuple(upper), shift)
        bits *= 2
        if bits > 4096:
            raise ValueError("covector is not in the interior of the dual cone")


def cone_points(e: EigenData, orthant: Orthant, n: Sequence[int], hi: int, lo: int = 1) -> list[Vec3]:
    """Every integer point x of the open orthant with ``lo <= n . x <= hi``.

    ``n`` must be strictly positive on the closed cone, so each level set is
    a bounded triangle.  Coordinate ranges come from outward-rounded
    dyadic intervals and every candidate is confirmed exactly.
    """
    n = tuple(n)
    if not dual_interior(e, orthant, n):
        raise ValueError("covector is not in the interior of the dual cone")
    g = math.gcd(*n)
    if g != 1:
        n = tuple(x // g for x in n)
        lo = -((-lo) // g)
        hi = hi // g
    geo = _slab_geometry(e, orthant, n)
    out = []
    for h, a, b in _kernels.slab_candidates(
        max(lo, 1), hi, geo.a_lo, geo.a_hi, geo.lower, geo.upper, geo.shift
    ):
        x = tuple(h * zi + a * ui + b * wi for zi, ui, wi in zip(geo.z, geo.u, geo.w))
        if in_orthant(e, orthant, x):
            out.append(x)
    return out


def slab_size_estimate(e: EigenData, orthant: Orthant, n: Sequence[int], c: int) -> float:
    """Approximate number of lattice points with ``n . x <= c`` in the cone."""
    _, vec = float_frame(e)
    sig = edge_signs(e, orthant)
    rays = [[s * x for x in v] for s, v in zip(sig, vec)]
    den = 1.0
    for r in rays:
        den *= abs(sum(a * b for a, b in zip(n, r)))
    vol = abs(float(np.linalg.det(np.array(rays)))) * c**3 / (6 * den) if den else math.inf
    return vol


# -- certification ----------------------------------------------------------------


@dataclass(frozen=True)
class FaceCheck:
    status: str  # "genuine", "violated" or "too-large"
    violators: tuple = ()


def certify_face(e: EigenData, orthant: Orthant, face: Face, cap: float = 4e5) -> FaceCheck:
    """Decide whether ``face`` is a face of the sail, exactly.

    The face is genuine iff no cone point lies strictly between the origin
    and its plane, and every cone point on the plane lies in the polygon.
    """
    if slab_size_estimate(e, orthant, face.normal, face.offset) > cap:
        return FaceCheck("too-large")
    bad = []
    for x in cone_points(e, orthant, face.normal, face.offset):
        if dot(face.normal, x) < face.offset or not face.contains(x):
            bad.append(x)
    if bad:
        return FaceCheck("violated", tuple(sorted(bad)))
    return FaceCheck("genuine")


# -- sampling -----------------------------------------------------------------------


def _seed_point(e: EigenData, orthant: Orthant) -> Vec3:
    f = norm_form(e)
    found = None
    r = 1
    while True:
        cands = []
        for x in range(-r, r + 1):
            for y in range(-r, r + 1):
                for z in range(-r, r + 1):
                    if max(abs(x), abs(y), abs(z)) == r and in_orthant(e, orthant, (x, y, z)):
                        cands.append((abs(f((x, y, z))), abs(x) + abs(y) + abs(z), (x, y, z)))
        if cands:
            best = min(cands)
            if found is None or best < found:
                found = best
        if found is not None and r >= 2 and r > found[1]:
            return found[2]
        r += 1


class _LogFrame:
    """Float log-coordinates of cone points relative to the unit lattice (guidance only)."""

    def __init__(self, e: EigenData, orthant: Orthant, pair: UnitPair):
        cov, _ = float_frame(e)
        self.e = e
        self.cov = np.array([[s * c for c in row] for s, row in zip(orthant.signs, cov)])
        self._mp_roots = None
        self.lu = np.array(pair.log_u)
        self.lv = np.array(pair.log_v)
        self.basis = np.array([self.lu, self.lv]).T

    def logs(self, pts: np.ndarray) -> np.ndarray:
        y = pts.astype(float) @ self.cov.T
        return np.log(np.abs(y))

    def precise_logs(self, p: Sequence[int]) -> list[float]:
        """Log-coordinates of one point at 80 digits, for points where floats cancel."""
        with mpmath.workdps(80):
            if self._mp_roots is None:
                rs = [refine(r, Fraction(1, 2**300)) for r in self.e.roots]
                self._mp_roots = [mpmath.mpf(r.midpoint().numerator) / r.midpoint().denominator for r in rs]
            out = []
            for i, lam in enumerate(self._mp_roots):
                q = self.e.covector_at(i, p)
                val = sum(c * lam**j for j, c in enumerate(q))
                out.append(float(mpmath.log(abs(val))) if val else -math.inf)
            return out

    def cell(self, ly: np.ndarray, t0: np.ndarray) -> np.ndarray:
        t = ly - ly.mean(axis=-1, keepdims=True) - t0
        return np.linalg.lstsq(self.basis, t.T, rcond=None)[0].T


def generate_candidates(
    e: EigenData,
    orthant: Orthant,
    pair: UnitPair,
    bound: int,
    radius: int,
    seed: Optional[Vec3] = None,
    spacing: float = 0.6,
) -> set:
    """Cone points of norm at most ``bound`` over a block of unit-lattice cells.

    A base cell around ``seed`` is covered by log-space windows; each window
    is searched exactly with a slab functional adapted to it.  The base set is
    then moved by ``U^a V^b`` for ``|a|, |b| <= radius``.
    """
    if bound < 1 or radius < 0:
        raise ValueError("bound must be >= 1 and radius >= 0")
    f = norm_form(e)
    seed = seed or _seed_point(e, orthant)
    lf = _LogFrame(e, orthant, pair)
    scale = abs(float(f.scale))
    ly0 = lf.logs(np.array([seed]))[0]
    t0 = ly0 - ly0.mean()
    ku = max(1, math.ceil(np.abs(lf.lu).max() / spacing))
    kv = max(1, math.ceil(np.abs(lf.lv).max() / spacing))
    rad = 0.5 * (np.abs(lf.lu).max() / ku + np.abs(lf.lv).max() / kv)
    pmax = bound / scale
    phi = 3 * pmax ** (1 / 3) * math.exp(rad) * 1.02
    base = set()
    for i in range(ku):
        for j in range(kv):
            al = -0.5 + (i + 0.5) / ku
            be = -0.5 + (j + 0.5) / kv
            tc = t0 + al * lf.lu + be * lf.lv
            fl = (np.exp(-tc)[:, None] * lf.cov).sum(axis=0)
            k = 64.0 / np.abs(fl).max()
            while True:
                n = tuple(int(round(x)) for x in k * fl)
                if math.gcd(*n) and dual_interior(e, orthant, n):
                    break
                k *= 2
            # the rounded functional is within a small relative error of fl on the cone
            hi = int(math.ceil(k * phi * 1.05)) + 2
            for x in cone_points(e, orthant, n, hi):
                if abs(f(x)) <= bound:
                    base.add(x)
    out = set(base)
    mats = {}
    for a in range(-radius, radius + 1):
        for b in range(-radius, radius + 1):
            if a == 0 and b == 0:
                continue
            g = mats.setdefault((a, b), pair.element(a, b))
            for x in base:
                out.add(tuple(mat_vec(g, x)))
    return out


def pareto_minimal(e: EigenData, orthant: Orthant, points: Iterable[Vec3], lf: _LogFrame) -> list[Vec3]:
    """Points not of the form q + c with q another point and c in the cone.

    Dominated points never touch the sail.  Floats nominate dominating
    partners; every removal is confirmed by an exact cone-membership test.
    """
    pts = sorted(set(points))
    if not pts:
        return []
    arr = np.array(pts, dtype=object)
    ly = _logs_safe(lf, pts)
    order = np.argsort(ly.sum(axis=1), kind="stable")

    def dominated(i: int, cands: Sequence[int]) -> bool:
        p = pts[i]
        for j in cands:
            d = sub(p, pts[j])
            if any(d) and in_orthant(e, orthant, d):
                return True
        return False

    keep = _kernels.pareto_filter(ly, order, dominated)
    return [pts[i] for i in sorted(keep)]


def _logs_safe(lf: _LogFrame, pts: Sequence[Vec3]) -> np.ndarray:
    """Float log-coordinates, recomputed at high precision where floats cancel."""
    size = np.array([float(max(abs(x) for x in p)) for p in pts])
    small = size <= 2.0**50
    out = np.full((len(pts), 3), -np.inf)
    if small.any():
        arr = np.array([pts[i] for i in np.flatnonzero(small)], dtype=float)
        y = np.abs(arr @ lf.cov.T)
        with np.errstate(divide="ignore"):
            out[small] = np.log(y)
    # float error is about 1e-16 * size; trust only values well above it
    with np.errstate(divide="ignore"):
        suspect = ~small | (out < np.log(size * 1e-9)[:, None]).any(axis=1)
    for i in np.flatnonzero(suspect):
        out[i] = lf.precise_logs(pts[i])
    return out


# -- the patch ------------------------------------------------------------------------


@dataclass
class SailPatch:
    """Certified faces of one sail together with their orbit structure.

    ``faces`` holds every certified face that was found.  ``fundamental``
    lists one representative per orbit of the positive unit group (indices
    into ``faces``).  ``gluing[(r, i)] = (s, j, g)`` says that edge ``i`` of
    representative ``r`` borders a face which ``g`` carries onto
    representative ``s``, the shared edge landing on edge ``j`` of ``s``.
    ``neighbour[(r, i)]`` is that bordering face in sail coordinates.
    """

    matrix: Mat3
    orthant: Orthant
    pair: UnitPair
    faces: list
    fundamental: list
    gluing: dict
    neighbour: dict
    unit_invariance: bool
    bound: int
    radius: int
    steps: int
    stats: dict = field(default_factory=dict)

    def representatives(self) -> list[Face]:
        return [self.faces[i] for i in self.fundamental]

    def to_obj(self) -> str:
        """OBJ-style text dump of all certified faces (non-normative)."""
        verts: dict = {}
        lines = ["# kleinsail patch (non-normative)", f"# orthant {self.orthant}"]
        for f in self.faces:
            for v in f.vertices:
                if v not in verts:
                    verts[v] = len(verts) + 1
                    lines.append("v %d %d %d" % v)
        for f in self.faces:
            lines.append("f " + " ".join(str(verts[v]) for v in f.vertices))
        return "\n".join(lines) + "\n"


def _face_signature(f: Face) -> tuple:
    lens = sorted(math.gcd(*sub(b, a)) for a, b in f.edges())
    return (len(f), f.offset, tuple(lens))


class _OrbitIndex:
    """Orbit bookkeeping for certified faces under the positive unit group."""

    def __init__(self, a: Mat3):
        self.a = a
        self.reps: list[Face] = []
        self.by_sig: dict = {}
        self.kinv: dict = {}

    def _kinv(self, v):
        k = self.kinv.get(v)
        if k is None:
            k = self.kinv[v] = krylov_inverse(self.a, v)
        return k

    def unit_between(self, f: Face, g: Face) -> Optional[Mat3]:
        """Positive unit carrying f onto g, or None."""
        if len(f) != len(g) or f.offset != g.offset:
            return None
        v0 = f.vertices[0]
        target = g.key
        kinv = self._kinv(v0)
        for w in g.vertices:
            m = unit_mapping(self.a, v0, w, kinv)
            if m is None:
                continue
            if all(tuple(mat_vec(m, v)) in target for v in f.vertices[1:]):
                return m
        return None

    def find(self, f: Face) -> Optional[tuple[int, Mat3]]:
        for r in self.by_sig.get(_face_signature(f), []):
            g = self.unit_between(f, self.reps[r])
            if g is not None:
                return r, g
        return None

    def add(self, f: Face) -> int:
        r = len(self.reps)
        self.reps.append(f)
        self.by_sig.setdefault(_face_signature(f), []).append(r)
        return r


def lower_faces(e: EigenData, orthant: Orthant, hull: Sequence[Face]) -> list[Face]:
    """Hull facets facing the origin, re-expressed with normals pointing into the cone."""
    out = []
    for f in hull:
        n = tuple(-x for x in f.normal)
        if dual_interior(e, orthant, n):
            vs = list(reversed(f.vertices))
            k = vs.index(min(vs))
            out.append(Face(tuple(vs[k:] + vs[:k]), n, -f.offset))
    return out


def stable_sail_patch(
    a: Mat3,
    orthant: Orthant,
    *,
    bound: int = 16,
    radius: int = 2,
    max_steps: int = 8,
    cert_cap: float = 4e5,
) -> SailPatch:
    """Grow a certified sail patch until its face orbits close up."""
    e = eigen_structure(a)
    _, pair = unit_group(a)
    seed = _seed_point(e, orthant)
    lf = _LogFrame(e, orthant, pair)
    extra: set = set()
    b, r = bound, radius
    for step in range(1, max_steps + 1):
        pts = generate_candidates(e, orthant, pair, b, r, seed)
        pts |= _translates(pair, extra, r)
        res = _attempt(e, orthant, pair, pts, lf, seed, cert_cap)
        if isinstance(res, SailPatch):
            res.bound, res.radius, res.steps = b, r, step
            return res
        extra |= res
        log.info("orthant %s: step %d (B=%d, R=%d) not closed", orthant, step, b, r)
        b *= 2
        r += 1
    raise NonTermination(
        f"sail of orthant {orthant} did not close after {max_steps} growth steps (B={b // 2}, R={r - 1})"
    )


def _translates(pair: UnitPair, pts: set, r: int) -> set:
    out = set(pts)
    for a in range(-r, r + 1):
        for b in range(-r, r + 1):
            if a or b:
                g = pair.element(a, b)
                out.update(tuple(mat_vec(g, x)) for x in pts)
    return out


CENTRAL_RADIUS = 0.55


def _attempt(e, orthant, pair, pts, lf, seed, cap):
    """One closure attempt; returns a SailPatch or a set of new sample points."""
    minimal = pareto_minimal(e, orthant, pts, lf)
    try:
        hull = convex_hull_3d(minimal)
    except DegenerateInput:
        return {seed}
    faces = lower_faces(e, orthant, hull)
    if not faces:
        return {seed}
    # central faces first
    ly0 = lf.logs(np.array([seed]))[0]
    t0 = ly0 - ly0.mean()
    cents = []
    for f in faces:
        ly = _logs_safe(lf, list(f.vertices)).mean(axis=0)
        c = lf.cell(ly[None, :], t0)[0]
        cents.append(float(max(abs(c[0]), abs(c[1]))))
    order = sorted(range(len(faces)), key=lambda i: (cents[i], faces[i].vertices))

    edge_owner: dict = {}
    for i, f in enumerate(faces):
        for s, (p, q) in enumerate(f.edges()):
            edge_owner.setdefault(frozenset((p, q)), []).append((i, s))

    def neighbour(i, s):
        p, q = faces[i].edges()[s]
        for j, t in edge_owner[frozenset((p, q))]:
            if j != i:
                return j, t
        return None

    # every orbit has a member whose log-centre lies within half a cell of the
    # seed; only those and their neighbours are worth certifying
    central = [i for i in order if cents[i] <= CENTRAL_RADIUS]
    wanted = set(central)
    for i in central:
        for s in range(len(faces[i])):
            nb = neighbour(i, s)
            if nb is not None:
                wanted.add(nb[0])

    orbits = _OrbitIndex(e.matrix)
    status: dict[int, tuple] = {}  # face idx -> ("genuine", rep, g) | ("bad",) | ("unknown",)
    new_points: set = set()
    for i in order:
        if i not in wanted:
            status[i] = ("unknown",)
            continue
        f = faces[i]
        hit = orbits.find(f)
        if hit is not None:
            status[i] = ("genuine",) + hit
            continue
        chk = certify_face(e, orthant, f, cap)
        if chk.status == "genuine":
            r = orbits.add(f)
            status[i] = ("genuine", r, ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
        elif chk.status == "violated":
            status[i] = ("bad",)
            new_points.update(chk.violators)
        else:
            status[i] = ("unknown",)

    # a complete member of each orbit: all neighbours certified
    complete: dict[int, int] = {}
    for i in central:
        st = status[i]
        if st[0] != "genuine" or st[1] in complete:
            continue
        ok = True
        for s in range(len(faces[i])):
            nb = neighbour(i, s)
            if nb is None or status[nb[0]][0] != "genuine":
                ok = False
                break
        if ok:
            complete[st[1]] = i
    nrep = len(orbits.reps)
    if nrep == 0 or len(complete) < nrep:
        return new_points

    # express everything through the complete members
    rep_face = [faces[complete[r]] for r in range(nrep)]
    gluing: dict = {}
    neighbours: dict = {}
    for r in range(nrep):
        i = complete[r]
        f = faces[i]
        for s, (p, q) in enumerate(f.edges()):
            j, _ = neighbour(i, s)
            _, r2, g_to_rep = status[j]
            # move neighbour onto the chosen member of its orbit
            g_rep_to_member = orbits.unit_between(orbits.reps[r2], rep_face[r2])
            g = mat_mul(g_rep_to_member, g_to_rep)
            gp, gq = tuple(mat_vec(g, p)), tuple(mat_vec(g, q))
            tgt = rep_face[r2].edges()
            t = next(t for t, (x, y) in enumerate(tgt) if x == gq and y == gp)
            gluing[(r, s)] = (r2, t, g)
            neighbours[(r, s)] = faces[j]
    genuine = [faces[i] for i in order if status[i][0] == "genuine"]
    # images of certified faces under units are sail faces; they must also be hull faces here
    key_set = {f.key for f in faces}
    inv_ok = True
    for f in rep_face:
        for m in (pair.u, pair.v, mat_inv(pair.u), mat_inv(pair.v)):
            img = f.transform(to_int(m))
            if img.key not in key_set:
                inv_ok = False
    if not inv_ok:
        return new_points
    ordered = rep_face + [f for f in genuine if f.key not in {x.key for x in rep_face}]
    stats = {
        "sample": len(pts),
        "minimal": len(minimal),
        "hull_lower_faces": len(faces),
        "certified": sum(1 for s in status.values() if s[0] == "genuine"),
    }
    return SailPatch(
        e.matrix, orthant, pair, ordered, list(range(nrep)), gluing, neighbours, inv_ok, 0, 0, 0, stats
    )

