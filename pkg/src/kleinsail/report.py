"""Serialisation of sail analyses: cert-v1 JSON, text tables and SVG nets."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

from .linalg import Mat3, char_poly
from .sail import SailPatch
from .spectral import Orthant
from .torus import Certificate, TorusDecomposition, framed_coords, sail_certificate

SCHEMA_VERSION = "cert-v1"


@dataclass
class SailResult:
    orthant: Orthant
    certificate: Certificate
    decomposition: TorusDecomposition
    patch: SailPatch


def analyze_operator(a: Mat3, orthants: Optional[Sequence[Orthant]] = None, **kw) -> list[SailResult]:
    """Certified decompositions for the requested orthants (default: one per symmetric pair)."""
    out = []
    for o in orthants or Orthant.representatives():
        cert, td, patch = sail_certificate(a, o, **kw)
        out.append(SailResult(o, cert, td, patch))
    return out


def fraction_digest(certs: Sequence[Certificate]) -> str:
    h = hashlib.sha256()
    for c in sorted(certs):
        h.update(c.data)
        h.update(b"\n")
    return h.hexdigest()


def _mat(m) -> list:
    return [list(r) for r in m]


def _sail_json(r: SailResult, negate: bool) -> dict:
    td = r.decomposition
    s = -1 if negate else 1
    orth = -r.orthant if negate else r.orthant
    faces = []
    for f in td.faces:
        faces.append({
            "vertex_count": len(f.vertices),
            "vertices": [[s * x for x in v] for v in f.vertices],
            "normal": [s * x for x in f.normal],
            "distance": f.distance,
            "area": f.area,
            "lengths": list(f.lengths),
            "angles": list(f.angles),
            "affine_type": [list(p) for p in f.canonical_form],
        })
    edges = []
    for ((fa, sa), (fb, sb)), ang in zip(td.gluing, td.edge_angles):
        edges.append({
            "sides": [[fa, sa], [fb, sb]],
            "length": td.faces[fa].lengths[sa],
            "plane_angle": ang,
        })
    v, e, nf = td.counts
    return {
        "orthant": str(orth),
        "computed_from": str(r.orthant),
        "relation": "central symmetry" if negate else "direct",
        "counts": {"vertices": v, "edges": e, "faces": nf},
        "euler": td.euler,
        "faces": faces,
        "edges": edges,
        "vertex_orbits": [[list(c) for c in orb] for orb in td.vertex_orbits],
        "certificate": r.certificate.hex(),
        "certificate_sha256": r.certificate.digest(),
        "search": {
            "bound": r.patch.bound,
            "radius": r.patch.radius,
            "steps": r.patch.steps,
            "unit_invariance": r.patch.unit_invariance,
        },
    }


def certificate_document(a: Mat3, results: Sequence[SailResult]) -> dict:
    """The cert-v1 document; field order is fixed so output is byte-stable."""
    pair = results[0].patch.pair
    sails = []
    for r in results:
        sails.append(_sail_json(r, False))
        if r.orthant in Orthant.representatives():
            sails.append(_sail_json(r, True))
    complete = len(results) == 4 and {str(r.orthant) for r in results} == {
        str(o) for o in Orthant.representatives()
    }
    certs = [r.certificate for r in results]
    return {
        "schema": SCHEMA_VERSION,
        "operator": _mat(a),
        "char_poly": str(char_poly(a)),
        "unit_group": {
            "U": _mat(pair.u),
            "V": _mat(pair.v),
            "saturation": pair.status,
            "checked_primes": sorted(pair.saturation),
        },
        "sails": sails,
        "fraction_certificate": fraction_digest(certs + certs) if complete else None,
    }


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def load_schema() -> dict:
    text = resources.files("kleinsail").joinpath("schemas", "cert-v1.schema.json").read_text()
    return json.loads(text)


def _fmt_form(form) -> str:
    return " ".join(f"({a},{b})" for a, b in form)


def invariant_table(a: Mat3, results: Sequence[SailResult]) -> str:
    lines = [f"operator {_mat(a)}  char poly {char_poly(a)}"]
    for r in results:
        td = r.decomposition
        v, e, f = td.counts
        lines.append(f"sail {r.orthant} (and {-r.orthant}): V={v} E={e} F={f} certificate {r.certificate.digest()[:16]}")
        for i, c in enumerate(td.faces):
            kind = {3: "triangle", 4: "quadrangle", 5: "pentagon"}.get(len(c.vertices), f"{len(c.vertices)}-gon")
            lines.append(
                f"  face {i}: {kind:<10} area {c.area:<3} distance {c.distance:<3} "
                f"lengths {','.join(map(str, c.lengths))}  angles {','.join(map(str, c.angles))}  "
                f"type {_fmt_form(c.canonical_form)}"
            )
        for ((fa, sa), (fb, sb)), ang in zip(td.gluing, td.edge_angles):
            lines.append(f"  edge face {fa}.{sa} ~ face {fb}.{sb}: length {td.faces[fa].lengths[sa]}, plane angle {ang}")
    return "\n".join(lines) + "\n"


def svg_net(td: TorusDecomposition, scale: int = 40) -> str:
    """Faces of the quotient drawn side by side in their affine normal frames.

    Edge labels name the edge orbit, so equal labels are glued.  Presentation
    only; not part of any certificate.
    """
    label = {}
    for k, (x, y) in enumerate(td.gluing):
        label[x] = label[y] = k
    parts = []
    x0 = 20
    height = 0
    for i, f in enumerate(td.faces):
        # the stored cycle in the frame of its first edge keeps edge labels aligned
        pts = framed_coords(list(f.coords2d))
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        minx, maxy = min(xs), max(ys)
        w = (max(xs) - minx) * scale
        h = (maxy - min(ys)) * scale
        height = max(height, h)
        screen = [(x0 + (x - minx) * scale, 40 + (maxy - y) * scale) for x, y in pts]
        poly = " ".join(f"{x},{y}" for x, y in screen)
        parts.append(f'<polygon points="{poly}" fill="#dde8f4" stroke="#234" stroke-width="2"/>')
        n = len(screen)
        for s in range(n):
            (ax, ay), (bx, by) = screen[s], screen[(s + 1) % n]
            parts.append(
                f'<text x="{(ax + bx) / 2:.1f}" y="{(ay + by) / 2:.1f}" font-size="12" fill="#a22">e{label.get((i, s), "?")}</text>'
            )
        cx = sum(p[0] for p in screen) / n
        cy = sum(p[1] for p in screen) / n
        parts.append(
            f'<text x="{cx:.1f}" y="{cy:.1f}" font-size="12" text-anchor="middle">F{i} S={f.area} d={f.distance}</text>'
        )
        x0 += w + 60
    width = x0 + 20
    total_h = height + 100
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{total_h}" '
        f'viewBox="0 0 {width} {total_h}">\n<!-- non-normative presentation of sail {td.orthant}; '
        f"compare certificate JSON, not this file -->\n"
    )
    return head + "\n".join(parts) + "\n</svg>\n"
