"""Regenerate ``derived.json`` from oracles that share no code with kleinsail.

Run with ``python tests/oracles/derive.py``.  The output is committed; the
test-suite only reads it.  Everything here uses sympy, mpmath and brute force.
"""

import itertools
import json
import math
from pathlib import Path

import mpmath
import sympy as sp

mpmath.mp.dps = 60
x = sp.symbols("x")

GOLDEN = [[1, 1, 1], [1, 2, 2], [1, 2, 3]]
COMPANION_11 = [[0, 1, 0], [0, 0, 1], [1, 4, -11]]
CONJUGATOR = [[-1, -1, -2], [0, 0, -1], [1, 0, -1]]


def charpoly_high(m):
    p = sp.Matrix(m).charpoly(x)
    return [int(c) for c in p.all_coeffs()]


def real_roots(coeffs_high, digits=40):
    p = sp.Poly(coeffs_high, x)
    return sorted(sp.N(r, digits) for r in sp.real_roots(p))


def stars_and_bars_count(n):
    if n == 0:
        return 1
    return sum(math.comb(9, k) * 2**k * math.comb(n - 1, k - 1) for k in range(1, min(9, n) + 1))


def plane_points_index():
    # integer points of x+y+z=1 with |coords| <= 3, expressed from (1,0,0)
    # in the directions (-1,1,0), (-1,0,1): the index is the number of points
    # hit per fundamental cell, i.e. 1 iff every point has integer coordinates
    bad = 0
    for a, b in itertools.product(range(-3, 4), repeat=2):
        c = 1 - a - b
        if abs(c) > 3:
            continue
        s = sp.Matrix([[-1, -1], [1, 0], [0, 1]]).solve_least_squares(sp.Matrix([a - 1, b, c]))
        bad += any(not v.is_integer for v in s)
    return 1 if bad == 0 else None


def snf_index(rows):
    m = sp.Matrix(rows)
    from sympy.matrices.normalforms import smith_normal_form

    d = smith_normal_form(m, domain=sp.ZZ)
    prod = 1
    for i in range(min(d.shape)):
        prod *= abs(d[i, i])
    return int(prod)


def order_index(m):
    a = sp.Matrix(m)
    flat = [list(sp.eye(3)), list(a), list(a * a)]
    from sympy.matrices.normalforms import smith_normal_form

    d = smith_normal_form(sp.Matrix(flat), domain=sp.ZZ)
    return int(abs(d[0, 0] * d[1, 1] * d[2, 2]))


def norm_form_primitive(m):
    """Integer primitive cubic proportional to the product of the eigen-covectors."""
    a = sp.Matrix(m)
    X, Y, Z = sp.symbols("X Y Z")
    lam = sp.symbols("lam")
    p = a.charpoly(lam).as_expr()
    # rows of adj(lam I - A) are left eigenvectors; the product over the roots is a resultant
    adj = (lam * sp.eye(3) - a).adjugate()
    row = None
    for r in range(3):
        cand = [sp.rem(sp.expand(adj[r, c]), p, lam) for c in range(3)]
        if any(c != 0 for c in cand):
            row = cand
            break
    form = row[0] * X + row[1] * Y + row[2] * Z
    res = sp.resultant(p, sp.Symbol("T") - form, lam)
    f = sp.Poly(sp.expand(res.subs(sp.Symbol("T"), 0)), X, Y, Z)
    coeffs = [int(c) for c in f.coeffs()]
    g = 0
    for c in coeffs:
        g = math.gcd(g, c)
    return {str(mon): int(c) // g for mon, c in zip(f.monoms(), coeffs)}


def eval_form(form, v):
    total = 0
    for mon, c in form.items():
        i, j, k = eval(mon)
        total += c * v[0] ** i * v[1] ** j * v[2] ** k
    return total


def unit_regulator(m, box=5):
    """Regulator of the positive units of Z[A] found by brute force over small coordinates."""
    a = sp.Matrix(m)
    a2 = a * a
    am = mpmath.matrix(m)
    ev = sorted(mpmath.polyroots([mpmath.mpf(c) for c in charpoly_high(m)], maxsteps=200, extraprec=200))
    logs = []
    for c in itertools.product(range(-box, box + 1), repeat=3):
        u = c[0] * sp.eye(3) + c[1] * a + c[2] * a2
        if u.det() != 1:
            continue
        vals = [c[0] + c[1] * r + c[2] * r * r for r in ev]
        if all(v > 0 for v in vals):
            lv = [mpmath.log(v) for v in vals]
            if max(abs(t) for t in lv) > mpmath.mpf(10) ** -30:
                logs.append((lv[0], lv[1]))
    # lattice generated by the 2D log vectors; reduce to a basis via repeated Gauss steps
    best = None
    for (p, q) in itertools.combinations(logs, 2):
        d = abs(p[0] * q[1] - p[1] * q[0])
        if d > mpmath.mpf(10) ** -20 and (best is None or d < best):
            best = d
    return mpmath.nstr(best, 30)


def norm6_counts_by_field():
    """Hyperbolic norm-6 matrices grouped by the cubic field of their char poly.

    The field is identified by which of the three known field discriminants
    (49, 81, 148) divides the polynomial discriminant with a square cofactor.
    """
    counts = {}
    seen = {}
    for k in range(1, 7):
        for sup in itertools.combinations(range(9), k):
            for cuts in itertools.combinations(range(1, 6), k - 1):
                mags = [b - a for a, b in zip((0,) + cuts, cuts + (6,))]
                for signs in itertools.product((1, -1), repeat=k):
                    f = [0] * 9
                    for p, m, s in zip(sup, mags, signs):
                        f[p] = s * m
                    cp = tuple(charpoly_high([f[0:3], f[3:6], f[6:9]]))
                    if cp not in seen:
                        poly = sp.Poly(cp, x)
                        d = int(sp.discriminant(poly.as_expr(), x))
                        tag = None
                        if poly.is_irreducible and d > 0:
                            hits = [D for D in (49, 81, 148) if d % D == 0 and math.isqrt(d // D) ** 2 == d // D]
                            tag = str(hits[0]) if len(hits) == 1 else f"other:{d}"
                        seen[cp] = tag
                    if seen[cp] is not None:
                        counts[seen[cp]] = counts.get(seen[cp], 0) + 1
    return counts


def main():
    out = {}
    golden_cp = charpoly_high(GOLDEN)
    out["golden_charpoly_high"] = golden_cp
    out["companion11_charpoly_high"] = charpoly_high(COMPANION_11)
    out["golden_roots"] = [str(r) for r in real_roots(golden_cp)]
    out["golden_largest_root"] = str(real_roots(golden_cp, 30)[-1])
    out["companion11_real_root_count"] = len(real_roots(charpoly_high(COMPANION_11)))
    out["golden_irreducible"] = sp.Poly(golden_cp, x).is_irreducible
    out["disc_x3_m3x_p1"] = int(sp.discriminant(x**3 - 3 * x + 1, x))
    out["disc_golden"] = int(sp.discriminant(sp.Poly(golden_cp, x).as_expr(), x))
    out["hnf_2413_absdet"] = abs(int(sp.Matrix([[2, 4], [1, 3]]).det()))
    out["plane_xyz1_index"] = plane_points_index()
    out["line_angle_index"] = snf_index([[1, 0], [1, 3]])
    out["count_by_norm"] = [stars_and_bars_count(n) for n in range(7)]
    out["conjugator_det"] = int(sp.Matrix(CONJUGATOR).det())
    out["golden_order_index"] = order_index(GOLDEN)
    nf = norm_form_primitive(COMPANION_11)
    out["companion11_norm_form"] = nf
    out["companion11_norm_form_at_e1"] = eval_form(nf, (1, 0, 0))
    out["golden_norm_form"] = norm_form_primitive(GOLDEN)
    out["golden_unit_regulator"] = unit_regulator(GOLDEN)
    out["norm6_counts_by_field_disc"] = norm6_counts_by_field()
    # 49, 81 and 148 are the three smallest totally real cubic field discriminants,
    # so these polynomial discriminants are field discriminants
    out["field_disc_of_examples"] = {
        name: int(sp.discriminant(sp.Poly(charpoly_high(m), x).as_expr(), x))
        for name, m in (("example1", GOLDEN), ("example2", [[1, 1, 1], [1, -1, 0], [1, 0, 0]]),
                        ("example3", [[0, 1, 0], [0, 0, 1], [1, 1, -3]]))
    }
    path = Path(__file__).with_name("derived.json")
    path.write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")
    print(json.dumps(out, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
