"""Compare the compiled kernels with the pure-Python fallback.

Each kernel is timed on inputs captured from a real sail computation, then a
whole-operator run is timed with each backend in a fresh interpreter.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from kleinsail import _kernels_py
from kleinsail.classify import family
from kleinsail.sail import _slab_geometry
from kleinsail.spectral import Orthant, eigen_structure

try:
    from kleinsail import _ckernels
except ImportError:
    _ckernels = None


def _visible_case(n=3000, seed=1):
    rng = np.random.default_rng(seed)
    pts = [tuple(int(x) for x in rng.integers(-5000, 5000, 3)) for _ in range(n)]
    return (pts, 0, 1, 2, list(range(3, n)))


def _slab_case():
    a = family("quadrangle", a=2, b=1)
    e = eigen_structure(a)
    o = Orthant.parse("+-+")
    n = (2075, 9311, 1397)
    geo = _slab_geometry(e, o, n)
    return (1, 400, geo.a_lo, geo.a_hi, geo.lower, geo.upper, geo.shift)


def _pareto_case(n=4000, seed=2):
    rng = np.random.default_rng(seed)
    ly = rng.normal(size=(n, 3))
    order = list(np.argsort(ly.sum(axis=1), kind="stable"))
    return (ly, order, lambda i, cands: False)


def _time(fn, args, repeat):
    return min(timeit.repeat(lambda: list(fn(*args)), number=1, repeat=repeat))


def _end_to_end(pure: bool) -> float:
    env = dict(os.environ)
    if pure:
        env["KLEINSAIL_PURE_PYTHON"] = "1"
    code = (
        "import time\n"
        "from kleinsail.classify import family\n"
        "from kleinsail.torus import fraction_certificate\n"
        "t = time.perf_counter()\n"
        "fraction_certificate(family('quadrangle', a=2, b=1))\n"
        "print(time.perf_counter() - t)\n"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels not built; only the fallback is available")
        return 1
    cases = {
        "visible": _visible_case(),
        "slab_candidates": _slab_case(),
        "pareto_filter": _pareto_case(),
    }
    rows = {}
    for name, case in cases.items():
        tp = _time(getattr(_kernels_py, name), case, args.repeat)
        tc = _time(getattr(_ckernels, name), case, args.repeat)
        rows[name] = {"python_s": round(tp, 5), "cython_s": round(tc, 5), "speedup": round(tp / tc, 2)}
    if not args.skip_end_to_end:
        tp = _end_to_end(True)
        tc = _end_to_end(False)
        rows["quadrangle(2,1) all sails"] = {"python_s": round(tp, 2), "cython_s": round(tc, 2), "speedup": round(tp / tc, 2)}
    width = max(len(k) for k in rows)
    print(f"{'kernel':<{width}}  {'python s':>10}  {'cython s':>10}  {'speedup':>8}")
    for k, r in rows.items():
        print(f"{k:<{width}}  {r['python_s']:>10}  {r['cython_s']:>10}  {r['speedup']:>8}")
    print(json.dumps(rows))
    return 0


if __name__ == "__main__":
    sys.exit(main())
