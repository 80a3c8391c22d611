"""Enumeration of integer operators by norm, classification, and families.

The norm of a matrix is the sum of the absolute values of its entries.
Operators are grouped by the certificates of their eight sails.  Two
operators generating the same algebra ``Q[A]`` have the same eigenlines and
hence literally the same sails, so certificates are computed once per
algebra.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Iterator, Optional, Sequence

from .exact import discriminant_cubic, is_irreducible_cubic
from .linalg import Mat3, char_poly, det3, identity, mat_add, mat_inv, mat_mul, mat_scale, saturate
from .torus import Certificate, fraction_certificate

log = logging.getLogger(__name__)

WORKERS_ENV = "KLEINSAIL_WORKERS"
DEFAULT_MAX_NORM = 6


class ResourceGuard(ValueError):
    """Requested enumeration exceeds the configured maximum norm."""


class NonUnimodularIntermediate(ArithmeticError):
    """I - A_t is not invertible over the integers."""


def worker_count(requested: Optional[int] = None) -> int:
    """Worker count: explicit request, else the environment override, else 1."""
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
        if n >= 1:
            return n
    return max(1, requested or 1)


# -- enumeration --------------------------------------------------------------------


def count_by_norm(n: int) -> int:
    """Closed form: sum over support size k of C(9,k) C(n-1,k-1) 2^k."""
    if n < 0:
        raise ValueError("norm must be nonnegative")
    if n == 0:
        return 1
    return sum(math.comb(9, k) * math.comb(n - 1, k - 1) * 2**k for k in range(1, min(9, n) + 1))


def _compositions(n: int, k: int) -> Iterator[tuple]:
    """Ordered k-tuples of positive integers summing to n."""
    for cuts in combinations(range(1, n), k - 1):
        prev = 0
        out = []
        for c in cuts + (n,):
            out.append(c - prev)
            prev = c
        yield tuple(out)


def enumerate_by_norm(n: int) -> Iterator[Mat3]:
    """Every 3x3 integer matrix whose entries have absolute values summing to n, once each."""
    if n < 0:
        raise ValueError("norm must be nonnegative")
    if n == 0:
        yield ((0, 0, 0), (0, 0, 0), (0, 0, 0))
        return
    for k in range(1, min(9, n) + 1):
        for support in combinations(range(9), k):
            for mags in _compositions(n, k):
                for signs in product((1, -1), repeat=k):
                    flat = [0] * 9
                    for pos, m, s in zip(support, mags, signs):
                        flat[pos] = s * m
                    yield (tuple(flat[0:3]), tuple(flat[3:6]), tuple(flat[6:9]))


def is_hyperbolic(a: Mat3) -> bool:
    p = char_poly(a)
    return is_irreducible_cubic(p) and discriminant_cubic(p) > 0


def algebra_key(a: Mat3) -> tuple:
    """HNF basis of the integer points of Q[A]; equal keys mean equal algebras."""
    a2 = mat_mul(a, a)
    flat = [[x for r in m for x in r] for m in (identity(), a, a2)]
    return tuple(tuple(r) for r in saturate(flat))


# -- classification ------------------------------------------------------------------


DET_FILTERS = ("all", "pm1", "p1")


def _det_ok(a: Mat3, det_filter: str) -> bool:
    if det_filter == "all":
        return True
    d = det3(a)
    if det_filter == "pm1":
        return d in (1, -1)
    if det_filter == "p1":
        return d == 1
    raise ValueError(f"unknown det filter {det_filter!r}; expected one of {DET_FILTERS}")


@dataclass
class ClassInfo:
    certificate: tuple  # sorted tuple of Certificate
    count: int
    sample: Mat3

    def digest(self) -> str:
        import hashlib

        h = hashlib.sha256()
        for c in self.certificate:
            h.update(c.data)
            h.update(b"\n")
        return h.hexdigest()


@dataclass
class ClassificationReport:
    norm: int
    total: int
    hyperbolic: int
    det_filter: str
    filtered: int
    det_counts: dict
    classes: list = field(default_factory=list)
    exploratory: bool = False

    def to_json(self) -> dict:
        return {
            "norm": self.norm,
            "total_enumerated": self.total,
            "hyperbolic": self.hyperbolic,
            "det_filter": self.det_filter,
            "filtered_hyperbolic": self.filtered,
            "det_counts": {k: self.det_counts[k] for k in sorted(self.det_counts)},
            "exploratory": self.exploratory,
            "classes": [
                {"digest": c.digest(), "count": c.count, "sample": [list(r) for r in c.sample]}
                for c in self.classes
            ],
        }

    def table(self) -> str:
        lines = [
            f"norm {self.norm}: {self.total} matrices, {self.hyperbolic} hyperbolic"
            + (" (exploratory)" if self.exploratory else ""),
            f"det filter {self.det_filter}: {self.filtered} operators in {len(self.classes)} classes",
        ]
        for c in self.classes:
            lines.append(f"  {c.count:6d}  {c.digest()[:16]}  sample {list(map(list, c.sample))}")
        return "\n".join(lines)


def _cert_task(args):
    a, kw = args
    return fraction_certificate(a, **kw)


def classify_norm(
    n: int,
    det_filter: str = "all",
    jobs: Optional[int] = None,
    max_norm: int = DEFAULT_MAX_NORM,
    exploratory: bool = False,
    matrices: Optional[Iterable[Mat3]] = None,
    **sail_kw,
) -> ClassificationReport:
    """Group the hyperbolic matrices of norm ``n`` by fraction certificate.

    ``matrices`` substitutes a custom stream (in any order) for the norm
    enumeration, which is how order independence is tested.
    """
    if det_filter not in DET_FILTERS:
        raise ValueError(f"unknown det filter {det_filter!r}; expected one of {DET_FILTERS}")
    if n > max_norm and not exploratory:
        raise ResourceGuard(f"norm {n} exceeds the maximum {max_norm}; pass exploratory=True to override")
    total = 0
    hyper = []
    det_counts = {"all": 0, "pm1": 0, "p1": 0}
    source = enumerate_by_norm(n) if matrices is None else matrices
    for a in source:
        total += 1
        if is_hyperbolic(a):
            hyper.append(a)
            d = det3(a)
            det_counts["all"] += 1
            det_counts["pm1"] += d in (1, -1)
            det_counts["p1"] += d == 1
    chosen = [a for a in hyper if _det_ok(a, det_filter)]
    groups: dict = {}
    for a in chosen:
        groups.setdefault(algebra_key(a), []).append(a)
    keys = sorted(groups)
    reps = [min(groups[k]) for k in keys]
    jobs = worker_count(jobs)
    tasks = [(a, sail_kw) for a in reps]
    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            certs = list(ex.map(_cert_task, tasks, chunksize=1))
    else:
        certs = [_cert_task(t) for t in tasks]
    by_cert: dict = {}
    for k, c in zip(keys, certs):
        members = groups[k]
        if c in by_cert:
            by_cert[c][0] += len(members)
            by_cert[c][1] = min(by_cert[c][1], min(members))
        else:
            by_cert[c] = [len(members), min(members)]
    classes = [ClassInfo(c, cnt, sample) for c, (cnt, sample) in by_cert.items()]
    classes.sort(key=lambda c: (-c.count, c.certificate))
    return ClassificationReport(
        norm=n,
        total=total,
        hyperbolic=len(hyper),
        det_filter=det_filter,
        filtered=len(chosen),
        det_counts=det_counts,
        classes=classes,
        exploratory=n > max_norm,
    )


# -- explicit identities and families ---------------------------------------------------


CONJUGATOR = ((-1, -1, -2), (0, 0, -1), (1, 0, -1))


def conjugation_operators(t: int) -> tuple[Mat3, Mat3]:
    a_t = ((0, 1, 0), (0, 0, 1), (1, 1 + t, -t - 2))
    m_t = ((0, 0, 1), (1, 0, -t - 5), (0, 1, t + 6))
    return a_t, m_t


def verify_conjugation(t: int) -> bool:
    """Exact check that ``M_t == X^-1 (I - A_t)^-1 X``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    a_t, m_t = conjugation_operators(t)
    b = mat_add(identity(), a_t, -1)
    if det3(b) not in (1, -1):
        raise NonUnimodularIntermediate(f"det(I - A_t) = {det3(b)} for t = {t}")
    x = CONJUGATOR
    lhs = mat_mul(mat_mul(mat_inv(x), mat_inv(b)), x)
    return lhs == m_t


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def korkina(m: int) -> Mat3:
    _need(m >= 0, "korkina family needs m >= 0")
    return ((0, 0, 1), (1, 0, -m - 5), (0, 1, m + 6))


def twoparam(a: int, b: int) -> Mat3:
    _need(a >= 0 and b >= 0, "two-parameter family needs a, b >= 0")
    return ((0, 1, 0), (0, 0, 1), (1, 1 + a - b, -(a + 2) * (b + 1)))


def oneparam(a: int) -> Mat3:
    _need(a >= 1, "one-parameter family needs a >= 1")
    return ((0, 1, 0), (0, 0, 1), (1, a, -2 * a - 3))


def quadrangle(a: int, b: int) -> Mat3:
    _need(a > 0 and b >= 0, "quadrangle family needs a > 0 and b >= 0")
    return ((0, 1, 0), (0, 0, 1), (1, (a + 2) * (b + 2) - 3, 3 - (a + 2) * (b + 3)))


def sylvester(m: int, n: int) -> Mat3:
    return ((0, 1, 0), (0, 0, 1), (1, -m, -n))


EXAMPLES = {
    "example1": ((1, 1, 1), (1, 2, 2), (1, 2, 3)),
    "example2": ((1, 1, 1), (1, -1, 0), (1, 0, 0)),
    "example3": ((0, 1, 0), (0, 0, 1), (1, 1, -3)),
}

FAMILIES = {
    "korkina": (korkina, ("m",), "m >= 0"),
    "twoparam": (twoparam, ("a", "b"), "a, b >= 0"),
    "oneparam": (oneparam, ("a",), "a >= 1"),
    "quadrangle": (quadrangle, ("a", "b"), "a > 0, b >= 0"),
    "sylvester": (sylvester, ("m", "n"), "any integers (exploratory)"),
}


def family(name: str, **params: int) -> Mat3:
    if name in EXAMPLES:
        _need(not params, f"{name} takes no parameters")
        return EXAMPLES[name]
    if name not in FAMILIES:
        raise ValueError(f"unknown family {name!r}; known: {sorted(FAMILIES) + sorted(EXAMPLES)}")
    fn, names, _ = FAMILIES[name]
    missing = [p for p in names if p not in params]
    extra = [p for p in params if p not in names]
    _need(not missing and not extra, f"{name} takes parameters {names}")
    return fn(**{p: int(params[p]) for p in names})


# -- diagnostic scan ----------------------------------------------------------------------


@dataclass(frozen=True)
class ScanFlags:
    name: str
    distance_one: bool
    distance_above_one: bool
    has_triangle: bool


def scan_decomposition(name: str, faces: Sequence[dict]) -> ScanFlags:
    """Flags for one decomposition given face records with ``distance`` and ``vertex_count``."""
    d = [f["distance"] for f in faces]
    return ScanFlags(
        name,
        any(x == 1 for x in d),
        any(x > 1 for x in d),
        any(f["vertex_count"] == 3 for f in faces),
    )


def conjecture_scan(corpus: Iterable[tuple[str, Sequence[dict]]]) -> dict:
    """Per-decomposition flags plus aggregate counts."""
    rows = [scan_decomposition(n, faces) for n, faces in corpus]
    return {
        "decompositions": [
            {
                "name": r.name,
                "distance_one": r.distance_one,
                "distance_above_one": r.distance_above_one,
                "has_triangle": r.has_triangle,
            }
            for r in rows
        ],
        "counts": {
            "total": len(rows),
            "distance_one": sum(r.distance_one for r in rows),
            "distance_above_one": sum(r.distance_above_one for r in rows),
            "has_triangle": sum(r.has_triangle for r in rows),
        },
    }
