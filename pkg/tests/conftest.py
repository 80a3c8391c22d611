import functools
import json
import random
from pathlib import Path

import pytest

from kleinsail.linalg import det3, identity, mat_mul
from kleinsail.spectral import Orthant
from kleinsail.torus import sail_certificate

HERE = Path(__file__).parent
GOLDEN = ((1, 1, 1), (1, 2, 2), (1, 2, 3))
EXAMPLE2 = ((1, 1, 1), (1, -1, 0), (1, 0, 0))
EXAMPLE3 = ((0, 1, 0), (0, 0, 1), (1, 1, -3))


def load_derived() -> dict:
    return json.loads((HERE / "oracles" / "derived.json").read_text())


def random_unimodular(rng: random.Random, steps: int = 6, bound: int = 2):
    """Product of random elementary matrices and a random signed permutation."""
    m = identity()
    for _ in range(steps):
        i, j = rng.sample(range(3), 2)
        k = rng.choice([x for x in range(-bound, bound + 1) if x])
        e = [list(r) for r in identity()]
        e[i][j] = k
        m = mat_mul(m, tuple(tuple(r) for r in e))
    perm = rng.sample(range(3), 3)
    signs = [rng.choice((1, -1)) for _ in range(3)]
    p = tuple(tuple(signs[r] if c == perm[r] else 0 for c in range(3)) for r in range(3))
    m = mat_mul(m, p)
    assert det3(m) in (1, -1)
    return m


@functools.lru_cache(maxsize=None)
def sail(a, orthant: str):
    """Certified (certificate, decomposition, patch) for one sail, cached per session."""
    return sail_certificate(a, Orthant.parse(orthant))


@functools.lru_cache(maxsize=None)
def all_sails(a):
    return tuple(sail(a, str(o)) for o in Orthant.representatives())


@pytest.fixture
def derived():
    return load_derived()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
