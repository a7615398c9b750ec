import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lippaste import Cover, FiniteMetricSpace, SubsetPair  # noqa: E402

DATA = Path(__file__).parent / "data"


@pytest.fixture
def triangle3():
    """Unit equilateral p, q, r with A = {p, r}, B = {q, r}."""
    space = FiniteMetricSpace(np.ones((3, 3)) - np.eye(3), ["p", "q", "r"])
    return space, SubsetPair([0, 2], [1, 2])


def random_pair(rng, n, nested=False):
    perm = rng.permutation(n)
    n_shared = int(rng.integers(1, max(2, n // 3) + 1))
    shared = perm[:n_shared].tolist()
    rest = perm[n_shared:]
    side = rng.integers(0, 3, size=len(rest))
    if nested:
        side[side == 0] = 2
    A = set(shared) | set(rest[side != 1].tolist())
    B = set(shared) | set(rest[side != 0].tolist())
    return SubsetPair(A, B)


def random_cover(rng, pair):
    """Regions seeded at each intersection point plus random extra members."""
    union = np.array(pair.union)
    inter = list(pair.intersection)
    rng.shuffle(inter)
    n_regions = int(rng.integers(1, len(inter) + 1))
    regions = [set() for _ in range(n_regions)]
    for i, y in enumerate(inter):
        regions[i % n_regions].add(y)
    for r in regions:
        extra = rng.choice(union, size=int(rng.integers(0, len(union) + 1)), replace=False)
        r.update(extra.tolist())
    return Cover(regions)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
