import math

import numpy as np
import pytest

from lippaste import (
    Cover,
    FiniteMetricSpace,
    InputError,
    SubsetPair,
    ball_cover,
    complement_constant,
    global_bound_from_cover,
    local_lp_constants,
    lp_constant,
    random_metric,
    sample_transverse_lines,
)

from conftest import random_cover, random_pair
from oracles import naive_lp


def brute_complement(d, pair, cover):
    inter = pair.intersection
    best, size = 0.0, 0
    for a in pair.A:
        for b in pair.B:
            if any(a in r and b in r for r in cover.regions):
                continue
            size += 1
            best = max(best, min(d[a][x] + d[x][b] for x in inter) / d[a][b])
    return best, size


def test_trivial_cover(triangle3):
    space, pair = triangle3
    cover = Cover([[0, 1, 2]])
    assert local_lp_constants(space, pair, cover) == [2.0]
    assert complement_constant(space, pair, cover) == (0.0, 0)
    rep = global_bound_from_cover(space, pair, cover)
    assert rep.global_bound == rep.direct_k == 2.0


@pytest.mark.parametrize("seed", range(10))
def test_trivial_cover_random(seed):
    rng = np.random.default_rng(seed)
    m = random_metric(20, seed)
    pair = random_pair(rng, 20)
    (k1,) = local_lp_constants(m, pair, Cover([pair.union]))
    assert k1 == lp_constant(m, pair).k
    rep = global_bound_from_cover(m, pair, Cover([pair.union]))
    assert rep.global_bound == rep.direct_k
    assert rep.complement_size == 0


def test_path_space_complement():
    pos = [0.0, 1.0, 2.5, 4.5]
    d = [[abs(p - q) for q in pos] for p in pos]
    space = FiniteMetricSpace(d)
    pair = SubsetPair([0, 1, 2], [1, 2, 3])
    cover = Cover([[0, 1], [2, 3]])
    kc, size = complement_constant(space, pair, cover)
    assert (kc, size) == brute_complement(d, pair, cover)
    assert size == 5


def test_complement_bound_by_diameter():
    for seed in range(30):
        rng = np.random.default_rng(seed)
        m = random_metric(18, seed)
        pair = random_pair(rng, 18)
        cover = random_cover(rng, pair)
        kc, size = complement_constant(m, pair, cover)
        assert (kc, size) == brute_complement(m.dist.tolist(), pair, cover)
        if size:
            mask = ~cover.in_delta(m.n)[np.ix_(pair.A, pair.B)]
            min_cross = m.dist[np.ix_(pair.A, pair.B)][mask].min()
            assert kc <= 2 * m.dist.max() / min_cross


def test_transverse_two_regions():
    space, pair = sample_transverse_lines(41)
    origin = pair.intersection[0]
    union = np.array(pair.union)
    r = space.dist[origin, union]
    cover = Cover([union[r < 0.5].tolist(), union[r < 1.0].tolist()])
    ks = local_lp_constants(space, pair, cover)
    assert len(ks) == 2
    for k in ks:
        assert k <= math.sqrt(2) + 1e-9


def test_region_oracle():
    for seed in range(20):
        rng = np.random.default_rng(seed)
        m = random_metric(15, seed)
        pair = random_pair(rng, 15)
        cover = random_cover(rng, pair)
        got = local_lp_constants(m, pair, cover)
        for k, r in zip(got, cover.regions):
            rs = set(r)
            a = sorted(set(pair.A) & rs)
            b = sorted(set(pair.B) & rs)
            # naive_lp routes through a ∩ b, which is A ∩ B ∩ U here
            assert k == naive_lp(m.dist.tolist(), a, b)


class TestBallCover:
    def test_large_radius(self):
        m = random_metric(10, 1)
        pair = SubsetPair([0, 1, 2, 3], [3, 4, 5, 6])
        cover = ball_cover(m, pair, 2 * m.dist.max())
        assert all(r == pair.union for r in cover.regions)

    def test_small_radius(self):
        m = random_metric(10, 1)
        pair = SubsetPair([0, 1, 2, 3, 4], [3, 4, 5, 6])
        cover = ball_cover(m, pair, m.dist[m.dist > 0].min() / 2)
        assert cover.regions == ((3,), (4,))
        assert local_lp_constants(m, pair, cover) == [1.0, 1.0]

    def test_transverse_lines(self):
        space, pair = sample_transverse_lines(101)
        cover = ball_cover(space, pair, 0.1)
        (region,) = cover.regions
        origin = pair.intersection[0]
        assert all(space.dist[origin, i] < 0.1 for i in region)
        grid = np.linspace(-1, 1, 101)
        near = int(np.sum((np.abs(grid) < 0.1) & (grid != 0)))
        assert len(region) == 1 + 2 * near
        (k,) = local_lp_constants(space, pair, cover)
        assert k <= math.sqrt(2) + 1e-9

    def test_bad_radius(self, triangle3):
        with pytest.raises(InputError):
            ball_cover(*triangle3, 0.0)


@pytest.mark.parametrize("seed", range(40))
def test_global_bound(seed):
    rng = np.random.default_rng(seed)
    m = random_metric(int(rng.integers(3, 25)), seed)
    pair = random_pair(rng, m.n)
    cover = random_cover(rng, pair)
    rep = global_bound_from_cover(m, pair, cover)
    assert rep.direct_k <= rep.global_bound <= rep.sum_bound
    assert rep.global_bound == max(rep.complement_k, max(rep.local_ks))


@pytest.mark.parametrize("seed", range(15))
def test_shrinking_region_raises_pointwise_ratios(seed):
    # per pair, routing through fewer intersection points never helps
    rng = np.random.default_rng(seed)
    m = random_metric(16, seed)
    pair = random_pair(rng, 16)
    union = list(pair.union)
    big = set(union)
    small = set(rng.choice(union, size=len(union) // 2, replace=False).tolist())
    small.add(pair.intersection[0])
    d = m.dist
    for a in set(pair.A) & small:
        for b in set(pair.B) & small:
            if a == b:
                continue
            via_small = min(d[a, x] + d[x, b] for x in set(pair.intersection) & small)
            via_big = min(d[a, x] + d[x, b] for x in set(pair.intersection) & big)
            assert via_small >= via_big


class TestCoverValidation:
    def test_uncovered(self):
        m = random_metric(6, 0)
        pair = SubsetPair([0, 1, 2], [1, 2, 3])
        with pytest.raises(InputError, match="not covered"):
            local_lp_constants(m, pair, Cover([[0, 1]]))

    def test_region_missing_intersection(self):
        m = random_metric(6, 0)
        pair = SubsetPair([0, 1, 2], [1, 2, 3])
        with pytest.raises(InputError, match="does not meet"):
            local_lp_constants(m, pair, Cover([[1, 2], [0, 3]]))

    def test_outside_union(self):
        m = random_metric(6, 0)
        pair = SubsetPair([0, 1, 2], [1, 2, 3])
        with pytest.raises(InputError, match="outside"):
            local_lp_constants(m, pair, Cover([[1, 2, 5]]))
