import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lippaste import (
    FiniteMetricSpace,
    InputError,
    SubsetPair,
    random_metric,
    restrict,
    shortest_path_completion,
    verify_metric,
)
from lippaste.metricspace import load_space

from oracles import triangle_ok


def random_weights(n, seed):
    rng = np.random.default_rng(seed)
    w = np.triu(rng.uniform(0.1, 10.0, size=(n, n)), 1)
    return w + w.T


class TestVerifyMetric:
    def test_two_points(self):
        assert verify_metric(FiniteMetricSpace([[0, 1], [1, 0]])) == []

    def test_triangle_violation(self):
        space = FiniteMetricSpace([[0, 5, 1], [5, 0, 1], [1, 1, 0]], ["p", "q", "r"])
        (v,) = verify_metric(space)
        assert v.kind == "triangle"
        assert v.witness == (0, 1, 2)
        assert v.magnitude == 3.0

    def test_each_axiom_kind(self):
        d = np.array([[0.5, 1, 2], [1.5, 0, 1], [2, 1, 0]])
        kinds = {v.kind for v in verify_metric(FiniteMetricSpace(d))}
        assert kinds == {"diagonal", "symmetry"}
        zero = FiniteMetricSpace([[0, 0, 1], [0, 0, 1], [1, 1, 0]])
        assert [v.kind for v in verify_metric(zero)] == ["positivity"]

    def test_cap_and_sorted(self):
        n = 12
        d = np.full((n, n), 100.0)
        d[0, :] = d[:, 0] = 1.0
        d[0, 0] = 0
        np.fill_diagonal(d, 0)
        viol = verify_metric(FiniteMetricSpace(d), cap=5)
        assert len(viol) == 5
        assert [v.witness for v in viol] == sorted(v.witness for v in viol)
        assert len(verify_metric(FiniteMetricSpace(d))) == 55

    def test_tolerance_is_relative(self):
        d = np.array([[0, 2.0 + 1e-12, 1], [2.0 + 1e-12, 0, 1], [1, 1, 0]])
        assert verify_metric(FiniteMetricSpace(d)) == []
        assert verify_metric(FiniteMetricSpace(d * 1e6)) == []
        assert verify_metric(FiniteMetricSpace(d), tol=0.0)

    @pytest.mark.parametrize(
        "bad",
        [
            [[0, 1, 2], [1, 0, 1]],
            [[0, float("nan")], [1, 0]],
            [[0, -1], [-1, 0]],
            [[0, float("inf")], [1, 0]],
        ],
    )
    def test_malformed_is_input_error(self, bad):
        with pytest.raises(InputError):
            FiniteMetricSpace(bad)


class TestCompletion:
    def test_one_relaxation(self):
        out = shortest_path_completion([[0, 5, 1], [5, 0, 1], [1, 1, 0]])
        assert out.dist[0, 1] == 2.0

    def test_fixed_point(self):
        m = random_metric(20, 3)
        assert shortest_path_completion(m.dist) == m

    def test_seed_42_passes(self):
        m = shortest_path_completion(random_weights(50, 42))
        assert verify_metric(m) == []
        assert triangle_ok(m.dist.tolist())

    @settings(max_examples=30, deadline=None)
    @given(n=st.integers(2, 25), seed=st.integers(0, 2**32 - 1))
    def test_completion_properties(self, n, seed):
        w = random_weights(n, seed)
        m = shortest_path_completion(w)
        assert verify_metric(m) == []
        assert np.all(m.dist <= w)
        assert shortest_path_completion(m.dist) == m

    @pytest.mark.parametrize(
        "bad",
        [
            [[0, 1], [2, 0]],
            [[1, 1], [1, 0]],
            [[0, 0], [0, 0]],
            [[0, float("nan")], [float("nan"), 0]],
        ],
    )
    def test_bad_weights(self, bad):
        with pytest.raises(InputError):
            shortest_path_completion(bad)


class TestRestrict:
    def test_identity(self):
        m = random_metric(8, 1)
        assert restrict(m, range(8)) == m

    def test_equilateral(self, triangle3):
        space, _ = triangle3
        sub = restrict(space, [0, 1])
        assert sub.labels == ("p", "q")
        assert sub.dist.tolist() == [[0, 1], [1, 0]]

    def test_restricted_completion_is_metric(self):
        m = shortest_path_completion(random_weights(30, 5))
        assert verify_metric(restrict(m, [1, 4, 7, 11, 20, 29])) == []

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 10_000), data=st.data())
    def test_restrict_composes(self, seed, data):
        m = random_metric(15, seed)
        s1 = data.draw(st.sets(st.integers(0, 14), min_size=1))
        s2 = data.draw(st.sets(st.integers(0, len(s1) - 1), min_size=1))
        kept = sorted(s1)
        assert restrict(restrict(m, s1), s2) == restrict(m, [kept[i] for i in s2])

    @pytest.mark.parametrize("idx", [[], [0, 9]])
    def test_bad_indices(self, idx):
        with pytest.raises(InputError):
            restrict(random_metric(5, 0), idx)


class TestRandomMetric:
    @pytest.mark.parametrize("seed", [0, 1, 99])
    def test_two_points(self, seed):
        m = random_metric(2, seed)
        assert m.n == 2 and verify_metric(m) == []

    def test_deterministic(self):
        assert random_metric(30, 11).dist.tobytes() == random_metric(30, 11).dist.tobytes()
        assert random_metric(30, 11) != random_metric(30, 12)

    def test_hundred_points(self):
        assert verify_metric(random_metric(100, 7)) == []

    @pytest.mark.parametrize("n,seed", [(3, 0), (10, 4), (60, 9)])
    def test_spread(self, n, seed):
        d = random_metric(n, seed).dist
        off = d[~np.eye(n, dtype=bool)]
        assert off.max() >= 10 * off.min()

    def test_too_small(self):
        with pytest.raises(InputError):
            random_metric(1, 0)


class TestSubsetPair:
    def test_intersection_exact(self):
        p = SubsetPair([3, 1, 2], [2, 3, 5])
        assert p.A == (1, 2, 3) and p.intersection == (2, 3)

    def test_empty(self):
        with pytest.raises(InputError):
            SubsetPair([], [1])

    def test_out_of_range(self):
        with pytest.raises(InputError):
            SubsetPair([0, 4], [1]).validate(4)


def test_json_roundtrip(tmp_path):
    m = random_metric(6, 2)
    path = tmp_path / "s.json"
    path.write_text(json.dumps(m.to_json()))
    assert load_space(path) == m


@pytest.mark.parametrize(
    "doc",
    ['{"dist": [[0, 1], [1]]}', '{"labels": ["a"]}', '{"dist": [[0, "x"], ["x", 0]]}', '{"dist": [[0'],
)
def test_loader_rejects(tmp_path, doc):
    path = tmp_path / "s.json"
    path.write_text(doc)
    with pytest.raises(InputError):
        load_space(path)
