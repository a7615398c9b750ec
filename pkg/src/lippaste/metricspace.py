"""Finite metric spaces: representation, axiom checks, generators, JSON I/O."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

TAU_METRIC = 1e-9
MAX_VIOLATIONS = 100


class InputError(ValueError):
    """Malformed input (bad matrix, bad index set, unparsable document)."""


def _as_index_tuple(indices: Iterable[int]) -> tuple[int, ...]:
    out = set()
    for i in indices:
        if isinstance(i, (bool, np.bool_)) or not isinstance(i, (int, np.integer)):
            raise InputError(f"index {i!r} is not an integer")
        out.add(int(i))
    return tuple(sorted(out))


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Labeled points with a dense distance matrix.

    Construction only checks the matrix is well-formed (square, finite,
    non-negative). Whether it satisfies the metric axioms is the job of
    :func:`verify_metric`.
    """

    labels: tuple[str, ...]
    dist: np.ndarray

    def __init__(self, dist, labels: Sequence[str] | None = None):
        try:
            d = np.array(dist, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise InputError(f"distance matrix is not numeric: {exc}") from None
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InputError(f"distance matrix must be square, got shape {d.shape}")
        if d.shape[0] < 1:
            raise InputError("distance matrix is empty")
        if np.isnan(d).any():
            i, j = np.argwhere(np.isnan(d))[0]
            raise InputError(f"NaN distance at ({i}, {j})")
        if np.isinf(d).any():
            i, j = np.argwhere(np.isinf(d))[0]
            raise InputError(f"infinite distance at ({i}, {j})")
        if (d < 0).any():
            i, j = np.argwhere(d < 0)[0]
            raise InputError(f"negative distance {d[i, j]!r} at ({i}, {j})")
        if labels is None:
            labels = [str(i) for i in range(d.shape[0])]
        labels = tuple(str(s) for s in labels)
        if len(labels) != d.shape[0]:
            raise InputError(f"{len(labels)} labels for {d.shape[0]} points")
        d.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dist", d)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def scale(self) -> float:
        return float(self.dist.max())

    def __eq__(self, other):
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.dist, other.dist)

    def __repr__(self):
        return f"FiniteMetricSpace(n={self.n})"

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "dist": self.dist.tolist()}

    @classmethod
    def from_json(cls, doc: dict) -> "FiniteMetricSpace":
        if not isinstance(doc, dict) or "dist" not in doc:
            raise InputError("metric-space document needs a 'dist' field")
        dist = doc["dist"]
        if not isinstance(dist, list) or not all(isinstance(r, list) for r in dist):
            raise InputError("'dist' must be a list of rows")
        if any(len(r) != len(dist) for r in dist):
            raise InputError("'dist' must be square")
        for r in dist:
            for x in r:
                if isinstance(x, bool) or not isinstance(x, (int, float)):
                    raise InputError(f"non-numeric distance entry {x!r}")
        return cls(dist, doc.get("labels"))


@dataclass(frozen=True)
class SubsetPair:
    """Two index sets ``A`` and ``B``; membership is by index, never by distance."""

    A: tuple[int, ...]
    B: tuple[int, ...]
    intersection: tuple[int, ...] = field(init=False)

    def __init__(self, A: Iterable[int], B: Iterable[int]):
        a = _as_index_tuple(A)
        b = _as_index_tuple(B)
        if not a or not b:
            raise InputError("A and B must be nonempty")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "intersection", tuple(sorted(set(a) & set(b))))

    @property
    def union(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.A) | set(self.B)))

    @property
    def disjoint(self) -> bool:
        return not self.intersection

    def validate(self, n: int) -> None:
        for name, idx in (("A", self.A), ("B", self.B)):
            if idx[0] < 0 or idx[-1] >= n:
                raise InputError(f"{name} has indices outside 0..{n - 1}")

    def swapped(self) -> "SubsetPair":
        return SubsetPair(self.B, self.A)

    def reindexed(self, indices: Sequence[int]) -> "SubsetPair":
        """Map the pair into the index space of ``restrict(space, indices)``."""
        pos = {old: new for new, old in enumerate(_as_index_tuple(indices))}
        try:
            return SubsetPair([pos[i] for i in self.A], [pos[i] for i in self.B])
        except KeyError as exc:
            raise InputError(f"index {exc.args[0]} not among the kept indices") from None

    def to_json(self) -> dict:
        return {"A": list(self.A), "B": list(self.B)}

    @classmethod
    def from_json(cls, doc: dict) -> "SubsetPair":
        if not isinstance(doc, dict) or "A" not in doc or "B" not in doc:
            raise InputError("pair document needs 'A' and 'B'")
        if not isinstance(doc["A"], list) or not isinstance(doc["B"], list):
            raise InputError("'A' and 'B' must be lists of indices")
        return cls(doc["A"], doc["B"])


@dataclass(frozen=True)
class ViolationReport:
    kind: str  # diagonal | symmetry | positivity | triangle
    witness: tuple[int, ...]
    magnitude: float

    def to_json(self) -> dict:
        return {"kind": self.kind, "witness": list(self.witness), "magnitude": self.magnitude}


def verify_metric(
    space: FiniteMetricSpace, tol: float = TAU_METRIC, cap: int = MAX_VIOLATIONS
) -> list[ViolationReport]:
    """Exhaustively check the four metric axioms.

    ``tol`` is relative to the largest entry of the matrix. Triangle
    violations are reported as ``(i, j, k)`` with ``i < j`` meaning
    ``d[i, j] > d[i, k] + d[k, j]``. At most ``cap`` violations are
    returned, sorted by ``(kind, witness)``.
    """
    d = space.dist
    n = space.n
    thr = tol * space.scale
    found: list[ViolationReport] = []

    diag = np.abs(np.diagonal(d))
    for i in np.flatnonzero(diag > thr):
        found.append(ViolationReport("diagonal", (int(i),), float(diag[i])))

    iu, ju = np.triu_indices(n, k=1)
    asym = np.abs(d[iu, ju] - d[ju, iu])
    for t in np.flatnonzero(asym > thr):
        found.append(ViolationReport("symmetry", (int(iu[t]), int(ju[t])), float(asym[t])))

    # a zero off-diagonal entry cannot exceed the threshold, so magnitude is the shortfall
    upper = d[iu, ju]
    for t in np.flatnonzero(upper <= thr):
        found.append(
            ViolationReport("positivity", (int(iu[t]), int(ju[t])), float(thr - upper[t]))
        )

    limit = d - thr
    via = np.empty_like(d)
    for k in range(n):
        np.add(d[:, k, None], d[None, k, :], out=via)
        bad = via < limit
        if not bad.any():
            continue
        # argwhere is row-major, so the first `cap` per k include the global first `cap`
        for i, j in np.argwhere(np.triu(bad, k=1))[:cap]:
            excess = d[i, j] - via[i, j]
            found.append(ViolationReport("triangle", (int(i), int(j), k), float(excess)))

    order = {"diagonal": 0, "symmetry": 1, "positivity": 2, "triangle": 3}
    found.sort(key=lambda v: (order[v.kind], v.witness))
    return found[:cap]


def shortest_path_completion(weights) -> FiniteMetricSpace:
    """All-pairs shortest-path closure of a dense positive weight matrix.

    Floyd-Warshall passes are repeated until a pass changes nothing, so the
    result is a fixed point of the closure in floating point: completing it
    again returns it unchanged.
    """
    w = np.array(weights, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise InputError(f"weight matrix must be square, got shape {w.shape}")
    if np.isnan(w).any():
        raise InputError("NaN in weight matrix")
    if (w < 0).any():
        raise InputError("negative weight")
    if not np.array_equal(w, w.T):
        raise InputError("weight matrix must be symmetric")
    if np.any(np.diagonal(w) != 0):
        raise InputError("weight matrix must have zero diagonal")
    n = w.shape[0]
    if n > 1 and (w[~np.eye(n, dtype=bool)] <= 0).any():
        raise InputError("off-diagonal weights must be strictly positive")
    d = w.copy()
    while True:
        before = d.copy()
        for k in range(n):
            np.minimum(d, d[:, k, None] + d[None, k, :], out=d)
        if np.array_equal(d, before):
            break
    # enforce exact symmetry; the closure is symmetric in exact arithmetic
    d = np.minimum(d, d.T)
    return FiniteMetricSpace(d)


def restrict(space: FiniteMetricSpace, indices: Iterable[int]) -> FiniteMetricSpace:
    """Sub-space on ``indices`` (sorted, deduplicated).

    The restriction of a metric is a metric, but restricting a shortest-path
    closure is generally not the closure of the restricted weights.
    """
    idx = _as_index_tuple(indices)
    if not idx:
        raise InputError("cannot restrict to an empty index set")
    if idx[0] < 0 or idx[-1] >= space.n:
        raise InputError(f"indices outside 0..{space.n - 1}")
    sel = np.asarray(idx)
    return FiniteMetricSpace(space.dist[np.ix_(sel, sel)], [space.labels[i] for i in idx])


def random_metric(n: int, seed: int) -> FiniteMetricSpace:
    """Deterministic random metric on ``n`` points.

    Euclidean distances of points in a 10-unit cube plus the shortest-path
    closure of random log-uniform edge weights, then closed once more.
    Points 0 and 1 are pinned close together and point 2 far away, so for
    ``n >= 3`` the off-diagonal entries span well over a factor of 10.
    """
    if n < 2:
        raise InputError("random_metric needs n >= 2")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, 10.0, size=(n, 3))
    u = rng.normal(size=3)
    pts[1] = pts[0] + 0.01 * u / np.linalg.norm(u)
    if n >= 3:
        v = rng.normal(size=3)
        pts[2] = pts[0] + 5.0 * v / np.linalg.norm(v)
    euclid = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    w = np.exp(rng.uniform(math.log(1e-3), math.log(1.0), size=(n, n)))
    w = np.triu(w, 1)
    w[0, 1] = 0.005
    w = w + w.T
    graph = shortest_path_completion(w).dist
    total = euclid + graph
    total = (total + total.T) / 2
    np.fill_diagonal(total, 0.0)
    return shortest_path_completion(total)


def load_json(path: str | Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def load_space(path: str | Path) -> FiniteMetricSpace:
    """Read a metric-space document; a wrapping ``{"space": ...}`` is accepted."""
    doc = load_json(path)
    if isinstance(doc, dict) and "space" in doc and "dist" not in doc:
        doc = doc["space"]
    return FiniteMetricSpace.from_json(doc)


def load_pair(path: str | Path) -> SubsetPair:
    doc = load_json(path)
    if isinstance(doc, dict) and "pair" in doc and "A" not in doc:
        doc = doc["pair"]
    return SubsetPair.from_json(doc)
