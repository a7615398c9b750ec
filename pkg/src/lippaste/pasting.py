"""LP constants, the glued metric, and the converse construction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .lipschitz import MappedFunction, lipschitz_constant, restrict_function
from .metricspace import (
    TAU_METRIC,
    FiniteMetricSpace,
    InputError,
    SubsetPair,
    ViolationReport,
    restrict,
    verify_metric,
)


@dataclass(frozen=True)
class LpReport:
    """Optimal LP constant of a pair, or its separation when disjoint.

    ``k`` is ``None`` for disjoint pairs; it serializes as ``"undefined"``.
    """

    k: Optional[float]
    lp: bool
    disjoint: bool
    separation: Optional[float] = None
    witness_pair: Optional[tuple[int, int]] = None
    witness_x: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "k": "undefined" if self.k is None else self.k,
            "lp": self.lp,
            "disjoint": self.disjoint,
            "separation": self.separation,
            "witness_pair": list(self.witness_pair) if self.witness_pair else None,
            "witness_x": self.witness_x,
        }


def _routing(dist: np.ndarray, rows, cols, via):
    """Min over ``x in via`` of ``d[r, x] + d[x, c]`` and the first argmin."""
    rows = np.asarray(rows, dtype=np.intp)
    cols = np.asarray(cols, dtype=np.intp)
    best = np.full((rows.size, cols.size), np.inf)
    arg = np.zeros((rows.size, cols.size), dtype=np.intp)
    for x in via:
        s = dist[rows, x][:, None] + dist[x, cols][None, :]
        better = s < best
        best[better] = s[better]
        arg[better] = x
    return best, arg


def _max_cross_ratio(dist, rows, cols, via):
    """Largest routed ratio over ``rows x cols`` with ``r != c``.

    Returns ``(k, (r, c), x)``, or ``None`` if every pair is diagonal. Ties
    resolve to the lexicographically smallest ``(r, c)`` and smallest ``x``.
    """
    rows = np.asarray(rows, dtype=np.intp)
    cols = np.asarray(cols, dtype=np.intp)
    mask = rows[:, None] != cols[None, :]
    if not mask.any():
        return None
    best, arg = _routing(dist, rows, cols, via)
    den = dist[np.ix_(rows, cols)]
    ratio = np.full(best.shape, -np.inf)
    np.divide(best, den, out=ratio, where=mask)
    flat = int(np.argmax(ratio))
    i, j = divmod(flat, ratio.shape[1])
    return float(ratio[i, j]), (int(rows[i]), int(cols[j])), int(arg[i, j])


def lp_constant(space: FiniteMetricSpace, pair: SubsetPair) -> LpReport:
    pair.validate(space.n)
    d = space.dist
    if pair.disjoint:
        sep = float(d[np.ix_(pair.A, pair.B)].min())
        return LpReport(k=None, lp=True, disjoint=True, separation=sep)
    res = _max_cross_ratio(d, pair.A, pair.B, pair.intersection)
    if res is None:
        # A = B = one point: empty sup, take the A = B value
        return LpReport(k=1.0, lp=True, disjoint=False)
    k, wp, wx = res
    return LpReport(k=k, lp=True, disjoint=False, witness_pair=wp, witness_x=wx)


def cross_ratio(space: FiniteMetricSpace, pair: SubsetPair, a: int, b: int) -> float:
    pair.validate(space.n)
    if a not in pair.A or b not in pair.B:
        raise InputError("a must lie in A and b in B")
    if a == b:
        raise InputError("cross_ratio needs a != b")
    if pair.disjoint:
        raise InputError("A ∩ B is empty")
    d = space.dist
    via = np.asarray(pair.intersection)
    return float((d[a, via] + d[via, b]).min() / d[a, b])


@dataclass(frozen=True, eq=False)
class GluedMetricSpace:
    """``base`` is the space on ``A ∪ B``; ``pair`` indexes it."""

    base: FiniteMetricSpace
    pair: SubsetPair
    delta: np.ndarray

    def as_space(self) -> FiniteMetricSpace:
        return FiniteMetricSpace(self.delta, self.base.labels)


class GlueError(ArithmeticError):
    """The glued matrix failed the metric check."""

    def __init__(self, violations: list[ViolationReport]):
        super().__init__(f"glued matrix is not a metric: {violations[:3]}")
        self.violations = violations


def glued_metric(
    space: FiniteMetricSpace, pair: SubsetPair, tol: float = TAU_METRIC
) -> GluedMetricSpace:
    """Metric on ``A ∪ B`` equal to ``d`` inside A and inside B, routed through
    ``A ∩ B`` across.

    The result is checked with :func:`verify_metric` before it is returned.
    """
    pair.validate(space.n)
    if pair.disjoint:
        raise InputError("glued metric needs A ∩ B nonempty (cross distances would be infinite)")
    union = pair.union
    base = restrict(space, union)
    local = pair.reindexed(union)
    d = base.dist
    delta = d.copy()
    only_a = sorted(set(local.A) - set(local.B))
    only_b = sorted(set(local.B) - set(local.A))
    if only_a and only_b:
        routed, _ = _routing(d, only_a, only_b, local.intersection)
        delta[np.ix_(only_a, only_b)] = routed
        delta[np.ix_(only_b, only_a)] = routed.T
    delta.setflags(write=False)
    glued = GluedMetricSpace(base, local, delta)
    bad = verify_metric(glued.as_space(), tol)
    if bad:
        raise GlueError(bad)
    return glued


@dataclass(frozen=True)
class ConverseReport:
    k: float
    lip_identity: float
    lip_identity_a: float
    lip_identity_b: float
    delta_dominates: bool
    agrees: bool

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "lip_identity": self.lip_identity,
            "lip_identity_A": self.lip_identity_a,
            "lip_identity_B": self.lip_identity_b,
            "delta_dominates": self.delta_dominates,
            "agrees": self.agrees,
        }


def converse_witness(
    space: FiniteMetricSpace, pair: SubsetPair, rtol: float = 1e-12
) -> ConverseReport:
    """Identity map from ``(A ∪ B, d)`` into the glued metric.

    Its restrictions to A and B are isometries, and its Lipschitz constant
    is the LP constant ``k``; ``agrees`` records the latter to ``rtol``.
    """
    glued = glued_metric(space, pair)
    base, local = glued.base, glued.pair
    if not any(a != b for a in local.A for b in local.B):
        raise InputError("no cross pair a != b")
    ident = MappedFunction(base, glued.as_space(), np.arange(base.n))
    lip = lipschitz_constant(ident).value
    lip_a = lipschitz_constant(restrict_function(ident, local.A)).value
    lip_b = lipschitz_constant(restrict_function(ident, local.B)).value
    k = lp_constant(base, local).k
    return ConverseReport(
        k=k,
        lip_identity=lip,
        lip_identity_a=lip_a,
        lip_identity_b=lip_b,
        delta_dominates=bool(np.all(glued.delta >= base.dist)),
        agrees=abs(lip - k) <= rtol * max(abs(k), 1.0),
    )
