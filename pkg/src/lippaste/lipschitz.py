"""Lipschitz constants of maps between finite metric spaces, and the forward
pasting bound."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Optional

import numpy as np

from .metricspace import TAU_METRIC, FiniteMetricSpace, InputError, SubsetPair, _as_index_tuple

if TYPE_CHECKING:
    from .pasting import LpReport


@dataclass(frozen=True, eq=False)
class MappedFunction:
    domain: FiniteMetricSpace
    codomain: FiniteMetricSpace
    assignment: np.ndarray

    def __init__(self, domain: FiniteMetricSpace, codomain: FiniteMetricSpace, assignment):
        a = np.asarray(assignment)
        if a.ndim != 1 or a.shape[0] != domain.n:
            raise InputError(f"assignment must have length {domain.n}")
        if a.size and not np.issubdtype(a.dtype, np.integer):
            raise InputError("assignment entries must be integers")
        a = a.astype(np.intp)
        if a.size and (a.min() < 0 or a.max() >= codomain.n):
            raise InputError(f"assignment values must lie in 0..{codomain.n - 1}")
        a.setflags(write=False)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "codomain", codomain)
        object.__setattr__(self, "assignment", a)

    def image_dist(self) -> np.ndarray:
        """``delta(f(i), f(j))`` for all domain pairs."""
        return self.codomain.dist[np.ix_(self.assignment, self.assignment)]

    @classmethod
    def from_json(cls, doc: dict, domain=None, codomain=None) -> "MappedFunction":
        if not isinstance(doc, dict) or "assignment" not in doc:
            raise InputError("function document needs an 'assignment'")
        assignment = doc["assignment"]
        if not isinstance(assignment, list) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in assignment
        ):
            raise InputError("'assignment' must be a list of integers")
        if domain is None:
            domain = FiniteMetricSpace.from_json(doc["domain"])
        if codomain is None:
            codomain = FiniteMetricSpace.from_json(doc["codomain"])
        return cls(domain, codomain, np.array(assignment, dtype=np.intp))


@dataclass(frozen=True)
class LipschitzReport:
    value: float
    witness: Optional[tuple[int, int]]

    def to_json(self) -> dict:
        return {"value": self.value, "witness": list(self.witness) if self.witness else None}


def _max_ratio(num: np.ndarray, den: np.ndarray, mask: np.ndarray):
    """Max of num/den over ``mask`` with the row-major-first argmax."""
    if not mask.any():
        return 0.0, None
    ratio = np.zeros_like(num)
    np.divide(num, den, out=ratio, where=mask)
    ratio[~mask] = -np.inf
    flat = int(np.argmax(ratio))
    i, j = divmod(flat, ratio.shape[1])
    return float(ratio[i, j]), (i, j)


def lipschitz_constant(f: MappedFunction) -> LipschitzReport:
    """Max of ``delta(f(i), f(j)) / d(i, j)`` over ``i < j``.

    The witness is the lexicographically smallest pair attaining the max;
    it is omitted when the value is 0.
    """
    n = f.domain.n
    if n < 1:
        raise InputError("empty domain")
    mask = np.triu(np.ones((n, n), dtype=bool), k=1)
    value, wit = _max_ratio(f.image_dist(), f.domain.dist, mask)
    if value == 0.0:
        return LipschitzReport(0.0, None)
    return LipschitzReport(value, (int(wit[0]), int(wit[1])))


def restrict_function(f: MappedFunction, indices: Iterable[int]) -> MappedFunction:
    from .metricspace import restrict

    idx = _as_index_tuple(indices)
    dom = restrict(f.domain, idx)
    return MappedFunction(dom, f.codomain, f.assignment[np.asarray(idx, dtype=np.intp)])


@dataclass(frozen=True)
class BoundCheckReport:
    lip_a: float
    lip_b: float
    l0: float
    k: float
    l: float
    lip_f: float
    bound: float
    verdict: bool
    tight: bool
    witness: Optional[tuple[int, int]]

    def to_json(self) -> dict:
        return {
            "lip_A": self.lip_a,
            "lip_B": self.lip_b,
            "L0": self.l0,
            "k": self.k,
            "L": self.l,
            "lip_f": self.lip_f,
            "bound": self.bound,
            "verdict": self.verdict,
            "tight": self.tight,
            "witness": list(self.witness) if self.witness else None,
        }


def _check_union(f: MappedFunction, pair: SubsetPair) -> None:
    pair.validate(f.domain.n)
    if pair.union != tuple(range(f.domain.n)):
        raise InputError("f's domain must be exactly A ∪ B (restrict the space first)")


def pasting_bound_check(
    f: MappedFunction, pair: SubsetPair, lp: "LpReport", tol: float = TAU_METRIC
) -> BoundCheckReport:
    """Check ``Lip f <= max(L0 * k, L0)`` with ``L0 = max(Lip f|A, Lip f|B)``.

    ``pair`` indexes ``f.domain``, which must be the space restricted to
    ``A ∪ B``. The comparison is relative: ``Lip f <= bound * (1 + tol)``.
    """
    _check_union(f, pair)
    if pair.disjoint or lp.disjoint:
        raise InputError("A and B are disjoint; use disjoint_bound_check instead")
    lip_a = lipschitz_constant(restrict_function(f, pair.A)).value
    lip_b = lipschitz_constant(restrict_function(f, pair.B)).value
    l0 = max(lip_a, lip_b)
    big_l = l0 * lp.k
    rep = lipschitz_constant(f)
    bound = max(big_l, l0)
    slack = tol * bound
    return BoundCheckReport(
        lip_a=lip_a,
        lip_b=lip_b,
        l0=l0,
        k=lp.k,
        l=big_l,
        lip_f=rep.value,
        bound=bound,
        verdict=rep.value <= bound + slack,
        tight=abs(rep.value - bound) <= slack,
        witness=rep.witness,
    )


@dataclass(frozen=True)
class DisjointBoundReport:
    l0: float
    image_diameter: float
    separation: float
    bound: float
    lip_f: float
    verdict: bool

    def to_json(self) -> dict:
        return {
            "L0": self.l0,
            "image_diameter": self.image_diameter,
            "separation": self.separation,
            "bound": self.bound,
            "lip_f": self.lip_f,
            "verdict": self.verdict,
        }


def disjoint_bound_check(
    f: MappedFunction, pair: SubsetPair, tol: float = TAU_METRIC
) -> DisjointBoundReport:
    """Separated pieces: ``Lip f <= max(L0, diam f(A ∪ B) / sep)``."""
    _check_union(f, pair)
    if not pair.disjoint:
        raise InputError("A and B intersect; use pasting_bound_check")
    l0 = max(
        lipschitz_constant(restrict_function(f, pair.A)).value,
        lipschitz_constant(restrict_function(f, pair.B)).value,
    )
    sep = float(f.domain.dist[np.ix_(pair.A, pair.B)].min())
    diam = float(f.image_dist().max())
    bound = max(l0, diam / sep)
    lip = lipschitz_constant(f).value
    return DisjointBoundReport(l0, diam, sep, bound, lip, lip <= bound * (1 + tol))
