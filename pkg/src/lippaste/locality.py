"""Region-by-region LP constants and the global bound assembled from a cover."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .metricspace import FiniteMetricSpace, InputError, SubsetPair, _as_index_tuple
from .pasting import _max_cross_ratio, _routing, lp_constant


@dataclass(frozen=True)
class Cover:
    """Finite family of index regions whose union contains ``A ∩ B``."""

    regions: tuple[tuple[int, ...], ...]

    def __init__(self, regions: Iterable[Iterable[int]]):
        regs = tuple(_as_index_tuple(r) for r in regions)
        if not regs:
            raise InputError("cover has no regions")
        object.__setattr__(self, "regions", regs)

    def validate(self, space: FiniteMetricSpace, pair: SubsetPair) -> None:
        pair.validate(space.n)
        union = set(pair.union)
        inter = set(pair.intersection)
        covered = set()
        for i, r in enumerate(self.regions):
            if not r:
                raise InputError(f"region {i} is empty")
            outside = set(r) - union
            if outside:
                raise InputError(f"region {i} has indices outside A ∪ B: {sorted(outside)}")
            if not inter & set(r):
                raise InputError(f"region {i} does not meet A ∩ B")
            covered |= set(r)
        missing = inter - covered
        if missing:
            raise InputError(f"A ∩ B points not covered: {sorted(missing)}")

    def in_delta(self, n: int) -> np.ndarray:
        """Boolean ``n x n`` mask of pairs lying in some ``U_i x U_i``."""
        mask = np.zeros((n, n), dtype=bool)
        for r in self.regions:
            idx = np.asarray(r)
            mask[np.ix_(idx, idx)] = True
        return mask

    def to_json(self) -> dict:
        return {"regions": [list(r) for r in self.regions]}

    @classmethod
    def from_json(cls, doc: dict) -> "Cover":
        if not isinstance(doc, dict) or not isinstance(doc.get("regions"), list):
            raise InputError("cover document needs a 'regions' list")
        if not all(isinstance(r, list) for r in doc["regions"]):
            raise InputError("each region must be a list of indices")
        return cls(doc["regions"])


@dataclass(frozen=True)
class LocalityReport:
    local_ks: tuple[float, ...]
    complement_k: float
    global_bound: float
    sum_bound: float
    direct_k: float
    complement_size: int

    @property
    def holds(self) -> bool:
        return self.direct_k <= self.global_bound

    def to_json(self) -> dict:
        return {
            "local_ks": list(self.local_ks),
            "complement_k": self.complement_k,
            "global_bound": self.global_bound,
            "sum_bound": self.sum_bound,
            "direct_k": self.direct_k,
            "complement_size": self.complement_size,
            "holds": self.holds,
        }


def local_lp_constants(
    space: FiniteMetricSpace, pair: SubsetPair, cover: Cover
) -> list[float]:
    """LP constant of ``(A ∩ U_i, B ∩ U_i)`` routed only through ``A ∩ B ∩ U_i``."""
    cover.validate(space, pair)
    a, b, x = set(pair.A), set(pair.B), set(pair.intersection)
    out = []
    for r in cover.regions:
        rs = set(r)
        via = sorted(x & rs)
        if not via:
            raise InputError("region with empty A ∩ B ∩ U")
        res = _max_cross_ratio(space.dist, sorted(a & rs), sorted(b & rs), via)
        out.append(1.0 if res is None else res[0])
    return out


def complement_constant(
    space: FiniteMetricSpace, pair: SubsetPair, cover: Cover
) -> tuple[float, int]:
    """Max routed ratio over cross pairs outside every ``U_i x U_i``.

    Returns ``(K_C, |C|)``; ``K_C`` is 0 when the complement is empty.
    """
    cover.validate(space, pair)
    if pair.disjoint:
        raise InputError("complement constant needs A ∩ B nonempty")
    rows = np.asarray(pair.A)
    cols = np.asarray(pair.B)
    in_c = ~cover.in_delta(space.n)[np.ix_(rows, cols)]
    # a == b lies in A ∩ B, hence in some region, hence never in C
    size = int(in_c.sum())
    if size == 0:
        return 0.0, 0
    best, _ = _routing(space.dist, rows, cols, pair.intersection)
    ratio = np.where(in_c, best / np.where(in_c, space.dist[np.ix_(rows, cols)], 1.0), -np.inf)
    return float(ratio.max()), size


def global_bound_from_cover(
    space: FiniteMetricSpace, pair: SubsetPair, cover: Cover
) -> LocalityReport:
    ks = local_lp_constants(space, pair, cover)
    kc, size = complement_constant(space, pair, cover)
    direct = lp_constant(space, pair).k
    rep = LocalityReport(
        local_ks=tuple(ks),
        complement_k=kc,
        global_bound=max(kc, max(ks)),
        sum_bound=kc + max(ks),
        direct_k=direct,
        complement_size=size,
    )
    if not rep.holds:
        raise AssertionError(
            f"direct k {rep.direct_k!r} exceeds cover bound {rep.global_bound!r}"
        )
    return rep


def ball_cover(space: FiniteMetricSpace, pair: SubsetPair, radius: float) -> Cover:
    """One region per intersection point: the ``A ∪ B`` points strictly within ``radius``."""
    if not radius > 0:
        raise InputError("radius must be positive")
    pair.validate(space.n)
    if pair.disjoint:
        raise InputError("ball cover needs A ∩ B nonempty")
    union = np.asarray(pair.union)
    regions = []
    for y in pair.intersection:
        near = union[space.dist[y, union] < radius]
        regions.append(sorted(set(near.tolist()) | {y}))
    return Cover(regions)
