"""Sampled curves and subspaces meeting transversally or tangentially, their
metrics, and refinement sweeps of the LP constant."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path
from scipy.spatial.distance import cdist

from .metricspace import FiniteMetricSpace, InputError, SubsetPair
from .pasting import lp_constant

UNIT_TOL = 1e-12
DUP_TOL = 1e-12


def euclidean_space_from_points(coordinates, labels=None) -> FiniteMetricSpace:
    pts = np.asarray(coordinates, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise InputError("need at least two points")
    d = cdist(pts, pts)
    dup = np.argwhere(np.triu(d <= DUP_TOL, k=1))
    if dup.size:
        i, j = dup[0]
        raise InputError(f"duplicate points at indices {int(i)} and {int(j)}")
    return FiniteMetricSpace(d, labels)


def sphere_distances(points) -> np.ndarray:
    """Great-circle distances between unit vectors via atan2(|x × y|, x · y)."""
    p = np.asarray(points, dtype=np.float64)
    cross = np.cross(p[:, None, :], p[None, :, :])
    d = np.arctan2(np.linalg.norm(cross, axis=-1), p @ p.T)
    np.fill_diagonal(d, 0.0)
    return (d + d.T) / 2


def graph_geodesic_metric(coordinates, k_neighbors: int, labels=None) -> FiniteMetricSpace:
    """Shortest-path distances on the symmetrized k-NN graph with Euclidean edges."""
    pts = np.asarray(coordinates, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = pts.shape[0]
    if k_neighbors < 2:
        raise InputError("k_neighbors must be >= 2")
    euclid = euclidean_space_from_points(pts).dist
    k = min(k_neighbors, n - 1)
    order = np.argsort(euclid, axis=1, kind="stable")[:, 1 : k + 1]
    rows = np.repeat(np.arange(n), k)
    cols = order.ravel()
    w = np.zeros((n, n))
    w[rows, cols] = euclid[rows, cols]
    w = np.maximum(w, w.T)
    graph = csr_matrix(w)
    ncomp, comp = connected_components(graph, directed=False)
    if ncomp > 1:
        groups = [np.flatnonzero(comp == c).tolist() for c in range(ncomp)]
        raise InputError(f"k-NN graph is disconnected into {ncomp} components: {groups}")
    d = shortest_path(graph, method="D", directed=False)
    d = np.minimum(d, d.T)
    return FiniteMetricSpace(d, labels)


@dataclass(frozen=True, eq=False)
class EmbeddedSample:
    """Points in R^n with A/B tags; shared points appear once, tagged in both."""

    coordinates: np.ndarray
    a_indices: tuple[int, ...]
    b_indices: tuple[int, ...]
    metric_mode: str = "euclidean"
    k_neighbors: int = 0

    def __post_init__(self):
        pts = np.asarray(self.coordinates, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] < 2:
            raise InputError("coordinates must be points in R^n with n >= 2")
        if self.metric_mode == "sphere_intrinsic":
            norms = np.linalg.norm(pts, axis=1)
            if np.any(np.abs(norms - 1.0) > UNIT_TOL):
                raise InputError("sphere_intrinsic needs unit-norm points")
            pts = pts / norms[:, None]
        elif self.metric_mode == "graph_geodesic":
            if self.k_neighbors < 2:
                raise InputError("graph_geodesic needs k_neighbors >= 2")
        elif self.metric_mode != "euclidean":
            raise InputError(f"unknown metric mode {self.metric_mode!r}")
        pts.setflags(write=False)
        object.__setattr__(self, "coordinates", pts)

    @property
    def pair(self) -> SubsetPair:
        return SubsetPair(self.a_indices, self.b_indices)

    def labels(self) -> list[str]:
        a, b = set(self.a_indices), set(self.b_indices)
        out = []
        for i in range(len(self.coordinates)):
            tag = "X" if (i in a and i in b) else ("A" if i in a else "B")
            out.append(f"{tag}{i}")
        return out

    def space(self) -> FiniteMetricSpace:
        if self.metric_mode == "euclidean":
            return euclidean_space_from_points(self.coordinates, self.labels())
        if self.metric_mode == "sphere_intrinsic":
            return FiniteMetricSpace(sphere_distances(self.coordinates), self.labels())
        return graph_geodesic_metric(self.coordinates, self.k_neighbors, self.labels())

    def to_metric(self) -> tuple[FiniteMetricSpace, SubsetPair]:
        return self.space(), self.pair

    def to_json(self) -> dict:
        return {
            "dim": int(self.coordinates.shape[1]),
            "points": self.coordinates.tolist(),
            "A": list(self.a_indices),
            "B": list(self.b_indices),
        }


def _tagged(shared, only_a, only_b, **kw) -> EmbeddedSample:
    pts = [*shared, *only_a, *only_b]
    ns, na = len(shared), len(only_a)
    a = list(range(ns + na))
    b = list(range(ns)) + list(range(ns + na, len(pts)))
    return EmbeddedSample(np.array(pts, dtype=np.float64), tuple(a), tuple(b), **kw)


def tangential_parabola_points(n_per_curve: int, t_min: float) -> EmbeddedSample:
    """Line ``(t, 0)`` and parabola ``(t, t^2)`` touching at the origin.

    Each curve has ``n_per_curve`` points: the shared origin plus a
    geometric grid on ``[t_min, 1]``.
    """
    if n_per_curve < 2:
        raise InputError("n_per_curve must be >= 2")
    if not 0 < t_min <= 1:
        raise InputError("t_min must lie in (0, 1]")
    if t_min == 1 and n_per_curve > 2:
        raise InputError("t_min = 1 leaves room for one grid point only")
    ts = np.geomspace(t_min, 1.0, n_per_curve - 1)
    return _tagged([(0.0, 0.0)], [(t, 0.0) for t in ts], [(t, t * t) for t in ts])


def sample_tangential_parabola(n_per_curve: int, t_min: float):
    return tangential_parabola_points(n_per_curve, t_min).to_metric()


def _snapped_linspace(n: int) -> np.ndarray:
    # odd n can leave a rounding residue like 1e-17 where 0 belongs
    g = np.linspace(-1.0, 1.0, n)
    g[np.abs(g) < 1e-12] = 0.0
    return g


def _line_grid(n: int) -> np.ndarray:
    g = _snapped_linspace(n)
    return g[g != 0.0]


def transverse_lines_points(n_per_line: int) -> EmbeddedSample:
    """Coordinate axes in the plane on ``linspace(-1, 1, n_per_line)``, sharing the origin."""
    if n_per_line < 2:
        raise InputError("n_per_line must be >= 2")
    g = _line_grid(n_per_line)
    return _tagged([(0.0, 0.0)], [(t, 0.0) for t in g], [(0.0, t) for t in g])


def sample_transverse_lines(n_per_line: int):
    return transverse_lines_points(n_per_line).to_metric()


def great_circles_points(n_per_circle: int, angle: float) -> EmbeddedSample:
    """Equator and a great circle tilted by ``angle`` about the x-axis.

    Both are sampled at ``2 pi j / n``; they share ``(1, 0, 0)`` and
    ``(-1, 0, 0)``.
    """
    if n_per_circle < 4 or n_per_circle % 2:
        raise InputError("n_per_circle must be even and >= 4")
    if not 0 < angle < math.pi:
        raise InputError("angle must lie in (0, pi)")
    th = 2 * np.pi * np.arange(n_per_circle) / n_per_circle
    c, s = np.cos(th), np.sin(th)
    half = n_per_circle // 2
    off = [j for j in range(n_per_circle) if j not in (0, half)]
    eq = np.stack([c, s, np.zeros_like(c)], axis=1)
    tilt = np.stack([c, s * math.cos(angle), s * math.sin(angle)], axis=1)
    shared = [(1.0, 0.0, 0.0), (-1.0, 0.0, 0.0)]
    return _tagged(shared, eq[off], tilt[off], metric_mode="sphere_intrinsic")


def sample_great_circles(n_per_circle: int, angle: float):
    return great_circles_points(n_per_circle, angle).to_metric()


@dataclass(frozen=True)
class LinearChart:
    """Coordinate split ``(u, v, w)``; A is ``{u = 0}``, B is ``{v = 0}``."""

    du: int
    dv: int
    dw: int = 0

    def __post_init__(self):
        if self.du < 1 or self.dv < 1 or self.dw < 0:
            raise InputError("need du >= 1, dv >= 1, dw >= 0")

    @property
    def n(self) -> int:
        return self.du + self.dv + self.dw

    def split(self, p):
        p = np.asarray(p)
        return p[..., : self.du], p[..., self.du : self.du + self.dv], p[..., self.du + self.dv :]


def axis_grid(grid: int) -> np.ndarray:
    """``linspace(-1, 1, grid)`` with 0 inserted if missing."""
    g = _snapped_linspace(grid)
    if not np.any(g == 0.0):
        g = np.sort(np.append(g, 0.0))
    return g


def linear_transverse_points(chart: LinearChart, grid: int) -> EmbeddedSample:
    if grid < 2:
        raise InputError("grid must be >= 2")
    g = axis_grid(grid)
    zu, zv = (0.0,) * chart.du, (0.0,) * chart.dv
    shared, only_a, only_b = [], [], []
    for w in product(g, repeat=chart.dw):
        shared.append(zu + zv + w)
    for v in product(g, repeat=chart.dv):
        if any(x != 0.0 for x in v):
            only_a.extend(zu + v + w for w in product(g, repeat=chart.dw))
    for u in product(g, repeat=chart.du):
        if any(x != 0.0 for x in u):
            only_b.extend(u + zv + w for w in product(g, repeat=chart.dw))
    return _tagged(shared, only_a, only_b)


def sample_linear_transverse(chart: LinearChart, grid: int):
    return linear_transverse_points(chart, grid).to_metric()


@dataclass(frozen=True)
class SweepRecord:
    h: float
    n_points: int
    k: float
    k_times_h: float


FAMILIES = ("tangential_parabola", "transverse_lines", "great_circles", "linear")


def family_sample(family: str, h: float, angle: float | None = None,
                  chart: LinearChart | None = None) -> EmbeddedSample:
    """Sample of ``family`` at refinement ``h``.

    ``h`` is ``t_min`` for the parabola (the grid is geometric with ratio at
    most 2**(1/4)), the grid spacing on ``[-1, 1]`` for lines and linear
    charts, and the angular spacing for great circles.
    """
    if not h > 0:
        raise InputError("h must be positive")
    if family == "tangential_parabola":
        steps = 4 * max(1, math.ceil(math.log2(1.0 / h) - 1e-12)) if h < 1 else 0
        return tangential_parabola_points(steps + 2, min(h, 1.0))
    if family == "transverse_lines":
        return transverse_lines_points(max(2, int(round(2.0 / h)) + 1))
    if family == "great_circles":
        if angle is None:
            raise InputError("great_circles needs an angle")
        n = max(4, 2 * int(round(math.pi / h)))
        return great_circles_points(n, angle)
    if family == "linear":
        if chart is None:
            raise InputError("linear family needs a chart")
        return linear_transverse_points(chart, max(2, int(round(2.0 / h)) + 1))
    raise InputError(f"unknown family {family!r}; expected one of {FAMILIES}")


def density_sweep(family: str, h_values: Sequence[float], angle: float | None = None,
                  chart: LinearChart | None = None) -> list[SweepRecord]:
    hs = [float(h) for h in h_values]
    if not hs or any(h <= 0 for h in hs):
        raise InputError("h values must be positive")
    if any(b >= a for a, b in zip(hs, hs[1:])):
        raise InputError("h values must be strictly decreasing")
    out = []
    for h in hs:
        space, pair = family_sample(family, h, angle=angle, chart=chart).to_metric()
        k = lp_constant(space, pair).k
        out.append(SweepRecord(h, space.n, k, k * h))
    return out


def sweep_csv(records: Sequence[SweepRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["h", "n_points", "k", "k_times_h"])
    for r in records:
        w.writerow([format(r.h, ".17g"), r.n_points, format(r.k, ".17g"),
                    format(r.k_times_h, ".17g")])
    return buf.getvalue()
