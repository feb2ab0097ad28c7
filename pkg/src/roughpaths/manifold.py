"""Chart-based rough paths on locally Lipschitz manifolds.

Manifold points are ambient coordinates (circle in R^2, sphere in R^3, flat
torus as class representatives in [0,1)^2).  Charts are closed-form maps
with hand-written transition jets; a local rough path is a family of
chart-coordinate rough paths over a compact time cover, consistent on
overlaps under the transition pushforwards.

The consistency machinery is written once, generically, over a colouring
functor (restrict / pushforward / distance); the rough-path check and the
continuous-path check are the two built-in instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .covers import CompactCover, extract_subdivision
from .errors import CoverageGapError, DomainExitError
from .integration import pushforward
from .lipschitz import LipJet
from .rough import (
    GridFunctional,
    RoughPath,
    concat_functionals,
    dp_product_metric,
    from_bv_path,
    restrict,
)
from .tensor import TruncTensor
from .variation import SampledPath


@dataclass
class Chart:
    """A chart: membership test plus closed-form coordinate maps."""

    chart_id: str
    dim: int
    to_coords: object
    from_coords: object
    contains: object  # contains(points, margin) -> bool array


@dataclass
class Atlas:
    """Charts with pairwise transition jets and a Lipschitz grade."""

    name: str
    charts: dict
    transitions: dict  # (from_id, to_id) -> LipJet
    gamma: float = 3.0
    default_margin: float = 0.1

    def chart(self, chart_id: str) -> Chart:
        return self.charts[chart_id]

    def transition(self, from_id: str, to_id: str) -> LipJet:
        if from_id == to_id:
            from .lipschitz import identity_jet

            return identity_jet(self.charts[from_id].dim, degree=2)
        key = (from_id, to_id)
        if key not in self.transitions:
            raise ValueError(f"missing transition jet {from_id} -> {to_id}")
        return self.transitions[key]


def chart_roundtrip_defect(atlas: Atlas, points) -> float:
    """max |phi^-1(phi(x)) - x| over sampled points inside each chart."""
    worst = 0.0
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    for chart in atlas.charts.values():
        inside = chart.contains(pts, 1e-6)
        if not np.any(inside):
            continue
        sel = pts[inside]
        back = chart.from_coords(chart.to_coords(sel))
        worst = max(worst, float(np.abs(back - sel).max()))
    return worst


def atlas_cocycle_defect(atlas: Atlas, points, margin: float = 1e-3) -> float:
    """Transition cocycle defect on triple overlaps, sampled at points."""
    worst = 0.0
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    ids = sorted(atlas.charts)
    for i in ids:
        for j in ids:
            for k in ids:
                if len({i, j, k}) < 3:
                    continue
                ci, cj, ck = atlas.chart(i), atlas.chart(j), atlas.chart(k)
                inside = ci.contains(pts, margin) & cj.contains(pts, margin) & ck.contains(
                    pts, margin
                )
                if not np.any(inside):
                    continue
                ui = ci.to_coords(pts[inside])
                direct = np.vstack([atlas.transition(i, k).value(u) for u in ui])
                via = np.vstack(
                    [
                        atlas.transition(j, k).value(atlas.transition(i, j).value(u))
                        for u in ui
                    ]
                )
                worst = max(worst, float(np.abs(direct - via).max()))
    return worst


# -- built-in atlases --------------------------------------------------------


def _branch_shift_jet(shift_fn, dim: int, name: str) -> LipJet:
    """Locally constant shift: derivative is the identity, curvature zero."""

    def f0(x):
        return x + shift_fn(x)

    def f1(x):
        return np.eye(dim)

    def f2(x):
        return np.zeros((dim, dim, dim))

    return LipJet(dim, (dim,), 2, 1.0, (f0, f1, f2), norm=1.0, name=name)


def circle_atlas() -> Atlas:
    """Two angle charts on the unit circle; transitions are 2 pi shifts."""

    def angle(points):
        pts = np.atleast_2d(points)
        return np.arctan2(pts[:, 1], pts[:, 0])

    def to_east(points):  # angle in (0, 2 pi), excludes (1, 0)
        return np.mod(angle(points), 2 * np.pi)[:, None]

    def to_west(points):  # angle in (-pi, pi), excludes (-1, 0)
        return angle(points)[:, None]

    def from_angle(coords):
        th = np.atleast_2d(coords)[:, 0]
        return np.stack([np.cos(th), np.sin(th)], axis=1)

    def east_contains(points, margin=0.0):
        th = np.mod(angle(points), 2 * np.pi)
        return np.minimum(th, 2 * np.pi - th) > margin

    def west_contains(points, margin=0.0):
        return np.abs(angle(points)) < np.pi - margin

    east = Chart("east", 1, to_east, from_angle, east_contains)
    west = Chart("west", 1, to_west, from_angle, west_contains)
    east_to_west = _branch_shift_jet(
        lambda th: np.where(th > np.pi, -2 * np.pi, 0.0), 1, "east->west"
    )
    west_to_east = _branch_shift_jet(
        lambda th: np.where(th < 0.0, 2 * np.pi, 0.0), 1, "west->east"
    )
    return Atlas(
        "circle",
        {"east": east, "west": west},
        {("east", "west"): east_to_west, ("west", "east"): west_to_east},
        gamma=3.0,
        default_margin=0.35,
    )


def sphere_atlas() -> Atlas:
    """Two stereographic charts on the unit sphere."""

    def from_north(points):
        pts = np.atleast_2d(points)
        return pts[:, :2] / (1.0 - pts[:, 2:3])

    def from_south(points):
        pts = np.atleast_2d(points)
        return pts[:, :2] / (1.0 + pts[:, 2:3])

    def inv_north(coords):
        u = np.atleast_2d(coords)
        r2 = (u**2).sum(axis=1, keepdims=True)
        return np.hstack([2 * u, r2 - 1.0]) / (r2 + 1.0)

    def inv_south(coords):
        u = np.atleast_2d(coords)
        r2 = (u**2).sum(axis=1, keepdims=True)
        return np.hstack([2 * u, 1.0 - r2]) / (r2 + 1.0)

    def north_contains(points, margin=0.0):
        return np.atleast_2d(points)[:, 2] < 1.0 - margin

    def south_contains(points, margin=0.0):
        return np.atleast_2d(points)[:, 2] > -1.0 + margin

    def inversion_evaluators():
        def f0(u):
            r2 = float(u @ u)
            return u / r2

        def f1(u):
            r2 = float(u @ u)
            return np.eye(2) / r2 - 2.0 * np.outer(u, u) / r2**2

        def f2(u):
            r2 = float(u @ u)
            eye = np.eye(2)
            sym = (
                np.einsum("ai,j->aij", eye, u)
                + np.einsum("aj,i->aij", eye, u)
                + np.einsum("ij,a->aij", eye, u)
            )
            return -2.0 * sym / r2**2 + 8.0 * np.einsum("a,i,j->aij", u, u, u) / r2**3

        return f0, f1, f2

    inversion = LipJet(
        2,
        (2,),
        2,
        1.0,
        inversion_evaluators(),
        name="inversion",
        valid=lambda u: float(u @ u) > 1e-10,
    )
    north = Chart("north", 2, from_north, inv_north, north_contains)
    south = Chart("south", 2, from_south, inv_south, south_contains)
    return Atlas(
        "sphere",
        {"north": north, "south": south},
        {("north", "south"): inversion, ("south", "north"): inversion},
        gamma=3.0,
        default_margin=0.25,
    )


def torus_atlas() -> Atlas:
    """Four translated square charts on the flat torus R^2 / Z^2."""

    def wrap_half(v):
        return np.mod(v + 0.5, 1.0) - 0.5

    def make_chart(cid, center):
        center = np.asarray(center, dtype=float)

        def to_coords(points):
            pts = np.atleast_2d(points)
            return center + wrap_half(pts - center)

        def from_coords(coords):
            return np.mod(np.atleast_2d(coords), 1.0)

        def contains(points, margin=0.0):
            w = wrap_half(np.atleast_2d(points) - center)
            return np.all(np.abs(w) < 0.5 - margin, axis=1)

        return Chart(cid, 2, to_coords, from_coords, contains)

    centers = {
        "c00": (0.0, 0.0),
        "c10": (0.5, 0.0),
        "c01": (0.0, 0.5),
        "c11": (0.5, 0.5),
    }
    charts = {cid: make_chart(cid, c) for cid, c in centers.items()}
    transitions = {}
    for i, ci in centers.items():
        for k, ck in centers.items():
            if i == k:
                continue
            ck_arr = np.asarray(ck, dtype=float)
            transitions[(i, k)] = _branch_shift_jet(
                lambda u, ck_arr=ck_arr: (ck_arr + wrap_half(u - ck_arr)) - u,
                2,
                f"{i}->{k}",
            )
    return Atlas("torus", charts, transitions, gamma=3.0, default_margin=0.15)


def euclidean_atlas(dim: int) -> Atlas:
    """Single identity chart on R^n."""

    def ident(points):
        return np.atleast_2d(np.asarray(points, dtype=float))

    def contains(points, margin=0.0):
        return np.ones(len(np.atleast_2d(points)), dtype=bool)

    chart = Chart("global", dim, ident, ident, contains)
    return Atlas(f"euclidean{dim}", {"global": chart}, {}, default_margin=0.0)


BUILTIN_ATLASES = {
    "circle": circle_atlas,
    "sphere": sphere_atlas,
    "torus": torus_atlas,
}


def build_atlas(name: str, dim: int = 2) -> Atlas:
    if name in BUILTIN_ATLASES:
        return BUILTIN_ATLASES[name]()
    if name.startswith("euclidean"):
        return euclidean_atlas(dim)
    raise ValueError(f"unknown atlas {name!r}; known: {sorted(BUILTIN_ATLASES)}")


# -- local rough paths -------------------------------------------------------


@dataclass
class LocalItem:
    """One chart-coordinate rough path over its piece of the time cover."""

    chart_id: str
    interval: tuple
    path: SampledPath
    functional: GridFunctional

    def as_rough(self, p: float) -> RoughPath:
        return RoughPath(self.path.values[0], self.functional, p, self.path)

    def to_dict(self) -> dict:
        return {
            "chart": self.chart_id,
            "interval": list(self.interval),
            "times": self.path.times.tolist(),
            "values": self.path.values.tolist(),
            "cells": [c.to_dict() for c in self.functional.cells],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "LocalItem":
        path = SampledPath(payload["times"], payload["values"])
        func = GridFunctional(
            payload["times"], [TruncTensor.from_dict(c) for c in payload["cells"]]
        )
        return cls(payload["chart"], tuple(payload["interval"]), path, func)


@dataclass
class LocalRoughPath:
    """Chart-wise rough paths over a compact cover of the time span."""

    items: list
    p: float
    span: tuple

    def cover(self) -> CompactCover:
        return CompactCover(tuple(item.interval for item in self.items), self.span)

    def validate(self) -> None:
        self.cover().validate()
        for item in self.items:
            if abs(item.path.times[0] - item.interval[0]) > 1e-9 or abs(
                item.path.times[-1] - item.interval[1]
            ) > 1e-9:
                raise ValueError(f"item grid does not span its interval {item.interval}")
            item.as_rough(self.p).validate()

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "span": list(self.span),
            "items": [item.to_dict() for item in self.items],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "LocalRoughPath":
        return cls(
            [LocalItem.from_dict(it) for it in payload["items"]],
            payload["p"],
            tuple(payload["span"]),
        )


def lift_path(
    x: SampledPath, atlas: Atlas, p: float, margin: float | None = None
) -> LocalRoughPath:
    """Chart-wise canonical lift of a manifold-valued sampled path.

    The time cover is built from maximal grid-aligned runs of samples lying
    strictly (with margin) inside each chart; each item's coordinate path is
    the chart image of the samples and its functional the bounded-variation
    lift.  Raises CoverageGapError when some sample is not comfortably
    inside any chart.
    """
    margin = atlas.default_margin if margin is None else margin
    items = []
    for cid, chart in atlas.charts.items():
        inside = np.asarray(chart.contains(x.values, margin), dtype=bool)
        start = None
        for i in range(len(inside) + 1):
            if i < len(inside) and inside[i]:
                if start is None:
                    start = i
                continue
            if start is not None and i - 1 > start:
                coords = chart.to_coords(x.values[start:i])
                sub = SampledPath(x.times[start:i], coords)
                items.append(
                    LocalItem(
                        cid,
                        (float(sub.times[0]), float(sub.times[-1])),
                        sub,
                        from_bv_path(sub, p).functional,
                    )
                )
            start = None
    if not items:
        raise CoverageGapError("no chart contains any run of samples", witness=x.times[0])
    items.sort(key=lambda it: it.interval)
    # drop items whose interval sits inside another item's interval
    kept = []
    for idx, item in enumerate(items):
        drop = False
        for jdx, other in enumerate(items):
            if idx == jdx:
                continue
            nested = (
                other.interval[0] <= item.interval[0]
                and item.interval[1] <= other.interval[1]
            )
            if nested and (item.interval != other.interval or jdx < idx):
                drop = True
                break
        if not drop:
            kept.append(item)
    span = (float(x.times[0]), float(x.times[-1]))
    local = LocalRoughPath(kept, p, span)
    local.cover().validate()
    return local


# -- colouring functors ------------------------------------------------------


@dataclass
class ColourFunctor:
    """A notion of decorated path: restriction, pushforward, distance, trace."""

    name: str
    restrict: object  # (payload, window) -> payload
    pushforward: object  # (jet, payload) -> payload
    distance: object  # (payload, payload) -> float
    trace_of: object  # payload -> SampledPath


def rough_path_functor(sew_tol: float = 1e-10, max_depth: int = 14) -> ColourFunctor:
    """Rough paths as coloured paths; pushforward is the one-form integral."""
    return ColourFunctor(
        name="rough",
        restrict=lambda rough, window: rough.restrict(*window),
        pushforward=lambda jet, rough: pushforward(
            jet, rough, tol=sew_tol, max_depth=max_depth
        ),
        distance=dp_product_metric,
        trace_of=lambda rough: rough.trace,
    )


def continuous_path_functor() -> ColourFunctor:
    """Continuous paths as coloured paths; pushforward is plain composition."""

    def push(jet, path):
        return SampledPath(path.times, np.vstack([jet.value(v) for v in path.values]))

    def dist(a, b):
        times = np.union1d(a.times, b.times)
        va = np.vstack([a.interpolate(t) for t in times])
        vb = np.vstack([b.interpolate(t) for t in times])
        return float(np.abs(va - vb).sum(axis=1).max())

    return ColourFunctor(
        name="continuous",
        restrict=lambda path, window: path.restrict(*window),
        pushforward=push,
        distance=dist,
        trace_of=lambda path: path,
    )


@dataclass
class ConsistencyReport:
    ok: bool
    pairs: list
    max_distance: float

    def to_dict(self) -> dict:
        return {
            "ok": bool(self.ok),
            "max_distance": self.max_distance,
            "pairs": [
                {"i": i, "k": k, "distance": d} for i, k, d in self.pairs
            ],
        }


def coloured_consistency_check(
    functor: ColourFunctor, items, atlas: Atlas, tol: float = 1e-6
) -> ConsistencyReport:
    """Generic overlap consistency: push item i to chart k, compare with item k.

    items are (chart_id, interval, payload) triples.  Interval overlaps of
    positive length are compared through the functor distance; touching
    intervals reduce to the endpoint condition on traces.
    """
    results = []
    worst = 0.0
    for i in range(len(items)):
        for k in range(len(items)):
            if i >= k:
                continue
            cid_i, iv_i, pay_i = items[i]
            cid_k, iv_k, pay_k = items[k]
            lo = max(iv_i[0], iv_k[0])
            hi = min(iv_i[1], iv_k[1])
            if lo > hi + 1e-12:
                continue
            jet = atlas.transition(cid_i, cid_k)
            if hi - lo <= 1e-12:
                xi = functor.trace_of(pay_i).interpolate(lo)
                xk = functor.trace_of(pay_k).interpolate(lo)
                d = float(np.abs(jet.value(xi) - xk).sum())
            else:
                pushed = functor.pushforward(jet, functor.restrict(pay_i, (lo, hi)))
                d = float(functor.distance(pushed, functor.restrict(pay_k, (lo, hi))))
            results.append((i, k, d))
            worst = max(worst, d)
    return ConsistencyReport(worst <= tol, results, worst)


def consistency_check(
    L: LocalRoughPath,
    atlas: Atlas,
    tol: float = 1e-6,
    sew_tol: float = 1e-10,
    max_depth: int = 14,
) -> ConsistencyReport:
    """Overlap consistency of a local rough path under transition pushforwards."""
    functor = rough_path_functor(sew_tol=sew_tol, max_depth=max_depth)
    items = [
        (item.chart_id, item.interval, item.as_rough(L.p)) for item in L.items
    ]
    return coloured_consistency_check(functor, items, atlas, tol)


def equivalence_check(
    A: LocalRoughPath,
    B: LocalRoughPath,
    atlas: Atlas,
    tol: float = 1e-6,
    sew_tol: float = 1e-10,
    max_depth: int = 14,
) -> bool:
    """Whether the union of two local rough paths is again consistent."""
    if A.p != B.p:
        raise ValueError("local rough paths must share p")
    if abs(A.span[0] - B.span[0]) > 1e-9 or abs(A.span[1] - B.span[1]) > 1e-9:
        raise ValueError("local rough paths must share their span")
    union = LocalRoughPath(list(A.items) + list(B.items), A.p, A.span)
    report = consistency_check(union, atlas, tol, sew_tol, max_depth)
    return report.ok


def reconstruct(L: LocalRoughPath, atlas: Atlas) -> RoughPath:
    """Develop a local rough path into a single chart's coordinates.

    Requires transitions that act as local translations at the junction
    points (identity derivative): flat atlases, the circle and the torus
    qualify.  The functional cells are translation invariant, so the pieces
    concatenate verbatim while the trace picks up the accumulated shifts.
    """
    L.validate()
    cuts = extract_subdivision(L.cover())
    piece_items = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        owner = None
        for item in L.items:
            if item.interval[0] <= lo + 1e-9 and hi <= item.interval[1] + 1e-9:
                owner = item
                break
        if owner is None:
            raise CoverageGapError("subdivision piece not inside any item", witness=lo)
        piece_items.append((lo, hi, owner))

    offset = np.zeros(atlas.chart(piece_items[0][2].chart_id).dim)
    functional = None
    trace_times, trace_values = [], []
    previous = None
    for lo, hi, item in piece_items:
        if previous is not None and item is not previous:
            u = item.path.interpolate(lo)
            jet = atlas.transition(item.chart_id, previous.chart_id)
            deriv_gap = float(np.abs(jet.deriv(1, u) - np.eye(u.size)).max())
            if deriv_gap > 1e-9:
                raise ValueError(
                    "reconstruct needs translation transitions or a global chart; "
                    f"transition {item.chart_id}->{previous.chart_id} has derivative "
                    f"defect {deriv_gap:.2e}"
                )
            offset = offset + (jet.value(u) - u)
        piece_func = restrict(item.functional, lo, hi)
        piece_path = item.path.restrict(lo, hi).shift(offset)
        functional = (
            piece_func if functional is None else concat_functionals(functional, piece_func)
        )
        skip = 1 if trace_times else 0
        trace_times.extend(piece_path.times[skip:])
        trace_values.extend(piece_path.values[skip:])
        previous = item
    trace = SampledPath(np.asarray(trace_times), np.vstack(trace_values))
    out = RoughPath(trace.values[0], functional, L.p, trace)
    out.validate(atol=1e-7)
    return out
