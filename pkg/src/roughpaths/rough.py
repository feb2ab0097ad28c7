"""Multiplicative functionals on grids, pointed rough paths and their metrics.

A functional is stored by its cells over a fixed grid: one group-like tensor
per grid cell.  Evaluation over any window is the ordered (Chen) product of
cells, so multiplicativity holds by construction; inside a cell the value is
interpolated geodesically, X_(t_i, s) = exp(theta * log(cell)), which is
multiplicative within the cell as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .covers import CompactCover
from .refinement import RefinementInfo, dyadic_limit
from .tensor import (
    TruncTensor,
    admissible_norm,
    lift_degree,
    project,
    tensor_exp,
    tensor_exp_full,
    tensor_log,
    tensor_mul,
)
from .variation import (
    ControlGrid,
    SampledPath,
    beta_p,
    factorial,
    natural_control,
    path_norm,
    superadditive_envelope,
)

_SNAP = 1e-9


@dataclass
class GridFunctional:
    """Degree-m multiplicative functional stored as per-cell tensors."""

    times: np.ndarray
    cells: list

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.cells) + 1:
            raise ValueError("need exactly one cell per grid interval")
        if not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        if not self.cells:
            raise ValueError("functional needs at least one cell")
        dim, deg = self.cells[0].dim, self.cells[0].degree
        for c in self.cells:
            if c.dim != dim or c.degree != deg:
                raise ValueError("cells must share dim and degree")
            if not c.is_group_like(1e-9):
                raise ValueError("cells must have scalar part 1")

    @property
    def dim(self) -> int:
        return self.cells[0].dim

    @property
    def degree(self) -> int:
        return self.cells[0].degree

    @property
    def span(self) -> tuple:
        return float(self.times[0]), float(self.times[-1])

    def copy(self) -> "GridFunctional":
        return GridFunctional(self.times.copy(), [c.copy() for c in self.cells])

    def level1_increments(self) -> np.ndarray:
        return np.vstack([c.level(1) for c in self.cells])

    def trace_from(self, start) -> SampledPath:
        """Piecewise-linear trace determined by the level-1 cells."""
        start = np.asarray(start, dtype=float)
        values = np.vstack([start, start + np.cumsum(self.level1_increments(), axis=0)])
        return SampledPath(self.times.copy(), values)

    def to_dict(self) -> dict:
        return {
            "times": self.times.tolist(),
            "cells": [c.to_dict() for c in self.cells],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "GridFunctional":
        return cls(
            payload["times"], [TruncTensor.from_dict(c) for c in payload["cells"]]
        )


def frac_pow(g: TruncTensor, a: float) -> TruncTensor:
    """Geodesic fraction of a group-like element: exp(a * log g)."""
    return tensor_exp_full(float(a) * tensor_log(g))


def _locate(times: np.ndarray, t: float) -> tuple[int, float]:
    """Cell index and barycentric coordinate of a time in the span."""
    if t < times[0] - _SNAP or t > times[-1] + _SNAP:
        raise ValueError(f"time {t} outside span [{times[0]}, {times[-1]}]")
    t = min(max(t, times[0]), times[-1])
    j = int(np.searchsorted(times, t, side="right"))
    j = min(max(j, 1), len(times) - 1)
    i = j - 1
    theta = (t - times[i]) / (times[i + 1] - times[i])
    if theta < _SNAP:
        theta = 0.0
    elif theta > 1.0 - _SNAP:
        theta = 1.0
    return i, theta


def evaluate(F: GridFunctional, s: float, t: float) -> TruncTensor:
    """X_(s,t): Chen product of cells, geodesic inside partial cells."""
    if t < s:
        raise ValueError("evaluate needs s <= t")
    unit = TruncTensor.unit(F.dim, F.degree)
    if t == s:
        return unit
    i, ti = _locate(F.times, s)
    j, tj = _locate(F.times, t)
    if tj == 1.0:
        j, tj = j + 1, 0.0
    if i == j:
        return frac_pow(F.cells[i], tj - ti)
    out = frac_pow(F.cells[i], 1.0 - ti) if ti > 0.0 else F.cells[i].copy()
    for k in range(i + 1, j):
        out = tensor_mul(out, F.cells[k])
    if tj > 0.0:
        out = tensor_mul(out, frac_pow(F.cells[j], tj))
    return out


def restrict(F: GridFunctional, s: float, t: float) -> GridFunctional:
    """Functional over [s, t]; off-grid endpoints split cells geodesically."""
    if not s < t:
        raise ValueError("restrict needs s < t")
    i, ti = _locate(F.times, s)
    j, tj = _locate(F.times, t)
    if tj == 1.0:
        j, tj = j + 1, 0.0
    times = [s]
    cells = []
    if i == j:
        cells.append(frac_pow(F.cells[i], tj - ti))
        times.append(t)
    else:
        cells.append(frac_pow(F.cells[i], 1.0 - ti) if ti > 0.0 else F.cells[i].copy())
        times.append(F.times[i + 1])
        for k in range(i + 1, j):
            cells.append(F.cells[k].copy())
            times.append(F.times[k + 1])
        if tj > 0.0:
            cells.append(frac_pow(F.cells[j], tj))
            times.append(t)
        else:
            times[-1] = t
    return GridFunctional(np.asarray(times), cells)


def resample(F: GridFunctional, new_times) -> GridFunctional:
    """Functional re-expressed over another grid within the same span."""
    new_times = np.asarray(new_times, dtype=float)
    cells = [evaluate(F, a, b) for a, b in zip(new_times[:-1], new_times[1:])]
    return GridFunctional(new_times, cells)


def merge_grids(*functionals) -> np.ndarray:
    times = np.unique(np.concatenate([F.times for F in functionals]))
    keep = [0]
    for i in range(1, len(times)):
        if times[i] - times[keep[-1]] > _SNAP:
            keep.append(i)
    merged = times[keep]
    merged[-1] = times[-1]
    return merged


def concat_functionals(X: GridFunctional, Y: GridFunctional, atol=1e-9) -> GridFunctional:
    """Concatenation over adjacent grids; multiplicative across the junction."""
    if X.dim != Y.dim or X.degree != Y.degree:
        raise ValueError("functionals must share dim and degree")
    if abs(X.times[-1] - Y.times[0]) > atol:
        raise ValueError(f"grids are not adjacent: {X.times[-1]} vs {Y.times[0]}")
    times = np.concatenate([X.times, Y.times[1:]])
    return GridFunctional(times, [c.copy() for c in X.cells] + [c.copy() for c in Y.cells])


def _window_level_norms(X: GridFunctional, Y: GridFunctional | None = None):
    """Per-level matrices of window norms |X_(i,j)| or |X_(i,j) - Y_(i,j)|."""
    n = len(X.times) - 1
    degree = X.degree
    out = {l: np.zeros((n + 1, n + 1)) for l in range(1, degree + 1)}
    for i in range(n):
        accx = TruncTensor.unit(X.dim, degree)
        accy = TruncTensor.unit(X.dim, degree) if Y is not None else None
        for j in range(i + 1, n + 1):
            accx = tensor_mul(accx, X.cells[j - 1])
            if Y is not None:
                accy = tensor_mul(accy, Y.cells[j - 1])
            for l in range(1, degree + 1):
                diff = accx.level(l) - (accy.level(l) if Y is not None else 0.0)
                out[l][i, j] = np.abs(diff).sum()
    return out


def _chain_sup(cost: np.ndarray) -> float:
    """Supremum over subdivision chains of the window-cost sums."""
    n = cost.shape[0] - 1
    best = np.zeros(n + 1)
    for j in range(1, n + 1):
        best[j] = np.max(best[:j] + cost[:j, j])
    return float(best[n])


def dp_metric(X: GridFunctional, Y: GridFunctional, p: float) -> float:
    """The level-wise p-variation distance between two functionals.

    max over levels l of sup over grid subdivisions of
    (sum_D |X^l - Y^l|^(p/l))^(1/p); the level range starts at 1 since
    level 0 is identically 1.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if X.degree != Y.degree or X.dim != Y.dim:
        raise ValueError("functionals must share dim and degree")
    if len(X.times) != len(Y.times) or not np.allclose(
        X.times, Y.times, rtol=0, atol=_SNAP
    ):
        grid = merge_grids(X, Y)
        X, Y = resample(X, grid), resample(Y, grid)
    norms = _window_level_norms(X, Y)
    out = 0.0
    for l, mat in norms.items():
        out = max(out, _chain_sup(mat ** (p / l)) ** (1.0 / p))
    return out


def dp_metric_window(X, Y, p, window) -> float:
    return dp_metric(restrict(X, *window), restrict(Y, *window), p)


@dataclass
class RoughPath:
    """Pointed rough path: starting point plus a degree-[p] functional."""

    start: np.ndarray
    functional: GridFunctional
    p: float
    trace: SampledPath = None

    def __post_init__(self):
        self.start = np.asarray(self.start, dtype=float).reshape(-1)
        if self.start.size != self.functional.dim:
            raise ValueError("start point dimension mismatch")
        if math.floor(self.p) != self.functional.degree:
            raise ValueError(
                f"[p] = {math.floor(self.p)} must equal the functional degree "
                f"{self.functional.degree}"
            )
        if self.trace is None:
            self.trace = self.functional.trace_from(self.start)

    @property
    def degree(self) -> int:
        return self.functional.degree

    @property
    def times(self) -> np.ndarray:
        return self.functional.times

    def validate(self, atol: float = 1e-8) -> None:
        inc = np.diff(self.trace.values, axis=0)
        if not np.allclose(inc, self.functional.level1_increments(), atol=atol):
            raise ValueError("trace increments disagree with level-1 cells")
        if not np.allclose(self.trace.values[0], self.start, atol=atol):
            raise ValueError("trace does not begin at the starting point")

    def restrict(self, s: float, t: float) -> "RoughPath":
        func = restrict(self.functional, s, t)
        tr = self.trace.restrict(s, t)
        return RoughPath(tr.values[0], func, self.p, tr)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "start": self.start.tolist(),
            "times": self.functional.times.tolist(),
            "cells": [c.to_dict() for c in self.functional.cells],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "RoughPath":
        func = GridFunctional(
            payload["times"], [TruncTensor.from_dict(c) for c in payload["cells"]]
        )
        return cls(np.asarray(payload["start"], dtype=float), func, payload["p"])


def from_bv_path(x: SampledPath, p: float) -> RoughPath:
    """Canonical lift of a bounded-variation path: cells are segment signatures."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    degree = math.floor(p)
    cells = [tensor_exp(d, degree) for d in x.increments()]
    return RoughPath(x.values[0], GridFunctional(x.times.copy(), cells), p, x)


def equivalent(A: RoughPath, B: RoughPath, tol: float = 1e-12) -> bool:
    """Same functional cellwise, starting points ignored."""
    if A.functional.dim != B.functional.dim or A.degree != B.degree:
        return False
    FA, FB = A.functional, B.functional
    if len(FA.times) != len(FB.times) or not np.allclose(
        FA.times, FB.times, rtol=0, atol=_SNAP
    ):
        grid = merge_grids(FA, FB)
        FA, FB = resample(FA, grid), resample(FB, grid)
    return all(a.allclose(b, tol) for a, b in zip(FA.cells, FB.cells))


def dp_product_metric(A: RoughPath, B: RoughPath) -> float:
    """max(|x - y|, dp_metric(X, Y)) for pointed rough paths."""
    if A.p != B.p:
        raise ValueError("rough paths must share p")
    start_gap = float(np.abs(A.start - B.start).sum())
    return max(start_gap, dp_metric(A.functional, B.functional, A.p))


# -- p-variation control of functionals ------------------------------------


def functional_control_check(
    F: GridFunctional, p: float, w: ControlGrid, slack: float = 1e-12
) -> bool:
    """Check |X^l_(s,t)| <= w(s,t)^(l/p) / (beta_p (l/p)!) on all grid pairs.

    Applies to every stored level, so it also covers functionals extended
    beyond degree [p].
    """
    if not np.allclose(F.times, w.times, rtol=0, atol=_SNAP):
        raise ValueError("functional and control live on different grids")
    beta = beta_p(p)
    norms = _window_level_norms(F)
    for l, mat in norms.items():
        denom = beta * factorial(l / p)
        iu = np.triu_indices(len(F.times), k=1)
        bound = w.table[iu] ** (l / p) / denom
        if np.any(mat[iu] > bound + slack):
            return False
    return True


def pvar_control_check(X: RoughPath, w: ControlGrid, slack: float = 1e-12) -> bool:
    return functional_control_check(X.functional, X.p, w, slack)


def _minimal_scale(F: GridFunctional, p: float, w: ControlGrid) -> float:
    beta = beta_p(p)
    norms = _window_level_norms(F)
    c = 0.0
    iu = np.triu_indices(len(F.times), k=1)
    for l, mat in norms.items():
        need = (beta * factorial(l / p) * mat[iu]) ** (p / l)
        base = w.table[iu]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(need <= 1e-300, 0.0, need / base)
        if np.any(np.isinf(ratio)) or np.any(np.isnan(ratio)):
            return float("inf")
        c = max(c, float(ratio.max()))
    return c


def minimal_control_scale(X: RoughPath, w: ControlGrid) -> float:
    """Smallest c such that pvar_control_check passes with c * w."""
    return _minimal_scale(X.functional, X.p, w)


def _levelwise_variation_table(norms: dict, p: float) -> np.ndarray:
    """sum_l sup_D sum_D (window norm)^(p/l): superadditive, zero diagonal."""
    n = next(iter(norms.values())).shape[0] - 1
    table = np.zeros((n + 1, n + 1))
    for l, mat in norms.items():
        cost = mat ** (p / l)
        for i in range(n):
            best = np.zeros(n - i + 1)
            for j in range(1, n - i + 1):
                best[j] = np.max(best[:j] + cost[i : i + j, i + j])
            table[i, i:] += best
    return table


def natural_functional_control(F: GridFunctional, p: float) -> ControlGrid:
    """Control built from the level-wise (p/l)-variations of the functional.

    omega(s,t) = sum_l sup_D sum_D |X^l|^(p/l) is superadditive, vanishes on
    the diagonal and dominates |X^l_(s,t)|^(p/l) for every level.
    """
    return ControlGrid(
        F.times.copy(), _levelwise_variation_table(_window_level_norms(F), p)
    )


def difference_control(X: GridFunctional, Y: GridFunctional, p: float) -> ControlGrid:
    """Level-wise variation control of the difference of two functionals."""
    return ControlGrid(
        X.times.copy(), _levelwise_variation_table(_window_level_norms(X, Y), p)
    )


# -- extension to higher degree --------------------------------------------


def extend(
    X: RoughPath,
    degree: int,
    tol: float = 1e-10,
    max_depth: int = 14,
    with_info: bool = False,
):
    """Extension of a rough path's functional to a higher degree.

    Each cell's new levels are obtained as the limit of Chen products over
    dyadic refinements of the cell, with sub-cell values taken geodesically
    and the new levels initialized to zero.  Richardson extrapolation
    accelerates the limit; levels up to the original degree are kept
    verbatim (the extension is unique above a functional of finite
    p-variation, so they cannot move).
    """
    F = X.functional
    if degree < F.degree:
        raise ValueError(f"target degree {degree} below functional degree {F.degree}")
    if degree == F.degree:
        out = F.copy()
        return (out, RefinementInfo(converged=True, delta=0.0)) if with_info else out
    dim = F.dim
    new_sizes = [dim**l for l in range(F.degree + 1, degree + 1)]
    info = RefinementInfo(converged=True, delta=0.0)
    cells = []
    for cell in F.cells:
        log_cell = tensor_log(cell)

        def sample(depth, log_cell=log_cell):
            m = 2**depth
            sub = lift_degree(tensor_exp_full((1.0 / m) * log_cell), degree)
            acc = TruncTensor.unit(dim, degree)
            for _ in range(m):
                acc = tensor_mul(acc, sub)
            return np.concatenate(acc.levels[F.degree + 1 :])

        flat, cell_info = dyadic_limit(sample, tol=tol, max_depth=max_depth)
        info.merge(cell_info)
        levels = [lev.copy() for lev in cell.levels]
        pos = 0
        for size in new_sizes:
            levels.append(np.asarray(flat[pos : pos + size]))
            pos += size
        cells.append(TruncTensor(dim, degree, levels))
    out = GridFunctional(F.times.copy(), cells)
    return (out, info) if with_info else out


# -- convergence in the p-variation topology --------------------------------


@dataclass
class TopologyReport:
    """Common control, rate sequence and decay flags for a sequence."""

    control: ControlGrid
    a_values: np.ndarray
    dp_distances: np.ndarray
    a_decays: bool
    metric_decays: bool
    implication_ok: bool


def _decays(seq: np.ndarray) -> bool:
    if len(seq) == 0 or np.all(seq <= 1e-14):
        return True
    return seq[-1] < seq[0] * (1.0 - 1e-9)


def converges_in_topology(X: GridFunctional, sequence, p: float) -> TopologyReport:
    """Search for a common control and the smallest rate sequence a(n).

    The control is the superadditive envelope of the pointwise maximum of
    the natural functional controls of every term together with the
    difference controls, the latter weighted by the square root of their
    relative total mass (so a term close to the limit contributes a large
    multiple of its small difference control, which is what drives a(n) to
    zero); the result is renormalized so the p-variation bound holds for
    every term.  a(n) is then the smallest constant with
    |X^l - X^l(n)| <= a(n) w^(l/p) over all windows and levels.
    """
    grid = merge_grids(X, *sequence)
    X = resample(X, grid)
    sequence = [resample(F, grid) for F in sequence]
    table = natural_functional_control(X, p).table
    for F in sequence:
        table = np.maximum(table, natural_functional_control(F, p).table)
    diff_tables = [difference_control(X, F, p).table for F in sequence]
    masses = np.array([t[0, -1] for t in diff_tables])
    biggest = masses.max() if len(masses) else 0.0
    if biggest > 0:
        for t, mass in zip(diff_tables, masses):
            if mass > 0:
                table = np.maximum(table, t / math.sqrt(mass / biggest))
    control = superadditive_envelope(ControlGrid(grid, table))
    scale = 1.0
    for F in [X] + sequence:
        scale = max(scale, _minimal_scale(F, p, control))
    if not np.isfinite(scale):
        scale = 1.0
    control = control.scaled(scale)

    iu = np.triu_indices(len(grid), k=1)
    a_values = []
    dp_distances = []
    for F in sequence:
        norms = _window_level_norms(X, F)
        a = 0.0
        for l, mat in norms.items():
            denom = control.table[iu] ** (l / p)
            num = mat[iu]
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(num <= 1e-300, 0.0, num / denom)
            a = max(a, float(np.nanmax(ratio)))
        a_values.append(a)
        dp_distances.append(dp_metric(X, F, p))
    a_values = np.array(a_values)
    dp_distances = np.array(dp_distances)
    a_dec, m_dec = _decays(a_values), _decays(dp_distances)
    return TopologyReport(
        control, a_values, dp_distances, a_dec, m_dec, (not m_dec) or a_dec
    )


# -- locality helpers -------------------------------------------------------


def max_window_difference(X: GridFunctional, Y: GridFunctional) -> float:
    """Largest per-level window-norm difference over all grid windows."""
    if len(X.times) != len(Y.times) or not np.allclose(
        X.times, Y.times, rtol=0, atol=_SNAP
    ):
        grid = merge_grids(X, Y)
        X, Y = resample(X, grid), resample(Y, grid)
    norms = _window_level_norms(X, Y)
    return max(float(mat.max()) for mat in norms.values())


def max_cover_difference(X: GridFunctional, Y: GridFunctional, cover: CompactCover) -> float:
    """Largest window difference restricted to elements of a cover."""
    out = 0.0
    for lo, hi in cover.intervals:
        out = max(out, max_window_difference(restrict(X, lo, hi), restrict(Y, lo, hi)))
    return out
