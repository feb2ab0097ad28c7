"""Integration of Lipschitz one-forms along pointed rough paths.

For p < 2 the integral is the refinement limit of left Riemann sums of the
one-form against level-1 increments; for 2 <= p < 3 the integrand carries
the level-2 correction and the cells are Chen products of the almost
multiplicative two-level blocks.  Sub-cell values come from the geodesic
interpolation shared with the functional store, so every refinement error
is smooth in the mesh and the limits are Richardson-accelerated.  p >= 3 is
rejected: the jet library stops at degree 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .covers import cover_element_containing, extract_subdivision, refine_from_open_cover
from .errors import DomainExitError
from .lipschitz import LipJet, differential
from .refinement import RefinementInfo, dyadic_limit
from .rough import GridFunctional, RoughPath, concat_functionals, extend
from .tensor import TruncTensor, tensor_exp_full, tensor_log
from .variation import SampledPath


def _require_oneform(alpha: LipJet, dim: int) -> int:
    if len(alpha.value_shape) != 2 or alpha.value_shape[1] != dim:
        raise ValueError(
            f"one-form must have value shape (e, {dim}), got {alpha.value_shape}"
        )
    return alpha.value_shape[0]


def young_integral(
    alpha: LipJet,
    X: RoughPath,
    tol: float = 1e-10,
    max_depth: int = 14,
    start=None,
    with_info: bool = False,
    strict: bool = True,
):
    """Integral of a one-form along a rough path with p < 2.

    Each level-1 cell is the refinement limit of sums alpha(x_s) X^1_(s,t)
    over dyadic partitions of the cell.  The result is a pointed rough path
    starting at zero unless a start is supplied.
    """
    if not X.p < 2:
        raise ValueError(f"young_integral needs p < 2, got p = {X.p}")
    dim = X.functional.dim
    e = _require_oneform(alpha, dim)
    alpha.check_domain(X.trace.values)
    times = X.functional.times
    info = RefinementInfo(converged=True, delta=0.0)
    cells = []
    for i, cell in enumerate(X.functional.cells):
        y0 = X.trace.values[i]
        inc = cell.level(1)

        def sample(depth, y0=y0, inc=inc):
            m = 2**depth
            step = inc / m
            total = np.zeros(e)
            y = y0.astype(float).copy()
            for _ in range(m):
                total += alpha.value(y) @ step
                y += step
            return total

        value, cell_info = dyadic_limit(
            sample, tol=tol, max_depth=max_depth, strict=strict
        )
        info.merge(cell_info)
        cells.append(TruncTensor(e, 1, [np.array([1.0]), value]))
    out = RoughPath(
        np.zeros(e) if start is None else np.asarray(start, dtype=float),
        GridFunctional(times.copy(), cells),
        X.p,
    )
    return (out, info) if with_info else out


def rough_integral_level2(
    alpha: LipJet,
    X: RoughPath,
    tol: float = 1e-10,
    max_depth: int = 14,
    start=None,
    with_info: bool = False,
    strict: bool = True,
):
    """Integral of a one-form along a rough path with 2 <= p < 3.

    The almost multiplicative block over a sub-cell is
        Xi^1 = alpha(y) X^1 + alpha'(y) X^2,
        Xi^2 = (alpha(y) (x) alpha(y)) X^2,
    and each output cell is the refinement limit of the Chen products of
    these blocks over dyadic sub-partitions.
    """
    if not 2 <= X.p < 3:
        raise ValueError(f"rough_integral_level2 needs 2 <= p < 3, got p = {X.p}")
    if alpha.degree < 1:
        raise ValueError("level-2 integration needs the one-form's first derivative")
    dim = X.functional.dim
    e = _require_oneform(alpha, dim)
    alpha.check_domain(X.trace.values)
    times = X.functional.times
    info = RefinementInfo(converged=True, delta=0.0)
    cells = []
    for i, cell in enumerate(X.functional.cells):
        y0 = X.trace.values[i]
        log_cell = tensor_log(cell)

        def sample(depth, y0=y0, log_cell=log_cell):
            m = 2**depth
            sub = tensor_exp_full((1.0 / m) * log_cell)
            x1 = sub.level(1)
            x2 = sub.level(2).reshape(dim, dim)
            acc = TruncTensor.unit(e, 2)
            y = y0.astype(float).copy()
            for _ in range(m):
                a0 = alpha.value(y)
                a1 = alpha.deriv(1, y)
                xi1 = a0 @ x1 + np.einsum("ajk,kj->a", a1, x2)
                xi2 = np.einsum("aj,bk,jk->ab", a0, a0, x2)
                block = TruncTensor(e, 2, [np.array([1.0]), xi1, xi2.reshape(-1)])
                acc = _mul2(acc, block)
                y += x1
            return acc.flatten()[1:]

        flat, cell_info = dyadic_limit(
            sample, tol=tol, max_depth=max_depth, strict=strict
        )
        info.merge(cell_info)
        cells.append(
            TruncTensor(e, 2, [np.array([1.0]), flat[:e], flat[e:]])
        )
    out = RoughPath(
        np.zeros(e) if start is None else np.asarray(start, dtype=float),
        GridFunctional(times.copy(), cells),
        X.p,
    )
    return (out, info) if with_info else out


def _mul2(a: TruncTensor, b: TruncTensor) -> TruncTensor:
    # degree-2 product without the generic dispatch, for the sewing hot loop
    l0 = a.levels[0][0] * b.levels[0][0]
    l1 = a.levels[0][0] * b.levels[1] + b.levels[0][0] * a.levels[1]
    l2 = (
        a.levels[0][0] * b.levels[2]
        + b.levels[0][0] * a.levels[2]
        + np.multiply.outer(a.levels[1], b.levels[1]).ravel()
    )
    return TruncTensor(a.dim, 2, [np.array([l0]), l1, l2])


def integrate(alpha: LipJet, X: RoughPath, **kwargs):
    """Dispatch on p: Young below 2, level-2 rough on [2, 3); p >= 3 rejected."""
    if X.p < 2:
        return young_integral(alpha, X, **kwargs)
    if X.p < 3:
        return rough_integral_level2(alpha, X, **kwargs)
    raise ValueError(f"integration implemented for p < 3 only, got p = {X.p}")


def young_integral_extended(
    alpha: LipJet, X: RoughPath, degree: int, tol: float = 1e-10, max_depth: int = 14
) -> GridFunctional:
    """Young integral with higher levels rebuilt through the extension limit."""
    base = young_integral(alpha, X, tol=tol, max_depth=max_depth)
    return extend(base, degree, tol=tol, max_depth=max_depth)


@dataclass
class LocalOneForm:
    """A one-form valid on a Euclidean ball of the state space."""

    center: np.ndarray
    radius: float
    form: LipJet

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).reshape(-1)
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")

    def inside(self, points, slack: float = 0.0) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        dist = np.sqrt(((pts - self.center) ** 2).sum(axis=1))
        return dist < self.radius - slack


def _ball_time_intervals(piece: LocalOneForm, trace: SampledPath):
    """Open time intervals where the trace stays strictly inside the ball.

    Entry and exit times are exact roots of the per-segment quadratic, so
    the produced intervals are genuinely open.
    """
    times, values = trace.times, trace.values
    spans = []
    for i in range(trace.n_segments):
        a = values[i] - piece.center
        v = values[i + 1] - values[i]
        t0, t1 = times[i], times[i + 1]
        qa = float(v @ v)
        qb = 2.0 * float(a @ v)
        qc = float(a @ a) - piece.radius**2
        if qa < 1e-300:
            if qc < 0:
                spans.append((t0, t1))
            continue
        disc = qb * qb - 4 * qa * qc
        if disc <= 0:
            continue
        root = math.sqrt(disc)
        lo = (-qb - root) / (2 * qa)
        hi = (-qb + root) / (2 * qa)
        lo, hi = max(lo, 0.0), min(hi, 1.0)
        if hi <= lo:
            continue
        spans.append((t0 + lo * (t1 - t0), t0 + hi * (t1 - t0)))
    if not spans:
        return []
    spans.sort()
    merged = [list(spans[0])]
    for lo, hi in spans[1:]:
        if lo <= merged[-1][1] + 1e-12:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    # widen endpoints that sit at the span boundary so the cover stays open
    eps = 1e-9 * max(1.0, times[-1] - times[0])
    out = []
    for lo, hi in merged:
        if abs(lo - times[0]) < 1e-12:
            lo = times[0] - eps
        if abs(hi - times[-1]) < 1e-12:
            hi = times[-1] + eps
        out.append((lo, hi))
    return out


def integrate_local_oneform(
    pieces,
    X: RoughPath,
    tol: float = 1e-10,
    max_depth: int = 14,
    subdivision=None,
    start=None,
) -> RoughPath:
    """Integrate a locally defined one-form given as (ball, jet) pieces.

    Builds the open time cover from the exact ball entry and exit times of
    the trace, refines it into a compact cover, cuts a subdivision, then
    integrates piecewise with the locally valid jet and concatenates.  A
    custom subdivision may be supplied; any admissible choice gives the
    same result up to the sewing tolerance.
    """
    pieces = [p if isinstance(p, LocalOneForm) else LocalOneForm(*p) for p in pieces]
    trace = X.trace
    span = (float(trace.times[0]), float(trace.times[-1]))
    opens, owners = [], []
    for idx, piece in enumerate(pieces):
        for iv in _ball_time_intervals(piece, trace):
            opens.append(iv)
            owners.append(idx)
    if not opens:
        raise DomainExitError("the trace never enters any ball interior")
    cover = refine_from_open_cover(span, opens)
    if subdivision is None:
        cuts = extract_subdivision(cover)
    else:
        cuts = np.asarray(subdivision, dtype=float)
        if abs(cuts[0] - span[0]) > 1e-12 or abs(cuts[-1] - span[1]) > 1e-12:
            raise ValueError("subdivision must span the whole window")

    def owner_of(lo, hi):
        for open_iv, owner in zip(opens, owners):
            if open_iv[0] < lo and hi < open_iv[1]:
                return owner
        return None

    out = None
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        idx = owner_of(lo, hi)
        if idx is None:
            raise DomainExitError(
                f"no ball contains the trace over [{lo}, {hi}]"
            )
        local = X.restrict(lo, hi)
        pieces[idx].form.check_domain(local.trace.values)
        part = integrate(pieces[idx].form, local, tol=tol, max_depth=max_depth)
        out = part.functional if out is None else concat_functionals(out, part.functional)
    e = out.dim
    return RoughPath(
        np.zeros(e) if start is None else np.asarray(start, dtype=float), out, X.p
    )


def pushforward(
    f: LipJet,
    X: RoughPath,
    tol: float = 1e-10,
    max_depth: int = 14,
    with_info: bool = False,
):
    """The image rough path (f(x_0), integral of df along X).

    The trace of the result accumulates the integrated level-1 cells from
    f(x_0), which reproduces f composed with the trace up to the sewing
    tolerance.
    """
    if len(f.value_shape) != 1:
        raise ValueError("pushforward expects a vector-valued jet")
    needed = 1 if X.p < 2 else 2
    if f.degree < needed:
        raise ValueError(
            f"jet degree {f.degree} too low for p = {X.p}; need >= {needed}"
        )
    alpha = differential(f)
    return integrate(
        alpha,
        X,
        tol=tol,
        max_depth=max_depth,
        start=f.value(X.trace.values[0]),
        with_info=with_info,
    )
