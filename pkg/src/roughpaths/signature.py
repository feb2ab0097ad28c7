"""Exact truncated signatures of piecewise-linear paths.

A segment with increment D has signature exp(D); the signature of a sampled
path over a grid window is the ordered product of its segment exponentials
(left to right in time).  No quadrature appears here; quadrature exists only
as a test oracle.
"""

from __future__ import annotations

import numpy as np

from .tensor import (
    DEGREE_CAP,
    TruncTensor,
    admissible_norm,
    tensor_exp,
    tensor_inverse,
    tensor_mul,
)
from .variation import SampledPath, p_variation


def signature(
    x: SampledPath, degree: int, window=None, degree_cap: int = DEGREE_CAP
) -> TruncTensor:
    """Truncated signature of the path over a grid window."""
    if degree < 0 or degree > degree_cap:
        raise ValueError(f"degree must be in 0..{degree_cap}, got {degree}")
    if window is None:
        i0, i1 = 0, x.n_segments
    else:
        i0, i1 = x.window(*window)
    out = TruncTensor.unit(x.dim, degree)
    for i in range(i0, i1):
        out = tensor_mul(out, tensor_exp(x.values[i + 1] - x.values[i], degree))
    return out


def concat_paths(x: SampledPath, y: SampledPath, atol: float = 1e-9) -> SampledPath:
    """Concatenate y after x, translating y to start where x ends."""
    if x.dim != y.dim:
        raise ValueError("paths have different dimensions")
    if abs(x.times[-1] - y.times[0]) > atol:
        raise ValueError(
            f"windows are not adjacent: {x.times[-1]} vs {y.times[0]}"
        )
    shift = x.values[-1] - y.values[0]
    times = np.concatenate([x.times, y.times[1:]])
    values = np.vstack([x.values, y.values[1:] + shift])
    return SampledPath(times, values)


def chen_check(x: SampledPath, degree: int, s: float, u: float, t: float) -> np.ndarray:
    """Per-level norm of S_(s,t) - S_(s,u) (x) S_(u,t) on grid times."""
    whole = signature(x, degree, (s, t))
    left = signature(x, degree, (s, u)) if s != u else TruncTensor.unit(x.dim, degree)
    right = signature(x, degree, (u, t)) if u != t else TruncTensor.unit(x.dim, degree)
    return admissible_norm(whole - tensor_mul(left, right))


def signature_from_origin(x: SampledPath, degree: int, s: float, t: float) -> TruncTensor:
    """S_(s,t) computed as (S_(0,s))^-1 (x) S_(0,t)."""
    t0 = x.times[0]
    start = signature(x, degree, (t0, s)) if s > t0 else TruncTensor.unit(x.dim, degree)
    return tensor_mul(tensor_inverse(start), signature(x, degree, (t0, t)))


def factorial_decay_check(
    x: SampledPath, degree: int, rtol: float = 1e-9, return_margin: bool = False
):
    """Verify |S^n| <= |x|_1^n / n! for every grid window and n <= degree.

    The 1-variation of a piecewise-linear path over a grid window is the sum
    of its increment norms, so both sides are exact.  Window signatures are
    accumulated incrementally per starting index.
    """
    n_pts = len(x.times)
    seg = np.abs(np.diff(x.values, axis=0)).sum(axis=1)
    onevar = np.concatenate([[0.0], np.cumsum(seg)])
    exps = [tensor_exp(d, degree) for d in np.diff(x.values, axis=0)]
    factorials = np.cumprod(np.arange(1, degree + 1, dtype=float))
    ok = True
    margin = np.inf
    for i in range(n_pts - 1):
        sig = TruncTensor.unit(x.dim, degree)
        for j in range(i + 1, n_pts):
            sig = tensor_mul(sig, exps[j - 1])
            norms = admissible_norm(sig)
            length = onevar[j] - onevar[i]
            for n in range(1, degree + 1):
                bound = length**n / factorials[n - 1]
                margin = min(margin, bound - norms[n])
                if norms[n] > bound * (1.0 + rtol) + 1e-300:
                    ok = False
    if return_margin:
        return ok, margin
    return ok


def one_variation(x: SampledPath, window=None) -> float:
    """Total variation over a grid window (sum of l1 increment norms)."""
    return p_variation(x, 1.0, window)
