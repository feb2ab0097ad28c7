"""Dyadic refinement limits with Richardson acceleration.

Several constructions in this package are defined as limits over dyadic
refinements (extension of a functional to higher degree, sewing of almost
multiplicative integrands).  The raw refinement error shrinks like 2^-k in
the depth k; since all inputs are geodesic within a cell, the error has a
smooth expansion in 2^-k and Richardson extrapolation removes the leading
terms, reaching tight tolerances at small depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonConvergenceError


@dataclass
class RefinementInfo:
    """Diagnostics of one dyadic-limit computation."""

    depth: int = 0
    delta: float = float("inf")
    converged: bool = False
    raw_deltas: list = field(default_factory=list)
    accelerated_deltas: list = field(default_factory=list)

    def merge(self, other: "RefinementInfo") -> None:
        """Fold per-cell diagnostics into a worst-case summary."""
        self.depth = max(self.depth, other.depth)
        self.delta = max(self.delta if np.isfinite(self.delta) else 0.0, other.delta)
        self.converged = self.converged and other.converged
        for name in ("raw_deltas", "accelerated_deltas"):
            mine, theirs = getattr(self, name), getattr(other, name)
            merged = [
                max(a, b)
                for a, b in zip(mine, theirs)
            ]
            longer = mine if len(mine) >= len(theirs) else theirs
            merged += longer[len(merged) :]
            setattr(self, name, merged)


def dyadic_limit(
    sample,
    tol: float = 1e-10,
    max_depth: int = 14,
    order: int = 3,
    strict: bool = True,
):
    """Limit of sample(depth) as the dyadic depth grows.

    sample(depth) must return a flat float vector computed on a partition
    into 2**depth pieces.  Returns (value, RefinementInfo).  With strict
    set, raises NonConvergenceError carrying the last delta when the
    accelerated sequence fails to stabilize below tol within max_depth.
    """
    info = RefinementInfo()
    rows = []
    previous_best = None
    previous_raw = None
    for depth in range(max_depth + 1):
        raw = np.asarray(sample(depth), dtype=float)
        row = [raw]
        for m in range(1, min(depth, order) + 1):
            boosted = row[m - 1] + (row[m - 1] - rows[-1][m - 1]) / (2.0**m - 1.0)
            row.append(boosted)
        rows.append(row)
        if len(rows) > order + 1:
            rows.pop(0)
        best = row[-1]
        if previous_raw is not None:
            raw_delta = float(np.max(np.abs(raw - previous_raw)))
            info.raw_deltas.append(raw_delta)
            # successive refinements already agree: stop on the raw value,
            # bypassing extrapolation noise in exactly multiplicative cases
            if raw_delta <= tol:
                info.depth = depth
                info.delta = raw_delta
                info.accelerated_deltas.append(raw_delta)
                info.converged = True
                return raw, info
        if previous_best is not None:
            delta = float(np.max(np.abs(best - previous_best)))
            info.accelerated_deltas.append(delta)
            info.depth = depth
            info.delta = delta
            if delta <= tol:
                info.converged = True
                return best, info
        previous_best = best
        previous_raw = raw
    if strict:
        raise NonConvergenceError(
            f"refinement did not reach tol={tol} by depth {max_depth}"
            f" (last delta {info.delta:.3e})",
            delta=info.delta,
            depth=info.depth,
        )
    return previous_best, info
