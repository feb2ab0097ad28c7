"""Compact covers of intervals: construction, refinement and subdivisions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CoverageGapError


@dataclass(frozen=True)
class CompactCover:
    """Finite family of closed intervals whose union is the span."""

    intervals: tuple
    span: tuple

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        span = (float(self.span[0]), float(self.span[1]))
        object.__setattr__(self, "intervals", ivs)
        object.__setattr__(self, "span", span)

    def validate(self, tol: float = 1e-12) -> None:
        a, b = self.span
        if a > b:
            raise ValueError("span must be a nonempty interval")
        if not self.intervals:
            raise CoverageGapError("empty cover", witness=a)
        for lo, hi in self.intervals:
            if lo > hi:
                raise ValueError(f"empty cover element [{lo}, {hi}]")
        ordered = sorted(self.intervals)
        if ordered[0][0] > a + tol:
            raise CoverageGapError("left end uncovered", witness=a)
        reach = ordered[0][1]
        for lo, hi in ordered[1:]:
            if lo > reach + tol:
                raise CoverageGapError(
                    "gap between cover elements", witness=0.5 * (reach + lo)
                )
            reach = max(reach, hi)
        if reach < b - tol:
            raise CoverageGapError("right end uncovered", witness=b)

    def __len__(self):
        return len(self.intervals)


def make_cover(span, mesh: float) -> CompactCover:
    """Overlapping closed intervals of length <= 2*mesh covering the span."""
    if mesh <= 0:
        raise ValueError(f"mesh must be positive, got {mesh}")
    a, b = float(span[0]), float(span[1])
    length = b - a
    if length <= mesh:
        cover = CompactCover(((a, b),), (a, b))
        cover.validate()
        return cover
    pieces = int(np.ceil(length / mesh))
    width = length / pieces
    pad = min(mesh - width, width) / 2.0
    intervals = []
    for i in range(pieces):
        lo = max(a, a + i * width - pad)
        hi = min(b, a + (i + 1) * width + pad)
        intervals.append((lo, hi))
    cover = CompactCover(tuple(intervals), (a, b))
    cover.validate()
    return cover


def _check_open_coverage(span, opens) -> None:
    a, b = span
    reach = a
    remaining = list(opens)
    # march: every point of [a, b] must be interior to some open interval
    while True:
        usable = [hi for lo, hi in remaining if lo < reach < hi or (reach == a and lo < a < hi)]
        if reach == a:
            usable = [hi for lo, hi in remaining if lo < a < hi]
        if not usable:
            raise CoverageGapError(
                f"open intervals do not cover the span near {reach}", witness=reach
            )
        new_reach = max(usable)
        if new_reach >= b:
            return
        if new_reach <= reach:
            raise CoverageGapError(
                f"open intervals do not cover the span near {reach}", witness=reach
            )
        reach = new_reach


def refine_from_open_cover(span, opens) -> CompactCover:
    """Compact cover of the span refining a family of open intervals.

    Follows the halved-margin construction: each produced interval reaches
    only halfway toward the boundary of the open interval containing it, so
    containment is strict.  Raises CoverageGapError with a witness point
    when the opens do not cover the span.
    """
    a, b = float(span[0]), float(span[1])
    opens = [(float(lo), float(hi)) for lo, hi in opens]
    if a == b:
        raise ValueError("span must have positive length")
    _check_open_coverage((a, b), opens)
    intervals = []
    covered = a
    guard = 0
    while True:
        candidates = [(lo, hi) for lo, hi in opens if lo < covered < hi]
        if covered == a:
            candidates = [(lo, hi) for lo, hi in opens if lo < a < hi]
        lo, hi = max(candidates, key=lambda iv: iv[1])
        # halve the margin only where the open does not already clear the span
        piece_lo = a if lo < a else max(a, 0.5 * (lo + covered))
        piece_hi = b if hi > b else 0.5 * (covered + hi)
        intervals.append((piece_lo, piece_hi))
        if piece_hi >= b:
            break
        covered = piece_hi
        guard += 1
        if guard > 10_000:
            raise CoverageGapError("refinement failed to advance", witness=covered)
    cover = CompactCover(tuple(intervals), (a, b))
    cover.validate()
    return cover


def extract_subdivision(cover: CompactCover) -> np.ndarray:
    """Cut points a_0 < ... < a_n with every piece inside one cover element.

    Cuts are placed at the midpoints of consecutive overlaps, which makes
    the choice deterministic.
    """
    cover.validate()
    a, b = cover.span
    ordered = sorted(set(cover.intervals))
    # greedy chain: keep elements that extend the reach the furthest
    chain = []
    reach = a
    while reach < b:
        candidates = [iv for iv in ordered if iv[0] <= reach + 1e-12 and iv[1] > reach]
        if not candidates:
            raise CoverageGapError("cover chain broke", witness=reach)
        best = max(candidates, key=lambda iv: iv[1])
        chain.append(best)
        reach = best[1]
    cuts = [a]
    for prev, nxt in zip(chain, chain[1:]):
        cut = 0.5 * (nxt[0] + min(prev[1], b))
        cut = min(max(cut, nxt[0]), prev[1])
        if cut > cuts[-1]:
            cuts.append(cut)
    cuts.append(b)
    points = np.array(cuts)
    if not np.all(np.diff(points) > 0):
        raise ValueError("degenerate subdivision")
    return points


def cover_element_containing(cover: CompactCover, lo: float, hi: float, tol=1e-9):
    """Index of a cover element containing [lo, hi], or None."""
    for idx, (a, b) in enumerate(cover.intervals):
        if a <= lo + tol and hi <= b + tol:
            return idx
    return None


def compose_covers(outer: CompactCover, inners) -> CompactCover:
    """Flatten per-element covers of every outer element into one cover."""
    outer.validate()
    if len(inners) != len(outer.intervals):
        raise ValueError("need one inner cover per outer element")
    pieces = []
    for (lo, hi), inner in zip(outer.intervals, inners):
        if (abs(inner.span[0] - lo) > 1e-12) or (abs(inner.span[1] - hi) > 1e-12):
            raise CoverageGapError(
                f"inner cover span {inner.span} does not match element ({lo}, {hi})",
                witness=lo,
            )
        inner.validate()
        pieces.extend(inner.intervals)
    cover = CompactCover(tuple(pieces), outer.span)
    cover.validate()
    return cover
