import numpy as np
import pytest

from roughpaths.covers import (
    CompactCover,
    compose_covers,
    cover_element_containing,
    extract_subdivision,
    make_cover,
    refine_from_open_cover,
)
from roughpaths.errors import CoverageGapError


def test_make_cover_single_interval():
    cover = make_cover((0.0, 1.0), 1.0)
    assert cover.intervals == ((0.0, 1.0),)


def test_make_cover_overlapping_pieces():
    cover = make_cover((0.0, 1.0), 0.3)
    assert len(cover) >= 2
    cover.validate()
    for lo, hi in cover.intervals:
        assert hi - lo <= 0.6 + 1e-12
    # consecutive pieces overlap
    ordered = sorted(cover.intervals)
    for (a, b), (c, d) in zip(ordered, ordered[1:]):
        assert c < b


def test_make_cover_random_scan():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = rng.uniform(-5, 5)
        b = a + rng.uniform(0.1, 10)
        mesh = rng.uniform(0.05, 3.0)
        make_cover((a, b), mesh).validate()


def test_make_cover_rejects_bad_mesh():
    with pytest.raises(ValueError):
        make_cover((0.0, 1.0), 0.0)


def test_refine_single_open():
    cover = refine_from_open_cover((0.0, 1.0), [(-0.1, 1.1)])
    assert cover.intervals == ((0.0, 1.0),)


def test_refine_two_opens_containment():
    opens = [(-0.1, 0.6), (0.4, 1.1)]
    cover = refine_from_open_cover((0.0, 1.0), opens)
    cover.validate()
    for lo, hi in cover.intervals:
        assert any(olo < lo and hi < ohi for olo, ohi in opens)


def test_refine_gap_reports_witness():
    with pytest.raises(CoverageGapError) as err:
        refine_from_open_cover((0.0, 1.0), [(-0.1, 0.4), (0.6, 1.1)])
    assert 0.4 - 1e-9 <= err.value.witness <= 0.6 + 1e-9


def test_extract_subdivision_overlap_midpoint():
    cover = CompactCover(((0.0, 0.6), (0.4, 1.0)), (0.0, 1.0))
    cuts = extract_subdivision(cover)
    assert np.allclose(cuts, [0.0, 0.5, 1.0])


def test_extract_subdivision_single():
    cover = CompactCover(((0.0, 1.0),), (0.0, 1.0))
    assert np.allclose(extract_subdivision(cover), [0.0, 1.0])


def test_extract_subdivision_random_containment():
    rng = np.random.default_rng(1)
    for _ in range(40):
        cover = make_cover((0.0, float(rng.uniform(0.5, 4.0))), float(rng.uniform(0.1, 1.0)))
        cuts = extract_subdivision(cover)
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            assert cover_element_containing(cover, lo, hi) is not None


def test_compose_identity_inners():
    outer = make_cover((0.0, 2.0), 0.7)
    inners = [CompactCover(((lo, hi),), (lo, hi)) for lo, hi in outer.intervals]
    combined = compose_covers(outer, inners)
    assert sorted(combined.intervals) == sorted(outer.intervals)


def test_compose_halved_inners():
    outer = make_cover((0.0, 1.0), 0.5)
    inners = [make_cover((lo, hi), (hi - lo) / 2.0) for lo, hi in outer.intervals]
    combined = compose_covers(outer, inners)
    combined.validate()
    assert len(combined) <= 2 * sum(len(iv) for iv in inners)


def test_compose_random_nesting():
    rng = np.random.default_rng(2)
    for _ in range(20):
        outer = make_cover((0.0, 3.0), float(rng.uniform(0.4, 1.5)))
        inners = [
            make_cover((lo, hi), float(rng.uniform(0.1, 1.0)))
            for lo, hi in outer.intervals
        ]
        compose_covers(outer, inners).validate()


def test_compose_span_mismatch():
    outer = CompactCover(((0.0, 1.0),), (0.0, 1.0))
    wrong = CompactCover(((0.0, 0.5),), (0.0, 0.5))
    with pytest.raises(CoverageGapError):
        compose_covers(outer, [wrong])


def test_cover_validate_detects_gap():
    with pytest.raises(CoverageGapError) as err:
        CompactCover(((0.0, 0.4), (0.6, 1.0)), (0.0, 1.0)).validate()
    assert err.value.witness == pytest.approx(0.5)
