import numpy as np
import pytest

from roughpaths.acceptance import inscribed_polygon, polygon_area, random_path
from roughpaths.signature import (
    chen_check,
    concat_paths,
    factorial_decay_check,
    signature,
    signature_from_origin,
)
from roughpaths.tensor import (
    TruncTensor,
    admissible_norm,
    norm_difference,
    project,
    tensor_exp,
    tensor_mul,
)
from roughpaths.variation import SampledPath


def test_single_segment_is_exponential():
    x = SampledPath([0.0, 1.0], [[0.0, 0.0], [0.5, -1.2]])
    sig = signature(x, 4)
    assert norm_difference(sig, tensor_exp(np.array([0.5, -1.2]), 4)) <= 1e-15


def _segment_quadrature_level2(d1, d2, steps=4000):
    """Midpoint-rule oracle for the level-2 iterated integral of two segments."""
    # derivative is d1 on [0, 1) and d2 on [1, 2), each over unit time
    ts = (np.arange(steps) + 0.5) * (2.0 / steps)
    deriv = np.where(ts[:, None] < 1.0, d1[None, :], d2[None, :])
    increments = deriv * (2.0 / steps)
    positions = np.cumsum(increments, axis=0) - 0.5 * increments
    return sum(np.outer(pos, inc) for pos, inc in zip(positions, increments))


def test_two_segment_level_two():
    d1 = np.array([1.0, 0.0])
    d2 = np.array([0.3, -0.7])
    x = SampledPath([0.0, 1.0, 2.0], [np.zeros(2), d1, d1 + d2])
    level2 = signature(x, 2).level_array(2)
    expected = (
        np.outer(d1, d1) / 2.0 + np.outer(d1, d2) + np.outer(d2, d2) / 2.0
    )
    assert np.allclose(level2, expected, atol=1e-14)
    # the closed form itself agrees with a quadrature oracle
    oracle = _segment_quadrature_level2(d1, d2)
    assert np.allclose(expected, oracle, atol=1e-3)


def test_circle_level_two_antisymmetric_part_is_area():
    poly = inscribed_polygon(2**8)
    level2 = signature(poly, 2).level_array(2)
    levy = 0.5 * (level2[0, 1] - level2[1, 0])
    assert abs(levy - polygon_area(poly.values)) <= 1e-12


def test_signature_is_group_like_and_projects():
    rng = np.random.default_rng(0)
    x = random_path(rng, 2, 7)
    sig = signature(x, 4)
    assert sig.is_group_like()
    assert norm_difference(project(sig, 2), signature(x, 2)) == 0.0
    assert np.allclose(sig.level(1), x.values[-1] - x.values[0])


def test_signature_degree_cap():
    x = SampledPath([0.0, 1.0], [[0.0], [1.0]])
    with pytest.raises(ValueError):
        signature(x, 7)
    signature(x, 7, degree_cap=8)


# -- concatenation --------------------------------------------------------------


def test_concat_pointwise_union():
    x = SampledPath([0.0, 1.0], [[0.0], [1.0]])
    y = SampledPath([1.0, 2.0], [[1.0], [3.0]])
    z = concat_paths(x, y)
    assert np.allclose(z.times, [0.0, 1.0, 2.0])
    assert np.allclose(z.values[:, 0], [0.0, 1.0, 3.0])


def test_concat_translates_second_path():
    x = SampledPath([0.0, 1.0], [[0.0], [1.0]])
    y = SampledPath([1.0, 2.0], [[5.0], [7.0]])
    z = concat_paths(x, y)
    assert np.allclose(z.values[:, 0], [0.0, 1.0, 3.0])  # increments preserved


def test_concat_associative():
    rng = np.random.default_rng(1)
    x = SampledPath([0.0, 0.5], rng.normal(size=(2, 2)))
    y = SampledPath([0.5, 1.2], rng.normal(size=(2, 2)))
    z = SampledPath([1.2, 2.0], rng.normal(size=(2, 2)))
    a = concat_paths(concat_paths(x, y), z)
    b = concat_paths(x, concat_paths(y, z))
    assert np.allclose(a.times, b.times) and np.allclose(a.values, b.values)


def test_concat_requires_adjacency():
    x = SampledPath([0.0, 1.0], [[0.0], [1.0]])
    y = SampledPath([1.5, 2.0], [[0.0], [1.0]])
    with pytest.raises(ValueError):
        concat_paths(x, y)


def test_chen_for_concatenation():
    rng = np.random.default_rng(2)
    for _ in range(10):
        x = SampledPath(np.linspace(0.0, 1.0, 5), 0.4 * rng.normal(size=(5, 2)))
        y = SampledPath(np.linspace(1.0, 2.0, 4), 0.4 * rng.normal(size=(4, 2)))
        lhs = signature(concat_paths(x, y), 3)
        rhs = tensor_mul(signature(x, 3), signature(y, 3))
        assert norm_difference(lhs, rhs) <= 1e-12


# -- windows and Chen -------------------------------------------------------------


def test_chen_check_small():
    rng = np.random.default_rng(3)
    x = random_path(rng, 2, 8)
    ts = x.times
    assert chen_check(x, 3, ts[0], ts[3], ts[6]).max() <= 1e-12


def test_chen_degenerate_window_is_unit():
    x = SampledPath([0.0, 1.0, 2.0], [[0.0], [1.0], [0.5]])
    dev = chen_check(x, 2, 1.0, 1.0, 2.0)
    assert dev.max() <= 1e-15


def test_window_signature_from_origin():
    rng = np.random.default_rng(4)
    x = random_path(rng, 2, 9)
    s, t = x.times[2], x.times[7]
    direct = signature(x, 3, (s, t))
    via_origin = signature_from_origin(x, 3, s, t)
    assert norm_difference(direct, via_origin) <= 1e-12


# -- factorial decay ---------------------------------------------------------------


def test_factorial_decay_equality_for_linear_1d():
    x = SampledPath([0.0, 1.0], [[0.0], [2.0]])
    sig = signature(x, 4)
    norms = admissible_norm(sig)
    fact = 1.0
    for n in range(1, 5):
        fact *= n
        assert np.isclose(norms[n], 2.0**n / fact)


def test_factorial_decay_random_corpus():
    rng = np.random.default_rng(5)
    for _ in range(100):
        x = random_path(rng, int(rng.integers(1, 4)), int(rng.integers(2, 9)))
        assert factorial_decay_check(x, int(rng.integers(2, 6)))


def test_factorial_decay_slack_grows_on_zigzag():
    zig = SampledPath(np.linspace(0, 1, 9), [[(i % 2) * 0.5] for i in range(9)])
    ok, margin = factorial_decay_check(zig, 3, return_margin=True)
    assert ok
    sig = signature(zig, 3)
    onevar = 8 * 0.5
    # net increment is tiny, so the bound has large slack at level 1 already
    assert admissible_norm(sig)[1] <= 0.5 + 1e-12 < onevar
