import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import zeta

from roughpaths.acceptance import brute_force_p_variation, random_path
from roughpaths.variation import (
    ControlGrid,
    SampledPath,
    Subdivision,
    beta_p,
    natural_control,
    neo_classical_check,
    neo_classical_sides,
    p_variation,
    superadditive_envelope,
    verify_controlled,
)


def test_path_validation():
    with pytest.raises(ValueError):
        SampledPath([0.0, 0.0], [[0.0], [1.0]])
    with pytest.raises(ValueError):
        SampledPath([0.0], [[0.0]])
    with pytest.raises(ValueError):
        SampledPath([0.0, 1.0], [[0.0], [np.inf]])


def test_subdivision_validation():
    Subdivision((0, 2, 5))
    with pytest.raises(ValueError):
        Subdivision((0, 0, 2))


# -- p-variation ---------------------------------------------------------------


def test_monotone_path_pvar_is_net_increment():
    x = SampledPath([0.0, 0.3, 0.55, 1.0], [[0.0], [0.2], [0.7], [1.0]])
    assert np.isclose(p_variation(x, 2.0), 1.0)


def test_zigzag_pvar():
    x = SampledPath([0.0, 1.0, 2.0], [[0.0], [1.0], [0.0]])
    # oracle: enumerate all subdivisions
    expected = brute_force_p_variation(x, 2.0)
    assert np.isclose(expected, math.sqrt(2.0))
    assert np.isclose(p_variation(x, 2.0), expected)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([1.0, 1.5, 2.0, 2.7]))
def test_dp_matches_bruteforce(seed, p):
    rng = np.random.default_rng(seed)
    x = random_path(rng, int(rng.integers(1, 4)), int(rng.integers(3, 11)))
    assert abs(p_variation(x, p) - brute_force_p_variation(x, p)) <= 1e-13


def test_pvar_window_and_errors():
    x = SampledPath([0.0, 1.0, 2.0], [[0.0], [1.0], [0.0]])
    assert np.isclose(p_variation(x, 1.0, (0.0, 1.0)), 1.0)
    with pytest.raises(ValueError):
        p_variation(x, 0.5)
    with pytest.raises(ValueError):
        p_variation(x, 2.0, (0.1, 1.0))


def test_variation_space_nesting():
    # for q >= p: pvar_q^q <= (max pair increment)^(q-p) * pvar_p^p
    rng = np.random.default_rng(4)
    for _ in range(10):
        x = random_path(rng, 2, 8)
        diffs = np.abs(x.values[None] - x.values[:, None]).sum(axis=2)
        for p, q in [(1.0, 2.0), (1.5, 2.5), (2.0, 3.0)]:
            lhs = p_variation(x, q) ** q
            rhs = diffs.max() ** (q - p) * p_variation(x, p) ** p
            assert lhs <= rhs * (1 + 1e-12)


# -- controls -------------------------------------------------------------------


def test_natural_control_diagonal_and_monotone_case():
    x = SampledPath([0.0, 0.5, 1.0], [[0.0], [0.4], [1.0]])
    w = natural_control(x, 2.0)
    assert np.allclose(np.diag(w.table), 0.0)
    # monotone 1d path: w(i, j) = (x_j - x_i)^p
    for i in range(3):
        for j in range(i, 3):
            assert np.isclose(
                w.table[i, j], (x.values[j, 0] - x.values[i, 0]) ** 2.0
            )


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_natural_control_superadditive(seed):
    rng = np.random.default_rng(seed)
    x = random_path(rng, int(rng.integers(1, 3)), int(rng.integers(2, 9)))
    natural_control(x, 1.7).validate()


def test_control_grid_invariant_failures():
    times = np.array([0.0, 1.0, 2.0])
    bad_diag = ControlGrid(times, np.full((3, 3), 1.0))
    with pytest.raises(ValueError):
        bad_diag.validate()
    sub = np.array([[0.0, 5.0, 1.0], [0.0, 0.0, 5.0], [0.0, 0.0, 0.0]])
    with pytest.raises(ValueError):
        ControlGrid(times, sub).validate()


def test_superadditive_envelope():
    times = np.array([0.0, 1.0, 2.0])
    w = ControlGrid(times, np.array([[0.0, 2.0, 1.0], [0, 0, 2.0], [0, 0, 0]]))
    env = superadditive_envelope(w)
    env.validate()
    assert env.table[0, 2] >= 4.0


def test_verify_controlled_natural_control_passes():
    rng = np.random.default_rng(5)
    x = random_path(rng, 2, 6)
    report = verify_controlled(x, 2.0, natural_control(x, 2.0))
    assert report.ok


def test_verify_controlled_zero_control_fails():
    x = SampledPath([0.0, 1.0], [[0.0], [1.0]])
    w = ControlGrid(x.times, np.zeros((2, 2)))
    report = verify_controlled(x, 2.0, w)
    assert not report.ok and report.kind == "increment"
    assert report.first_violation == (0, 1)


def test_verify_controlled_scaled_down_fails():
    rng = np.random.default_rng(6)
    x = random_path(rng, 1, 7)
    w = natural_control(x, 1.5)
    report = verify_controlled(x, 1.5, ControlGrid(w.times, 0.99 * w.table))
    assert not report.ok


# -- the constant beta_p ---------------------------------------------------------


def test_beta_1_closed_form():
    # series sums to 4 zeta(2): beta_1 = 1 + 2 pi^2 / 3
    assert abs(beta_p(1.0) - (1.0 + 2.0 * math.pi**2 / 3.0)) <= 1e-10


def test_beta_2_closed_form():
    expected = 2.0 * (1.0 + 2.0**1.5 * zeta(1.5))
    assert abs(beta_p(2.0) - expected) <= 1e-10


def test_beta_series_tail_bracket():
    # independent oracle: partial sum plus integral bracket of the tail
    for p in (1.3, 2.0, 3.7):
        r = (math.floor(p) + 1.0) / p
        assert r > 1.0
        k = np.arange(1, 400_001, dtype=float)
        partial = np.sum((2.0 / k) ** r)
        upper = partial + 2.0**r * 400_000.0 ** (1 - r) / (r - 1)
        lower = partial + 2.0**r * 400_001.0 ** (1 - r) / (r - 1)
        value = beta_p(p) / p - 1.0
        assert lower - 1e-9 <= value <= upper + 1e-9


def test_beta_rejects_small_p():
    with pytest.raises(ValueError):
        beta_p(0.9)


# -- the fractional binomial inequality ------------------------------------------


def test_neo_classical_n0():
    for p in (1.0, 1.7, 3.2):
        lhs, rhs = neo_classical_sides(p, 0, 1.3, 0.7)
        assert np.isclose(lhs, 1.0 / p)
        assert lhs <= rhs


def test_neo_classical_equality_at_p1():
    for n in (0, 1, 5, 12):
        lhs, rhs = neo_classical_sides(1.0, n, 0.8, 1.7)
        assert abs(lhs - rhs) <= 1e-12


def test_neo_classical_sweep():
    grid = np.linspace(0.0, 2.0, 5)
    for p in (1.1, 1.9, 2.6, 4.0):
        for n in range(0, 21, 4):
            for a in grid:
                for b in grid:
                    assert neo_classical_check(p, n, float(a), float(b))


def test_neo_classical_domain():
    with pytest.raises(ValueError):
        neo_classical_sides(1.0, -1, 1.0, 1.0)
    with pytest.raises(ValueError):
        neo_classical_sides(1.0, 1, -1.0, 1.0)
