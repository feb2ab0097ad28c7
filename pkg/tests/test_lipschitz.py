import numpy as np
import pytest

from roughpaths.acceptance import random_path
from roughpaths.errors import DomainExitError
from roughpaths.lipschitz import (
    LipJet,
    build_jet,
    componentwise_jet,
    compose_jets,
    composition_bound_ratio,
    constant_jet,
    constant_oneform,
    differential,
    finite_difference_defect,
    identity_jet,
    image_pvar_bound,
    jet_linear_combination,
    linear_jet,
    lip_norm_estimate,
    op_norm,
    polynomial_jet,
    remainder_tensor,
    rotation_oneform,
    symmetry_defect,
    taylor_remainder,
)
from roughpaths.variation import SampledPath, p_variation


def quadratic_1d():
    # f(x) = x^2 with jets (x^2, 2x), degree 1
    return LipJet(
        1, (1,), 1, 1.0,
        (lambda x: np.array([x[0] ** 2]), lambda x: np.array([[2.0 * x[0]]])),
        name="square1d",
    )


def sin_1d(degree=1):
    return componentwise_jet("sin", 1, degree=degree)


# -- remainders -----------------------------------------------------------------


def test_remainder_vanishes_at_equal_points():
    jet = componentwise_jet("sin", 2)
    x = np.array([0.3, -0.4])
    for k in range(jet.degree + 1):
        v = np.ones((2,) * k) if k else 1.0
        assert np.allclose(taylor_remainder(jet, k, x, x, v), 0.0)


def test_quadratic_remainder_closed_form():
    jet = quadratic_1d()
    for x, y in [(0.0, 1.0), (0.4, -0.3), (2.0, 1.5)]:
        r0 = taylor_remainder(jet, 0, [x], [y], 1.0)
        assert np.isclose(r0[0], (x - y) ** 2)


def test_sin_remainder_bound():
    jet = sin_1d()
    grid = np.linspace(0.0, 1.0, 25)
    for x in grid:
        for y in grid:
            if x == y:
                continue
            r0 = abs(taylor_remainder(jet, 0, [x], [y], 1.0)[0])
            assert r0 <= 0.5 * (x - y) ** 2 + 1e-15
            assert r0 <= 1.0 * abs(x - y) ** 2 + 1e-15


def test_remainder_k_out_of_range():
    with pytest.raises(ValueError):
        remainder_tensor(quadratic_1d(), 2, [0.0], [1.0])


# -- norm estimation --------------------------------------------------------------


def test_norm_of_constant_jet():
    jet = constant_jet([1.0, -2.0], dim=3)
    est = lip_norm_estimate(jet, np.zeros((2, 3)) + [[0.0] * 3, [1.0] * 3])
    assert np.isclose(est, 3.0)


def test_sin_norm_estimate_on_dense_grid():
    jet = sin_1d()
    grid = np.linspace(0.0, 1.0, 200)[:, None]
    est = lip_norm_estimate(jet, grid)
    assert 1.0 - 1e-3 <= est <= 1.0 + 1e-3


def test_norm_estimate_monotone_in_samples():
    jet = sin_1d()
    small = np.linspace(0.2, 0.8, 10)[:, None]
    large = np.linspace(0.0, 1.0, 30)[:, None]
    assert lip_norm_estimate(jet, np.vstack([small, large])) >= lip_norm_estimate(
        jet, small
    )


def test_norm_estimate_needs_two_points():
    with pytest.raises(ValueError):
        lip_norm_estimate(sin_1d(), np.zeros((1, 1)))


def test_remainder_self_consistency():
    jet = componentwise_jet("cos", 2)
    rng = np.random.default_rng(0)
    pts = rng.uniform(-1.0, 1.0, size=(12, 2))
    est = lip_norm_estimate(jet, pts)
    for x in pts[:4]:
        for y in pts[4:8]:
            gap = np.abs(x - y).sum()
            for k in range(jet.degree + 1):
                r = op_norm(remainder_tensor(jet, k, x, y))
                assert r <= est * gap ** (jet.gamma - k) * (1 + 1e-9)


# -- jets and their symmetry / derivative structure ----------------------------------


def test_jet_symmetry_random_points():
    rng = np.random.default_rng(1)
    jets = [componentwise_jet("sin", 3), build_jet("square", 3), _random_cubic(rng, 3)]
    for jet in jets:
        for _ in range(5):
            x = rng.normal(size=3)
            for k in range(2, jet.degree + 1):
                assert symmetry_defect(jet, k, x) <= 1e-10


def _random_cubic(rng, dim):
    return polynomial_jet(
        rng.normal(size=dim),
        rng.normal(size=(dim, dim)),
        rng.normal(size=(dim, dim, dim)),
        rng.normal(size=(dim, dim, dim, dim)),
    )


def test_jets_match_finite_differences():
    rng = np.random.default_rng(2)
    jets = [
        componentwise_jet("exp", 2),
        _random_cubic(rng, 2),
        rotation_oneform(),
    ]
    for jet in jets:
        for _ in range(3):
            x = rng.uniform(-0.5, 0.5, size=2)
            for k in range(1, jet.degree + 1):
                assert finite_difference_defect(jet, k, x) <= 1e-6


# -- composition -----------------------------------------------------------------------


def test_compose_linear_maps():
    A = np.array([[1.0, 2.0], [0.0, -1.0]])
    B = np.array([[0.5, 0.0], [1.0, 1.0]])
    h = compose_jets(linear_jet(A), linear_jet(B))
    x = np.array([0.3, -0.7])
    assert np.allclose(h.value(x), A @ B @ x)
    assert np.allclose(h.deriv(1, x), A @ B)
    assert np.allclose(h.deriv(2, x), 0.0)


def test_compose_identities():
    h = compose_jets(identity_jet(2), identity_jet(2))
    x = np.array([1.0, 2.0])
    assert np.allclose(h.value(x), x)
    assert np.allclose(h.deriv(1, x), np.eye(2))


def test_compose_against_finite_differences():
    h = compose_jets(componentwise_jet("sin", 2), build_jet("square", 2))
    rng = np.random.default_rng(3)
    for _ in range(4):
        x = rng.uniform(-0.7, 0.7, 2)
        assert finite_difference_defect(h, 1, x) <= 1e-6
        assert finite_difference_defect(h, 2, x) <= 1e-6


def test_compose_norm_estimate_and_ratio():
    g = componentwise_jet("sin", 2)
    f = build_jet("square", 2)
    samples = np.random.default_rng(4).uniform(-1, 1, size=(10, 2))
    f.norm = lip_norm_estimate(f, samples)
    h = compose_jets(g, f, samples=samples)
    assert h.norm > 0.0
    ratio = composition_bound_ratio(g, f, h)
    assert np.isfinite(ratio) and ratio > 0.0


def test_compose_dimension_mismatch():
    with pytest.raises(ValueError):
        compose_jets(componentwise_jet("sin", 3), build_jet("square", 2))


def test_jet_linear_combination():
    a = componentwise_jet("sin", 2)
    b = componentwise_jet("cos", 2)
    combo = jet_linear_combination([(2.0, a), (-1.0, b)])
    x = np.array([0.2, 0.4])
    assert np.allclose(combo.value(x), 2 * np.sin(x) - np.cos(x))
    assert np.allclose(
        combo.deriv(1, x), 2 * np.diag(np.cos(x)) + np.diag(np.sin(x))
    )


# -- differential / one-forms -------------------------------------------------------------


def test_differential_shapes_and_values():
    f = build_jet("square", 2)
    alpha = differential(f)
    assert alpha.value_shape == (2, 2)
    x = np.array([0.5, -1.0])
    assert np.allclose(alpha.value(x), np.diag(2 * x))
    assert alpha.degree == f.degree - 1


def test_rotation_oneform_values():
    alpha = rotation_oneform()
    x = np.array([2.0, 3.0])
    assert np.allclose(alpha.value(x), [[-1.5, 1.0]])
    assert finite_difference_defect(alpha, 1, x) <= 1e-8


def test_constant_oneform():
    A = np.array([[1.0, 0.0], [2.0, -1.0]])
    alpha = constant_oneform(A)
    assert np.allclose(alpha.value(np.zeros(2)), A)
    assert np.allclose(alpha.deriv(1, np.ones(2)), 0.0)


def test_domain_guard():
    jet = componentwise_jet("sin", 2)
    jet.valid = lambda x: np.abs(x).sum() < 1.0
    with pytest.raises(DomainExitError):
        jet.check_domain([[2.0, 2.0]])


# -- image p-variation bound ------------------------------------------------------------------


def test_image_bound_identity_is_tight():
    x = SampledPath([0.0, 0.5, 1.0], [[0.0], [0.4], [1.0]])
    res = image_pvar_bound(identity_jet(1), x, 2.0, 1, lip_norm=1.0)
    assert res.ok and np.isclose(res.bound, res.actual)


def test_image_bound_scaled_identity():
    x = SampledPath([0.0, 0.5, 1.0], [[0.0], [0.4], [1.0]])
    doubled = linear_jet([[2.0]])
    res = image_pvar_bound(doubled, x, 1.5, 1, lip_norm=2.0)
    assert res.ok
    assert np.isclose(res.actual, 2.0**1.5 * p_variation(x, 1.5) ** 1.5)
    assert np.isclose(res.bound, res.actual)


def test_image_bound_sin_zigzag():
    rng = np.random.default_rng(5)
    for _ in range(10):
        n = int(rng.integers(4, 10))
        heights = rng.uniform(0.2, 1.5, n) * np.where(np.arange(n) % 2 == 0, 1, -1)
        zig = SampledPath(np.linspace(0, 1, n), heights)
        res = image_pvar_bound(componentwise_jet("sin", 1), zig, 2.0, 3, lip_norm=1.0)
        assert res.ok


def test_image_bound_needs_positive_pieces():
    x = SampledPath([0.0, 1.0], [[0.0], [1.0]])
    with pytest.raises(ValueError):
        image_pvar_bound(identity_jet(1), x, 2.0, 0)
