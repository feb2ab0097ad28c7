import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roughpaths.tensor import (
    FormCombination,
    TruncTensor,
    admissible_norm,
    all_words,
    apply_form,
    norm_difference,
    permute_level,
    project,
    shuffle,
    tensor_exp,
    tensor_exp_full,
    tensor_inverse,
    tensor_log,
    tensor_mul,
    word_index,
)
from roughpaths.signature import signature
from roughpaths.variation import SampledPath


def random_tensor(rng, dim, degree, scale=1.0):
    return TruncTensor(
        dim, degree, [scale * rng.normal(size=dim**i) for i in range(degree + 1)]
    )


def group_like(rng, dim, degree):
    g = random_tensor(rng, dim, degree, scale=0.5)
    g.levels[0][0] = 1.0
    return g


# -- multiplication ----------------------------------------------------------


def test_mul_rank_one():
    u = np.array([1.0, 2.0])
    v = np.array([-0.5, 3.0])
    a = TruncTensor(2, 2, [[1.0], u, np.zeros(4)])
    b = TruncTensor(2, 2, [[1.0], v, np.zeros(4)])
    out = tensor_mul(a, b)
    assert np.allclose(out.level(1), u + v)
    assert np.allclose(out.level(2), np.outer(u, v).ravel())


def test_mul_unit_laws():
    rng = np.random.default_rng(0)
    a = random_tensor(rng, 3, 3)
    one = TruncTensor.unit(3, 3)
    assert norm_difference(tensor_mul(a, one), a) == 0.0
    assert norm_difference(tensor_mul(one, a), a) == 0.0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_mul_associative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_tensor(rng, 2, 3) for _ in range(3))
    lhs = tensor_mul(tensor_mul(a, b), c)
    rhs = tensor_mul(a, tensor_mul(b, c))
    assert norm_difference(lhs, rhs) <= 1e-12


def test_mul_bilinear():
    rng = np.random.default_rng(1)
    a, b, c = (random_tensor(rng, 2, 2) for _ in range(3))
    lhs = tensor_mul(a, 2.0 * b + c)
    rhs = 2.0 * tensor_mul(a, b) + tensor_mul(a, c)
    assert norm_difference(lhs, rhs) <= 1e-12


def test_mul_shape_mismatch():
    with pytest.raises(ValueError):
        tensor_mul(TruncTensor.unit(2, 2), TruncTensor.unit(3, 2))
    with pytest.raises(ValueError):
        tensor_mul(TruncTensor.unit(2, 2), TruncTensor.unit(2, 3))


# -- inverse ------------------------------------------------------------------


def test_inverse_rank_one():
    v = np.array([0.7, -0.2])
    a = TruncTensor(2, 2, [[1.0], v, np.zeros(4)])
    inv = tensor_inverse(a)
    assert np.allclose(inv.level(1), -v)
    assert np.allclose(inv.level(2), np.outer(v, v).ravel())


def test_inverse_unit():
    one = TruncTensor.unit(2, 4)
    assert norm_difference(tensor_inverse(one), one) == 0.0


def test_inverse_of_group_element():
    rng = np.random.default_rng(2)
    g = tensor_exp(rng.normal(size=3), 4)
    prod = tensor_mul(g, tensor_inverse(g))
    assert norm_difference(prod, TruncTensor.unit(3, 4)) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(1e-6, 10.0))
def test_inverse_random_scalar_parts(seed, scalar):
    # the inverse series conditions on |levels| / |scalar|, so the accuracy
    # statement is at matched scale: levels of size comparable to the scalar
    rng = np.random.default_rng(seed)
    a = random_tensor(rng, 2, 3, scale=0.3 * scalar)
    a.levels[0][0] = scalar
    prod = tensor_mul(a, tensor_inverse(a))
    assert norm_difference(prod, TruncTensor.unit(2, 3)) <= 1e-12


def test_inverse_zero_scalar_rejected():
    a = TruncTensor.zero(2, 2)
    with pytest.raises(ValueError):
        tensor_inverse(a)


# -- exp / log ---------------------------------------------------------------


def test_exp_series_levels():
    v = np.array([0.3, -1.1])
    e = tensor_exp(v, 3)
    vv = np.outer(v, v).ravel()
    vvv = np.multiply.outer(np.outer(v, v), v).ravel()
    assert np.allclose(e.level(1), v)
    assert np.allclose(e.level(2), vv / 2.0)
    assert np.allclose(e.level(3), vvv / 6.0)


def test_log_of_unit_is_zero():
    out = tensor_log(TruncTensor.unit(2, 3))
    assert norm_difference(out, TruncTensor.zero(2, 3)) == 0.0


def test_exp_log_roundtrip():
    rng = np.random.default_rng(3)
    v = rng.normal(size=2)
    back = tensor_log(tensor_exp(v, 5))
    assert norm_difference(back, TruncTensor.from_level1(v, 5)) <= 1e-12


def test_exp_full_matches_vector_exp():
    v = np.array([0.4, 0.9, -0.3])
    assert norm_difference(
        tensor_exp_full(TruncTensor.from_level1(v, 4)), tensor_exp(v, 4)
    ) <= 1e-14


def test_log_requires_unital_scalar():
    a = TruncTensor.zero(2, 2)
    with pytest.raises(ValueError):
        tensor_log(a)


# -- projection ---------------------------------------------------------------


def test_project_identity_and_truncation():
    rng = np.random.default_rng(4)
    a = random_tensor(rng, 2, 3)
    assert norm_difference(project(a, 3), a) == 0.0
    p1 = project(tensor_exp(np.array([1.0, 2.0]), 4), 1)
    assert p1.degree == 1 and np.allclose(p1.level(1), [1.0, 2.0])
    with pytest.raises(ValueError):
        project(a, 4)


def test_project_is_homomorphism():
    rng = np.random.default_rng(5)
    a, b = random_tensor(rng, 2, 4), random_tensor(rng, 2, 4)
    lhs = project(tensor_mul(a, b), 2)
    rhs = tensor_mul(project(a, 2), project(b, 2))
    assert norm_difference(lhs, rhs) <= 1e-12


# -- permutation action -------------------------------------------------------


def test_permute_identity():
    rng = np.random.default_rng(6)
    a = random_tensor(rng, 2, 3)
    assert norm_difference(permute_level(a, 3, (1, 2, 3)), a) == 0.0


def test_permute_swap_coordinates():
    a = TruncTensor(2, 2, [[1.0], np.zeros(2), np.arange(4.0)])
    swapped = permute_level(a, 2, (2, 1))
    # coordinate (i, j) moves to (j, i)
    assert np.allclose(swapped.level_array(2), a.level_array(2).T)


def test_permute_preserves_admissible_norm():
    rng = np.random.default_rng(7)
    a = random_tensor(rng, 3, 3)
    for sigma in [(2, 1, 3), (3, 1, 2), (2, 3, 1)]:
        assert np.allclose(
            admissible_norm(permute_level(a, 3, sigma)), admissible_norm(a)
        )


def test_permute_invalid():
    a = TruncTensor.unit(2, 2)
    with pytest.raises(ValueError):
        permute_level(a, 2, (1, 1))
    with pytest.raises(ValueError):
        permute_level(a, 3, (1, 2, 3))


# -- admissible norm ----------------------------------------------------------


def test_norm_of_unit():
    norms = admissible_norm(TruncTensor.unit(3, 3))
    assert np.allclose(norms, [1.0, 0.0, 0.0, 0.0])


def test_norm_multiplicative_on_elementary_tensors():
    u = np.array([1.0, -2.0])
    v = np.array([0.5, 4.0])
    a = TruncTensor(2, 1, [[0.0], u])
    b = TruncTensor(2, 1, [[0.0], v])
    prod_norm = admissible_norm(
        tensor_mul(
            TruncTensor(2, 2, [[0.0], u, np.zeros(4)]),
            TruncTensor(2, 2, [[0.0], v, np.zeros(4)]),
        )
    )[2]
    assert np.isclose(prod_norm, admissible_norm(a)[1] * admissible_norm(b)[1])


def test_norm_submultiplicative_thousand_pairs():
    rng = np.random.default_rng(8)
    for _ in range(1000):
        dim = int(rng.integers(1, 4))
        degree = int(rng.integers(1, 5))
        a = random_tensor(rng, dim, degree)
        b = random_tensor(rng, dim, degree)
        na, nb = admissible_norm(a), admissible_norm(b)
        nprod = admissible_norm(tensor_mul(a, b))
        for n in range(degree + 1):
            bound = sum(na[k] * nb[n - k] for k in range(n + 1))
            assert nprod[n] <= bound * (1 + 1e-12)


# -- words, forms and shuffles -------------------------------------------------


def test_word_index_little_endian():
    # last letter varies fastest in the flat layout
    assert word_index((1, 2), 2) == 1
    assert word_index((2, 1), 2) == 2
    with pytest.raises(ValueError):
        word_index((3,), 2)


def test_shuffle_single_letters():
    out = shuffle((1,), (2,))
    assert out.terms == {(1, 2): 1.0, (2, 1): 1.0}


def test_shuffle_empty_word_is_unit():
    out = shuffle((), (1, 2))
    assert out.terms == {(1, 2): 1.0}


def test_shuffle_with_multiplicity():
    out = shuffle((1,), (1,))
    assert out.terms == {(1, 1): 2.0}


def test_form_combination_drops_zero_coefficients():
    fc = FormCombination({(1,): 1.0}) + FormCombination({(1,): -1.0})
    assert fc.terms == {}


def test_apply_form_word_too_long():
    with pytest.raises(ValueError):
        apply_form((1, 1, 1), TruncTensor.unit(2, 2))


def test_shuffle_identity_on_signature():
    rng = np.random.default_rng(9)
    x = SampledPath(np.linspace(0, 1, 6), 0.4 * rng.normal(size=(6, 2)))
    sig = signature(x, 4)
    words = all_words(2, 2)
    for e in words:
        for f in words:
            lhs = apply_form(e, sig) * apply_form(f, sig)
            rhs = apply_form(shuffle(e, f), sig)
            assert abs(lhs - rhs) <= 1e-10


# -- serialization -------------------------------------------------------------


def test_json_roundtrip():
    rng = np.random.default_rng(10)
    a = random_tensor(rng, 2, 3)
    back = TruncTensor.from_dict(a.to_dict())
    assert norm_difference(a, back) == 0.0


def test_rejects_nonfinite():
    with pytest.raises(ValueError):
        TruncTensor(2, 1, [[1.0], [np.nan, 0.0]])
