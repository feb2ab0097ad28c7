"""Lipschitz jets in the remainder sense: evaluation, norms, composition.

A jet of degree n bundles a map with its first n symmetric multilinear
derivative fields and finite remainder bounds.  Derivative k at a point is
stored as a dense array of shape value_shape + (d,)*k, the trailing k axes
being the (symmetric) argument slots.  Vector-valued maps have value_shape
(e,); one-forms have value_shape (e, d), the second axis being the slot the
path increment is fed into.

Operator norms follow the l1 convention of the rest of the package: l1 over
the output axis, maximum over every input slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .errors import DomainExitError
from .variation import SampledPath, natural_control, p_variation, path_norm


@dataclass
class LipJet:
    """Degree-(n + eps) Lipschitz data: evaluators f^0..f^n plus a claimed norm."""

    domain_dim: int
    value_shape: tuple
    degree: int
    eps: float
    evaluators: tuple
    norm: float = 0.0
    name: str = ""
    valid: object = None  # optional point predicate

    def __post_init__(self):
        if not (0 < self.eps <= 1):
            raise ValueError(f"eps must lie in (0, 1], got {self.eps}")
        if self.degree < 0:
            raise ValueError("degree must be >= 0")
        if len(self.evaluators) != self.degree + 1:
            raise ValueError("need one evaluator per derivative order 0..n")
        self.value_shape = tuple(int(s) for s in self.value_shape)

    @property
    def gamma(self) -> float:
        return self.degree + self.eps

    def value(self, x) -> np.ndarray:
        return self.deriv(0, x)

    def deriv(self, k: int, x) -> np.ndarray:
        if k < 0 or k > self.degree:
            raise ValueError(f"derivative order {k} outside 0..{self.degree}")
        x = np.asarray(x, dtype=float).reshape(-1)
        out = np.asarray(self.evaluators[k](x), dtype=float)
        want = self.value_shape + (self.domain_dim,) * k
        return out.reshape(want)

    def apply(self, k: int, x, v) -> np.ndarray:
        """f^k(x) contracted with a k-tensor argument (a scalar when k = 0)."""
        d = self.deriv(k, x)
        if k == 0:
            return d * float(np.asarray(v).reshape(()))
        v = np.asarray(v, dtype=float).reshape((self.domain_dim,) * k)
        return np.tensordot(d, v, axes=k)

    def __call__(self, x) -> np.ndarray:
        return self.value(x)

    def check_domain(self, points) -> None:
        if self.valid is None:
            return
        for pt in np.atleast_2d(np.asarray(points, dtype=float)):
            if not self.valid(pt):
                raise DomainExitError(
                    f"point {pt} outside the domain of {self.name or 'jet'}"
                )


def op_norm(arr: np.ndarray) -> float:
    """l1 over the leading output axis, max over all remaining slots.

    For l1 norms on both sides this is the exact operator norm of a
    multilinear map given by its coefficient tensor.
    """
    a = np.abs(np.asarray(arr, dtype=float))
    if a.ndim == 0:
        return float(a)
    flat = a.reshape(a.shape[0], -1)
    return float(flat.sum(axis=0).max())


# -- remainders -------------------------------------------------------------


def remainder_tensor(jet: LipJet, k: int, x, y) -> np.ndarray:
    """R_k(x, y) as a tensor: f^k(x) minus the Taylor transport from y."""
    if k < 0 or k > jet.degree:
        raise ValueError(f"k must lie in 0..{jet.degree}")
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    out = jet.deriv(k, x).copy()
    step = x - y
    power = np.ones(())  # (x-y)^{(x)(j-k)} built incrementally
    fact = 1.0
    for j in range(k, jet.degree + 1):
        order = j - k
        if order > 0:
            power = np.multiply.outer(power, step)
            fact *= order
        term = jet.deriv(j, y)
        if order > 0:
            term = np.tensordot(term, power / fact, axes=order)
        out -= term
    return out


def taylor_remainder(jet: LipJet, k: int, x, y, v) -> np.ndarray:
    """R_k(x, y) applied to a k-tensor argument; vanishes exactly at x = y."""
    rk = remainder_tensor(jet, k, x, y)
    if k == 0:
        return rk
    v = np.asarray(v, dtype=float).reshape((jet.domain_dim,) * k)
    return np.tensordot(rk, v, axes=k)


def lip_norm_estimate(jet: LipJet, samples) -> float:
    """Lower bound for the Lipschitz norm from a finite sample set.

    Takes the maximum of the derivative operator norms over the samples and
    of the remainder ratios |R_k(x,y)| / |x-y|^(n + eps - k) over sample
    pairs.  Larger sample sets can only increase the estimate.
    """
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    if len(pts) < 2:
        raise ValueError("need at least two sample points")
    est = 0.0
    for x in pts:
        for k in range(jet.degree + 1):
            est = max(est, op_norm(jet.deriv(k, x)))
    for i, x in enumerate(pts):
        for j, y in enumerate(pts):
            if i == j:
                continue
            gap = float(np.abs(x - y).sum())
            if gap == 0.0:
                continue
            for k in range(jet.degree + 1):
                ratio = op_norm(remainder_tensor(jet, k, x, y)) / gap ** (
                    jet.gamma - k
                )
                est = max(est, ratio)
    return est


def symmetry_defect(jet: LipJet, k: int, x) -> float:
    """Largest deviation of f^k(x) from invariance under slot permutations."""
    if k < 2:
        return 0.0
    t = jet.deriv(k, x)
    lead = tuple(range(len(jet.value_shape)))
    base = len(jet.value_shape)
    worst = 0.0
    for perm in permutations(range(k)):
        axes = lead + tuple(base + p for p in perm)
        worst = max(worst, float(np.max(np.abs(t - t.transpose(axes)))))
    return worst


def finite_difference_defect(jet: LipJet, k: int, x, h: float = 1e-5) -> float:
    """Deviation of f^k from the central difference quotient of f^(k-1)."""
    if k < 1 or k > jet.degree:
        raise ValueError("k must lie in 1..degree")
    x = np.asarray(x, dtype=float).reshape(-1)
    d = jet.domain_dim
    approx = np.empty(jet.value_shape + (d,) * k)
    for i in range(d):
        step = np.zeros(d)
        step[i] = h
        diff = (jet.deriv(k - 1, x + step) - jet.deriv(k - 1, x - step)) / (2 * h)
        approx[..., i] = diff
    return float(np.max(np.abs(approx - jet.deriv(k, x))))


# -- composition ------------------------------------------------------------


def compose_jets(g: LipJet, f: LipJet, samples=None) -> LipJet:
    """Jets of g o f by the chain rule, supported up to degree 3.

    The claimed norm is the sample estimate when samples are given (a lower
    bound, like every norm this module produces); the composition bound of
    shape |g| * max(|f|^gamma, 1) is available separately as a diagnostic.
    """
    if len(f.value_shape) != 1:
        raise ValueError("inner jet must be vector valued")
    if f.value_shape[0] != g.domain_dim:
        raise ValueError(
            f"codomain of f ({f.value_shape[0]}) must match domain of g "
            f"({g.domain_dim})"
        )
    degree = min(f.degree, g.degree)
    if degree > 3:
        raise ValueError("composition is implemented for jet degree <= 3")

    def h0(x):
        return g.value(f.value(x))

    def h1(x):
        u = f.value(x)
        return np.einsum("ab,bi->ai", g.deriv(1, u), f.deriv(1, x))

    def h2(x):
        u = f.value(x)
        f1, f2 = f.deriv(1, x), f.deriv(2, x)
        out = np.einsum("abc,bi,cj->aij", g.deriv(2, u), f1, f1)
        out += np.einsum("ab,bij->aij", g.deriv(1, u), f2)
        return out

    def h3(x):
        u = f.value(x)
        f1, f2, f3 = f.deriv(1, x), f.deriv(2, x), f.deriv(3, x)
        g1, g2, g3 = g.deriv(1, u), g.deriv(2, u), g.deriv(3, u)
        out = np.einsum("abcd,bi,cj,dk->aijk", g3, f1, f1, f1)
        mixed = np.einsum("abc,bij,ck->aijk", g2, f2, f1)
        out += mixed + mixed.transpose(0, 1, 3, 2) + mixed.transpose(0, 3, 1, 2)
        out += np.einsum("ab,bijk->aijk", g1, f3)
        return out

    evaluators = (h0, h1, h2, h3)[: degree + 1]
    composed = LipJet(
        domain_dim=f.domain_dim,
        value_shape=g.value_shape,
        degree=degree,
        eps=min(f.eps, g.eps),
        evaluators=evaluators,
        name=f"{g.name or 'g'}*{f.name or 'f'}",
        valid=f.valid,
    )
    if samples is not None:
        composed.norm = lip_norm_estimate(composed, samples)
    return composed


def composition_bound_ratio(g: LipJet, f: LipJet, composed: LipJet) -> float:
    """Estimated norm of g o f over |g| max(|f|^gamma, 1); diagnostic only."""
    denom = g.norm * max(f.norm**composed.gamma, 1.0)
    if denom == 0.0:
        return float("inf")
    return composed.norm / denom


# -- image p-variation bound -------------------------------------------------


@dataclass
class ImagePVarBound:
    bound: float
    actual: float
    ok: bool


def image_pvar_bound(
    jet: LipJet,
    x: SampledPath,
    p: float,
    pieces: int,
    lip_norm: float | None = None,
    window=None,
) -> ImagePVarBound:
    """Compare |f(x)|_p^p against M^p n^(p-1) w(s,t).

    M is the local Lipschitz-1 norm, n the number of subdivision pieces from
    the covering construction, and w the natural p-variation control of the
    input path over the window.
    """
    if pieces < 1:
        raise ValueError("need at least one subdivision piece")
    M = jet.norm if lip_norm is None else float(lip_norm)
    jet.check_domain(x.values)
    omega = p_variation(x, p, window) ** p
    image = SampledPath(x.times, np.vstack([jet.value(v) for v in x.values]))
    actual = p_variation(image, p, window) ** p
    bound = M**p * pieces ** (p - 1.0) * omega
    return ImagePVarBound(bound, actual, actual <= bound * (1 + 1e-12) + 1e-300)


# -- built-in jet library ----------------------------------------------------


def _diag_tensor(d: int, k: int, values: np.ndarray) -> np.ndarray:
    out = np.zeros((d,) * (k + 1))
    out[(np.arange(d),) * (k + 1)] = values
    return out


def componentwise_jet(kind: str, dim: int, degree: int = 3) -> LipJet:
    """sin, cos or exp applied to each coordinate."""
    tables = {
        "sin": (np.sin, np.cos, lambda t: -np.sin(t), lambda t: -np.cos(t)),
        "cos": (np.cos, lambda t: -np.sin(t), lambda t: -np.cos(t), np.sin),
        "exp": (np.exp,) * 4,
    }
    if kind not in tables:
        raise ValueError(f"unknown componentwise map {kind!r}")
    funcs = tables[kind]

    def make(k):
        if k == 0:
            return lambda x: funcs[0](x)
        return lambda x: _diag_tensor(dim, k, funcs[k](x))

    return LipJet(
        dim, (dim,), degree, 1.0, tuple(make(k) for k in range(degree + 1)),
        norm=1.0 if kind in ("sin", "cos") else 0.0, name=kind,
    )


def constant_jet(value, dim: int, degree: int = 3) -> LipJet:
    value = np.asarray(value, dtype=float).reshape(-1)
    e = value.size

    def make(k):
        if k == 0:
            return lambda x: value
        return lambda x: np.zeros((e,) + (dim,) * k)

    return LipJet(
        dim, (e,), degree, 1.0, tuple(make(k) for k in range(degree + 1)),
        norm=float(np.abs(value).sum()), name="constant",
    )


def linear_jet(matrix, degree: int = 3) -> LipJet:
    A = np.atleast_2d(np.asarray(matrix, dtype=float))
    e, d = A.shape

    def make(k):
        if k == 0:
            return lambda x: A @ x
        if k == 1:
            return lambda x: A
        return lambda x: np.zeros((e,) + (d,) * k)

    return LipJet(
        d, (e,), degree, 1.0, tuple(make(k) for k in range(degree + 1)),
        norm=op_norm(A), name="linear",
    )


def identity_jet(dim: int, degree: int = 3) -> LipJet:
    jet = linear_jet(np.eye(dim), degree)
    jet.name = "identity"
    return jet


def _symmetrize(t: np.ndarray, slots: int) -> np.ndarray:
    lead = t.ndim - slots
    acc = np.zeros_like(t)
    for perm in permutations(range(slots)):
        axes = tuple(range(lead)) + tuple(lead + p for p in perm)
        acc += t.transpose(axes)
    return acc / math.factorial(slots)


def polynomial_jet(c0, c1=None, c2=None, c3=None, degree: int = 3) -> LipJet:
    """Polynomial map of degree <= 3 with exact jets.

    f(x) = c0 + c1 x + c2(x, x) + c3(x, x, x); the coefficient tensors are
    symmetrized over their argument slots on construction.
    """
    c0 = np.asarray(c0, dtype=float).reshape(-1)
    e = c0.size
    shapes = [c1, c2, c3]
    dims = [np.asarray(c).shape[-1] for c in shapes if c is not None]
    if not dims:
        raise ValueError("give at least a linear coefficient to fix the dimension")
    d = dims[0]
    c1 = np.zeros((e, d)) if c1 is None else np.asarray(c1, dtype=float).reshape(e, d)
    c2 = (
        np.zeros((e, d, d))
        if c2 is None
        else _symmetrize(np.asarray(c2, dtype=float).reshape(e, d, d), 2)
    )
    c3 = (
        np.zeros((e, d, d, d))
        if c3 is None
        else _symmetrize(np.asarray(c3, dtype=float).reshape(e, d, d, d), 3)
    )

    def f0(x):
        return (
            c0
            + c1 @ x
            + np.einsum("aij,i,j->a", c2, x, x)
            + np.einsum("aijk,i,j,k->a", c3, x, x, x)
        )

    def f1(x):
        return c1 + 2 * np.einsum("aij,j->ai", c2, x) + 3 * np.einsum(
            "aijk,j,k->ai", c3, x, x
        )

    def f2(x):
        return 2 * c2 + 6 * np.einsum("aijk,k->aij", c3, x)

    def f3(x):
        return 6 * c3

    return LipJet(
        d, (e,), degree, 1.0, (f0, f1, f2, f3)[: degree + 1], name="polynomial"
    )


def jet_linear_combination(terms, degree=None) -> LipJet:
    """Pointwise linear combination sum_i c_i * jet_i of same-shape jets."""
    coeffs = [float(c) for c, _ in terms]
    jets = [j for _, j in terms]
    base = jets[0]
    if degree is None:
        degree = min(j.degree for j in jets)
    for j in jets:
        if j.domain_dim != base.domain_dim or j.value_shape != base.value_shape:
            raise ValueError("jets in a combination must share shapes")

    def make(k):
        return lambda x: sum(c * j.deriv(k, x) for c, j in zip(coeffs, jets))

    return LipJet(
        base.domain_dim,
        base.value_shape,
        degree,
        min(j.eps for j in jets),
        tuple(make(k) for k in range(degree + 1)),
        name="combination",
    )


# -- one-forms ---------------------------------------------------------------


def constant_oneform(matrix, degree: int = 2) -> LipJet:
    """One-form with a constant coefficient matrix in L(R^d, R^e)."""
    A = np.atleast_2d(np.asarray(matrix, dtype=float))
    e, d = A.shape

    def make(k):
        if k == 0:
            return lambda x: A
        return lambda x: np.zeros((e, d) + (d,) * k)

    return LipJet(
        d, (e, d), degree, 1.0, tuple(make(k) for k in range(degree + 1)),
        norm=op_norm(A), name="constant-form",
    )


def rotation_oneform(degree: int = 2) -> LipJet:
    """The planar area form (x dy - y dx) / 2."""

    def a0(x):
        return 0.5 * np.array([[-x[1], x[0]]])

    def a1(x):
        out = np.zeros((1, 2, 2))
        out[0, 0, 1] = -0.5
        out[0, 1, 0] = 0.5
        return out

    def make(k):
        if k == 0:
            return a0
        if k == 1:
            return a1
        return lambda x: np.zeros((1, 2) + (2,) * k)

    return LipJet(2, (1, 2), degree, 1.0, tuple(make(k) for k in range(degree + 1)),
                  name="area-form")


def differential(jet: LipJet) -> LipJet:
    """The one-form df of a vector-valued jet: shifts every order down by one."""
    if len(jet.value_shape) != 1:
        raise ValueError("differential expects a vector-valued jet")
    if jet.degree < 1:
        raise ValueError("differential needs jet degree >= 1")
    e = jet.value_shape[0]

    def make(k):
        return lambda x: jet.deriv(k + 1, x)

    return LipJet(
        jet.domain_dim,
        (e, jet.domain_dim),
        jet.degree - 1,
        jet.eps,
        tuple(make(k) for k in range(jet.degree)),
        norm=jet.norm,
        name=f"d({jet.name or 'f'})",
        valid=jet.valid,
    )


# name -> builder, for CLI configuration
JET_LIBRARY = {
    "identity": lambda dim: identity_jet(dim),
    "sin": lambda dim: componentwise_jet("sin", dim),
    "cos": lambda dim: componentwise_jet("cos", dim),
    "exp": lambda dim: componentwise_jet("exp", dim),
    "square": lambda dim: polynomial_jet(
        np.zeros(dim), np.zeros((dim, dim)), _square_coeffs(dim)
    ),
}


def _square_coeffs(dim: int) -> np.ndarray:
    c2 = np.zeros((dim, dim, dim))
    c2[(np.arange(dim),) * 3] = 1.0
    return c2


def build_jet(name: str, dim: int) -> LipJet:
    if name not in JET_LIBRARY:
        raise ValueError(f"unknown jet {name!r}; known: {sorted(JET_LIBRARY)}")
    return JET_LIBRARY[name](dim)
