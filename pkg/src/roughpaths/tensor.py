"""Truncated tensor algebra over R^d.

Elements live in the degree-N truncation: a scalar level 0 plus one dense
coefficient array per level up to N.  Level i is stored flat with d**i
entries in row-major multi-index order, i.e. the last letter varies
fastest.  The base norm on R^d is l1 and each level carries the l1 norm of
its coordinates, which is admissible: it is exactly invariant under the
symmetric-group action and submultiplicative under the tensor product.

All values are treated as immutable after construction; every operation
returns a fresh element and is safe to call concurrently.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

# d**N growth is the real constraint; raise knowingly via the degree_cap
# arguments on the path-facing entry points.
DEGREE_CAP = 6


class TruncTensor:
    """Element of the truncated tensor algebra T^(N)(R^d)."""

    __slots__ = ("dim", "degree", "levels")

    def __init__(self, dim: int, degree: int, levels):
        dim = int(dim)
        degree = int(degree)
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        if degree < 0:
            raise ValueError(f"degree must be >= 0, got {degree}")
        if len(levels) != degree + 1:
            raise ValueError(f"expected {degree + 1} levels, got {len(levels)}")
        self.dim = dim
        self.degree = degree
        self.levels = []
        for i, lev in enumerate(levels):
            arr = np.asarray(lev, dtype=float).reshape(-1)
            if arr.size != dim**i:
                raise ValueError(f"level {i} needs {dim**i} entries, got {arr.size}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"level {i} has non-finite entries")
            self.levels.append(arr)

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, dim: int, degree: int) -> "TruncTensor":
        return cls(dim, degree, [np.zeros(dim**i) for i in range(degree + 1)])

    @classmethod
    def unit(cls, dim: int, degree: int) -> "TruncTensor":
        t = cls.zero(dim, degree)
        t.levels[0][0] = 1.0
        return t

    @classmethod
    def from_level1(cls, v, degree: int) -> "TruncTensor":
        """The element (0, v, 0, ..., 0) for a vector v in R^d."""
        v = np.asarray(v, dtype=float).reshape(-1)
        t = cls.zero(v.size, degree)
        if degree >= 1:
            t.levels[1] = v.copy()
        return t

    # -- basic structure -------------------------------------------------

    @property
    def scalar(self) -> float:
        return float(self.levels[0][0])

    def level(self, i: int) -> np.ndarray:
        """Flat coefficient array of level i."""
        return self.levels[i]

    def level_array(self, i: int) -> np.ndarray:
        """Level i reshaped to its (d, ..., d) multi-index form."""
        return self.levels[i].reshape((self.dim,) * i)

    def copy(self) -> "TruncTensor":
        return TruncTensor(self.dim, self.degree, [lev.copy() for lev in self.levels])

    def is_group_like(self, tol: float = 1e-12) -> bool:
        return abs(self.scalar - 1.0) <= tol

    def __add__(self, other: "TruncTensor") -> "TruncTensor":
        _check_compatible(self, other)
        return TruncTensor(
            self.dim, self.degree, [a + b for a, b in zip(self.levels, other.levels)]
        )

    def __sub__(self, other: "TruncTensor") -> "TruncTensor":
        _check_compatible(self, other)
        return TruncTensor(
            self.dim, self.degree, [a - b for a, b in zip(self.levels, other.levels)]
        )

    def __neg__(self) -> "TruncTensor":
        return TruncTensor(self.dim, self.degree, [-lev for lev in self.levels])

    def __mul__(self, c) -> "TruncTensor":
        c = float(c)
        return TruncTensor(self.dim, self.degree, [c * lev for lev in self.levels])

    __rmul__ = __mul__

    def __repr__(self):
        return f"TruncTensor(dim={self.dim}, degree={self.degree})"

    def flatten(self) -> np.ndarray:
        return np.concatenate(self.levels)

    @classmethod
    def from_flat(cls, dim: int, degree: int, flat: np.ndarray) -> "TruncTensor":
        levels, pos = [], 0
        for i in range(degree + 1):
            size = dim**i
            levels.append(np.asarray(flat[pos : pos + size], dtype=float))
            pos += size
        return cls(dim, degree, levels)

    def allclose(self, other: "TruncTensor", tol: float = 1e-12) -> bool:
        _check_compatible(self, other)
        return all(
            np.allclose(a, b, rtol=0.0, atol=tol)
            for a, b in zip(self.levels, other.levels)
        )

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        """JSON form with levels in row-major coordinate order."""
        return {
            "dim": self.dim,
            "degree": self.degree,
            "levels": [lev.tolist() for lev in self.levels],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "TruncTensor":
        return cls(payload["dim"], payload["degree"], payload["levels"])


def _check_compatible(a: TruncTensor, b: TruncTensor):
    if a.dim != b.dim or a.degree != b.degree:
        raise ValueError(
            f"incompatible tensors: dim {a.dim} vs {b.dim}, "
            f"degree {a.degree} vs {b.degree}"
        )


# -- algebra operations ---------------------------------------------------


def tensor_mul(a: TruncTensor, b: TruncTensor) -> TruncTensor:
    """Truncated product: level n of a*b is sum_k a_k (x) b_{n-k}."""
    _check_compatible(a, b)
    a0 = a.levels[0][0]
    b0 = b.levels[0][0]
    out = [np.array([a0 * b0])]
    for n in range(1, a.degree + 1):
        lev = a0 * b.levels[n] + b0 * a.levels[n]
        for k in range(1, n):
            lev = lev + np.multiply.outer(a.levels[k], b.levels[n - k]).ravel()
        out.append(lev)
    return TruncTensor(a.dim, a.degree, out)


def tensor_inverse(a: TruncTensor) -> TruncTensor:
    """Inverse via the geometric series in (1 - a/a0), exact after truncation."""
    a0 = a.levels[0][0]
    if a0 == 0.0:
        raise ValueError("tensor with zero scalar part is not invertible")
    u = TruncTensor.unit(a.dim, a.degree) - (1.0 / a0) * a
    out = TruncTensor.unit(a.dim, a.degree)
    acc = TruncTensor.unit(a.dim, a.degree)
    for _ in range(a.degree):
        acc = tensor_mul(acc, u)
        out = out + acc
    return (1.0 / a0) * out


def tensor_exp(v, degree: int) -> TruncTensor:
    """Exponential of a level-1 vector: levels v^(x)n / n!."""
    v = np.asarray(v, dtype=float).reshape(-1)
    out = [np.array([1.0])]
    acc = np.array([1.0])
    for n in range(1, degree + 1):
        acc = np.multiply.outer(acc, v).ravel() / n
        out.append(acc)
    return TruncTensor(v.size, degree, out)


def tensor_exp_full(a: TruncTensor) -> TruncTensor:
    """Exponential series of a tensor with zero scalar part (nilpotent)."""
    if abs(a.levels[0][0]) > 1e-14:
        raise ValueError("tensor_exp_full expects zero scalar part")
    out = TruncTensor.unit(a.dim, a.degree)
    acc = TruncTensor.unit(a.dim, a.degree)
    for k in range(1, a.degree + 1):
        acc = tensor_mul(acc, a) * (1.0 / k)
        out = out + acc
    return out


def tensor_log(g: TruncTensor) -> TruncTensor:
    """Logarithm of a group-like element, exact in the truncated algebra."""
    if abs(g.levels[0][0] - 1.0) > 1e-9:
        raise ValueError("tensor_log expects scalar part 1")
    u = g - TruncTensor.unit(g.dim, g.degree)
    u.levels[0][0] = 0.0
    out = TruncTensor.zero(g.dim, g.degree)
    acc = TruncTensor.unit(g.dim, g.degree)
    for k in range(1, g.degree + 1):
        acc = tensor_mul(acc, u)
        out = out + ((-1.0) ** (k + 1) / k) * acc
    return out


def project(a: TruncTensor, m: int) -> TruncTensor:
    """Canonical projection onto the degree-m truncation."""
    if m > a.degree:
        raise ValueError(f"cannot project degree {a.degree} onto degree {m}")
    return TruncTensor(a.dim, m, [lev.copy() for lev in a.levels[: m + 1]])


def lift_degree(a: TruncTensor, degree: int) -> TruncTensor:
    """Re-embed into a higher truncation, new levels set to zero."""
    if degree < a.degree:
        raise ValueError("lift_degree cannot lower the degree; use project")
    levels = [lev.copy() for lev in a.levels]
    levels += [np.zeros(a.dim**i) for i in range(a.degree + 1, degree + 1)]
    return TruncTensor(a.dim, degree, levels)


def permute_level(a: TruncTensor, n: int, sigma) -> TruncTensor:
    """Apply a permutation of {1..n} to the slots of level n only.

    The image of x_1 (x) ... (x) x_n is x_sigma(1) (x) ... (x) x_sigma(n).
    """
    if n < 1 or n > a.degree:
        raise ValueError(f"level {n} out of range for degree {a.degree}")
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(1, n + 1)):
        raise ValueError(f"not a permutation of 1..{n}: {sigma}")
    out = a.copy()
    axes = [s - 1 for s in sigma]
    out.levels[n] = a.level_array(n).transpose(axes).reshape(-1).copy()
    return out


def admissible_norm(a: TruncTensor) -> np.ndarray:
    """Per-level l1 norms (level 0 included)."""
    return np.array([np.abs(lev).sum() for lev in a.levels])


def norm_difference(a: TruncTensor, b: TruncTensor) -> float:
    """Largest per-level l1 norm of a - b."""
    return float(admissible_norm(a - b).max())


# -- words, linear forms and the shuffle product ---------------------------


class FormCombination:
    """Finite linear combination of coordinate words acting on T^(N)(R^d).

    Words are tuples of letters in 1..d; the empty word pairs with the
    scalar level.  Zero coefficients are never stored.
    """

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for word, coeff in dict(terms).items():
                self._add(tuple(int(x) for x in word), float(coeff))

    def _add(self, word, coeff):
        if any(letter < 1 for letter in word):
            raise ValueError(f"letters must be >= 1, got {word}")
        new = self.terms.get(word, 0.0) + coeff
        if new == 0.0:
            self.terms.pop(word, None)
        else:
            self.terms[word] = new

    @classmethod
    def word(cls, letters, coeff: float = 1.0) -> "FormCombination":
        return cls({tuple(letters): coeff})

    def __add__(self, other):
        out = FormCombination(self.terms)
        for w, c in other.terms.items():
            out._add(w, c)
        return out

    def __mul__(self, c):
        return FormCombination({w: float(c) * v for w, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, FormCombination) and self.terms == other.terms

    def __repr__(self):
        return f"FormCombination({self.terms!r})"


@lru_cache(maxsize=65536)
def _shuffle_words(u: tuple, v: tuple) -> tuple:
    """All interleavings of u and v with multiplicity, as (word, count) pairs."""
    if not u:
        return ((v, 1),)
    if not v:
        return ((u, 1),)
    counts = {}
    for word, c in _shuffle_words(u[:-1], v):
        counts[word + (u[-1],)] = counts.get(word + (u[-1],), 0) + c
    for word, c in _shuffle_words(u, v[:-1]):
        counts[word + (v[-1],)] = counts.get(word + (v[-1],), 0) + c
    return tuple(counts.items())


def shuffle(e, f) -> FormCombination:
    """Shuffle product of two word combinations."""
    e = e if isinstance(e, FormCombination) else FormCombination.word(e)
    f = f if isinstance(f, FormCombination) else FormCombination.word(f)
    out = FormCombination()
    for wu, cu in e.terms.items():
        for wv, cv in f.terms.items():
            for word, mult in _shuffle_words(wu, wv):
                out._add(word, cu * cv * mult)
    return out


def word_index(word, dim: int) -> int:
    """Flat index of a word in the row-major level layout."""
    idx = 0
    for letter in word:
        if letter < 1 or letter > dim:
            raise ValueError(f"letter {letter} outside 1..{dim}")
        idx = idx * dim + (letter - 1)
    return idx


def apply_form(e, a: TruncTensor) -> float:
    """Dual pairing of a word combination with a tensor (coordinate extraction)."""
    e = e if isinstance(e, FormCombination) else FormCombination.word(e)
    total = 0.0
    for word, coeff in e.terms.items():
        if len(word) > a.degree:
            raise ValueError(
                f"word of length {len(word)} exceeds tensor degree {a.degree}"
            )
        total += coeff * a.levels[len(word)][word_index(word, a.dim)]
    return float(total)


def all_words(dim: int, max_len: int):
    """All words over 1..dim with length 0..max_len, shortest first."""
    out = [()]
    frontier = [()]
    for _ in range(max_len):
        frontier = [w + (letter,) for w in frontier for letter in range(1, dim + 1)]
        out.extend(frontier)
    return out
