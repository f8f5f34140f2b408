"""Exterior algebra over Euclidean R^n in an orthonormal frame.

Forms are stored sparsely as ``{(i1, ..., ik): coeff}`` with strictly
increasing 1-based index tuples; the coefficient of ``(i1, ..., ik)`` is the
value of the form on ``(e_i1, ..., e_ik)``.
"""
from __future__ import annotations

import itertools
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

Vector = Union[int, Sequence[float], np.ndarray]


def _sort_with_sign(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sort an index tuple, returning (sign of the permutation, sorted tuple).

    Returns sign 0 if an index repeats.
    """
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    # insertion sort, counting transpositions
    for a in range(1, len(idx)):
        b = a
        while b > 0 and idx[b - 1] > idx[b]:
            idx[b - 1], idx[b] = idx[b], idx[b - 1]
            sign = -sign
            b -= 1
    return sign, tuple(idx)


class ExteriorForm:
    """An immutable k-form on R^n."""

    __slots__ = ("n", "k", "_coeffs")

    def __init__(self, n: int, k: int, coeffs: Mapping[Sequence[int], float] | None = None):
        if n < 1:
            raise ValueError(f"ambient dimension must be >= 1, got {n}")
        if not 0 <= k <= n:
            raise ValueError(f"grade {k} out of range for n={n}")
        store: dict[tuple[int, ...], float] = {}
        for key, val in (coeffs or {}).items():
            key = tuple(int(i) for i in key)
            if len(key) != k:
                raise ValueError(f"index tuple {key} does not have length {k}")
            if any(i < 1 or i > n for i in key):
                raise ValueError(f"index tuple {key} out of range 1..{n}")
            sign, skey = _sort_with_sign(key)
            if sign == 0:
                continue
            store[skey] = store.get(skey, 0.0) + sign * float(val)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "_coeffs", store)

    def __setattr__(self, name, value):
        raise AttributeError("ExteriorForm is immutable")

    @property
    def coeffs(self) -> Mapping[tuple[int, ...], float]:
        return MappingProxyType(self._coeffs)

    def items(self):
        return self._coeffs.items()

    def __getitem__(self, idx: Sequence[int]) -> float:
        sign, key = _sort_with_sign(idx)
        if sign == 0:
            return 0.0
        return sign * self._coeffs.get(key, 0.0)

    def _check_same(self, other: "ExteriorForm"):
        if not isinstance(other, ExteriorForm):
            return NotImplemented
        if (self.n, self.k) != (other.n, other.k):
            raise ValueError(
                f"cannot combine forms of (n, k) = {(self.n, self.k)} and {(other.n, other.k)}"
            )
        return None

    def __add__(self, other: "ExteriorForm") -> "ExteriorForm":
        bad = self._check_same(other)
        if bad is NotImplemented:
            return bad
        out = dict(self._coeffs)
        for key, val in other._coeffs.items():
            out[key] = out.get(key, 0.0) + val
        return ExteriorForm(self.n, self.k, out)

    def __neg__(self) -> "ExteriorForm":
        return ExteriorForm(self.n, self.k, {key: -v for key, v in self._coeffs.items()})

    def __sub__(self, other: "ExteriorForm") -> "ExteriorForm":
        return self + (-other)

    def __mul__(self, scalar: float) -> "ExteriorForm":
        if isinstance(scalar, ExteriorForm):
            return NotImplemented
        return ExteriorForm(self.n, self.k, {key: scalar * v for key, v in self._coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "ExteriorForm":
        return self * (1.0 / scalar)

    def __xor__(self, other: "ExteriorForm") -> "ExteriorForm":
        return wedge(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExteriorForm):
            return NotImplemented
        if (self.n, self.k) != (other.n, other.k):
            return False
        keys = set(self._coeffs) | set(other._coeffs)
        return all(self._coeffs.get(q, 0.0) == other._coeffs.get(q, 0.0) for q in keys)

    __hash__ = None  # mutable-looking value semantics; compare with allclose instead

    def allclose(self, other: "ExteriorForm", atol: float = 1e-10) -> bool:
        if (self.n, self.k) != (other.n, other.k):
            return False
        keys = set(self._coeffs) | set(other._coeffs)
        return all(abs(self._coeffs.get(q, 0.0) - other._coeffs.get(q, 0.0)) <= atol for q in keys)

    def is_zero(self, atol: float = 0.0) -> bool:
        return all(abs(v) <= atol for v in self._coeffs.values())

    def __repr__(self) -> str:
        terms = [
            f"{v:+g} e{''.join(map(str, key)) if key else '∅'}"
            for key, v in sorted(self._coeffs.items())
            if v != 0.0
        ]
        body = " ".join(terms) if terms else "0"
        return f"ExteriorForm(n={self.n}, k={self.k}: {body})"


def zero(n: int, k: int) -> ExteriorForm:
    return ExteriorForm(n, k)


def scalar(n: int, value: float) -> ExteriorForm:
    return ExteriorForm(n, 0, {(): value})


def basis(n: int, *idx: int) -> ExteriorForm:
    """The monomial e_{i1} ∧ ... ∧ e_{ik}; the indices need not be sorted."""
    return ExteriorForm(n, len(idx), {tuple(idx): 1.0})


def vector(v: Sequence[float]) -> ExteriorForm:
    """Grade-1 form with components ``v`` (0-based array, 1-based keys)."""
    v = np.asarray(v, dtype=float)
    return ExteriorForm(len(v), 1, {(i + 1,): float(c) for i, c in enumerate(v) if c != 0.0})


def from_terms(n: int, terms: Iterable[tuple[Sequence[int], float]]) -> ExteriorForm:
    """Build a form from ``[(indices, coeff), ...]``; all index tuples share one length."""
    terms = list(terms)
    if not terms:
        raise ValueError("from_terms needs at least one term to fix the grade")
    out: dict[tuple[int, ...], float] = {}
    k = len(terms[0][0])
    for idx, c in terms:
        sign, key = _sort_with_sign(idx)
        if sign == 0:
            continue
        out[key] = out.get(key, 0.0) + sign * c
    return ExteriorForm(n, k, out)


def _as_vector(x: Vector, n: int) -> np.ndarray:
    if isinstance(x, (int, np.integer)):
        if not 1 <= x <= n:
            raise IndexError(f"frame index {x} out of range 1..{n}")
        v = np.zeros(n)
        v[x - 1] = 1.0
        return v
    v = np.asarray(x, dtype=float)
    if v.shape != (n,):
        raise ValueError(f"vector of shape {v.shape} does not match n={n}")
    return v


def wedge(a: ExteriorForm, b: ExteriorForm) -> ExteriorForm:
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} != {b.n}")
    k = a.k + b.k
    if k > a.n:
        # grade exceeds n: only the zero form exists, kept at grade n
        return ExteriorForm(a.n, a.n)
    out: dict[tuple[int, ...], float] = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            sign, key = _sort_with_sign(ka + kb)
            if sign:
                out[key] = out.get(key, 0.0) + sign * va * vb
    return ExteriorForm(a.n, k, out)


def interior(x: Vector, w: ExteriorForm) -> ExteriorForm:
    """Contraction x ⌟ w. On 0-forms this returns the zero 0-form."""
    if w.k == 0:
        return ExteriorForm(w.n, 0)
    v = _as_vector(x, w.n)
    out: dict[tuple[int, ...], float] = {}
    for key, val in w.items():
        for pos, i in enumerate(key):
            c = v[i - 1]
            if c == 0.0:
                continue
            rest = key[:pos] + key[pos + 1:]
            out[rest] = out.get(rest, 0.0) + (-1) ** pos * c * val
    return ExteriorForm(w.n, w.k - 1, out)


def norm_sq(w: ExteriorForm) -> float:
    return float(sum(v * v for v in w._coeffs.values()))


def sigma_T(t: ExteriorForm) -> ExteriorForm:
    """σ_T = 1/2 Σ_i (e_i ⌟ T) ∧ (e_i ⌟ T)."""
    if t.k != 3:
        raise ValueError(f"sigma_T needs a 3-form, got grade {t.k}")
    if t.n < 4:
        return ExteriorForm(t.n, t.n)
    acc = ExteriorForm(t.n, 4)
    for i in range(1, t.n + 1):
        c = interior(i, t)
        acc = acc + wedge(c, c)
    return 0.5 * acc


def vector_valued_torsion(t: ExteriorForm, i: int, j: int) -> np.ndarray:
    """T(e_i, e_j, ·) as a vector in R^n (0-based array)."""
    if t.k != 3:
        raise ValueError(f"expected a 3-form, got grade {t.k}")
    for idx in (i, j):
        if not 1 <= idx <= t.n:
            raise IndexError(f"frame index {idx} out of range 1..{t.n}")
    return np.array([t[(i, j, m)] for m in range(1, t.n + 1)])


def dense(w: ExteriorForm) -> np.ndarray:
    """Fully antisymmetric component array of shape (n,)*k, 0-based."""
    arr = np.zeros((w.n,) * w.k)
    for key, val in w.items():
        for perm in itertools.permutations(range(w.k)):
            sign, _ = _sort_with_sign(perm)
            arr[tuple(key[p] - 1 for p in perm)] = sign * val
    return arr


def from_dense(arr: np.ndarray, atol: float = 0.0, n: int | None = None) -> ExteriorForm:
    """Inverse of :func:`dense`; reads the increasing-index components only.

    ``n`` is needed only for 0-forms, whose array carries no dimension.
    """
    arr = np.asarray(arr, dtype=float)
    k = arr.ndim
    if k:
        n = arr.shape[0]
    elif n is None:
        raise ValueError("from_dense needs n for a 0-form")
    if k == 0:
        return ExteriorForm(n, 0, {(): float(arr)})
    out = {}
    for key in itertools.combinations(range(n), k):
        val = float(arr[key])
        if abs(val) > atol:
            out[tuple(i + 1 for i in key)] = val
    return ExteriorForm(n, k, out)


def random_form(n: int, k: int, rng: np.random.Generator, density: float = 1.0) -> ExteriorForm:
    """Random k-form with standard normal coefficients on a random subset of monomials."""
    out = {}
    for key in itertools.combinations(range(1, n + 1), k):
        if density >= 1.0 or rng.random() < density:
            out[key] = float(rng.standard_normal())
    return ExteriorForm(n, k, out)
