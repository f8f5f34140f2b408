import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from spintorsion.clifford_forms import (
    ExteriorForm,
    basis,
    dense,
    from_dense,
    from_terms,
    interior,
    norm_sq,
    random_form,
    scalar,
    sigma_T,
    vector,
    vector_valued_torsion,
    wedge,
    zero,
)

SASAKI = from_terms(5, [((1, 2, 5), 2.0), ((3, 4, 5), 2.0)])


# -- independent dense oracles ------------------------------------------------

def _perm_sign(p):
    inv = sum(1 for a, b in itertools.combinations(range(len(p)), 2) if p[a] > p[b])
    return -1 if inv % 2 else 1


def _alt(arr):
    k = arr.ndim
    out = np.zeros_like(arr)
    for p in itertools.permutations(range(k)):
        out += _perm_sign(p) * np.transpose(arr, p)
    return out / math.factorial(k)


def dense_wedge(a, b, ka, kb):
    """Alt(a⊗b) scaled so that e_i ∧ e_j has component 1 at (i, j)."""
    prod = np.multiply.outer(a, b) if ka and kb else a * b
    if not (ka and kb):
        return prod
    return math.factorial(ka + kb) / (math.factorial(ka) * math.factorial(kb)) * _alt(prod)


def dense_interior(x, a):
    return np.tensordot(x, a, axes=([0], [0]))


# -- strategies ---------------------------------------------------------------

@st.composite
def forms(draw, n=None, k=None):
    n = draw(st.integers(4, 9)) if n is None else n
    k = draw(st.integers(0, 4)) if k is None else k
    seed = draw(st.integers(0, 2**32 - 1))
    return random_form(n, k, np.random.default_rng(seed), density=0.6)


@st.composite
def form_triples(draw):
    n = draw(st.integers(4, 9))
    ks = draw(st.lists(st.integers(0, 3), min_size=3, max_size=3))
    return tuple(draw(forms(n, k)) for k in ks)


@st.composite
def vectors_and_forms(draw):
    n = draw(st.integers(4, 9))
    x = np.array(draw(st.lists(st.floats(-3, 3), min_size=n, max_size=n)))
    a = draw(forms(n, draw(st.integers(1, 3))))
    b = draw(forms(n, draw(st.integers(1, 3))))
    return x, a, b


# -- construction and algebra -------------------------------------------------

def test_keys_normalised_with_sign():
    w = ExteriorForm(5, 2, {(2, 1): 3.0})
    assert w.coeffs == {(1, 2): -3.0}
    assert w[(2, 1)] == 3.0
    assert w[(1, 1)] == 0.0


def test_repeated_index_drops_term():
    assert ExteriorForm(4, 2, {(3, 3): 1.0}).is_zero()


@pytest.mark.parametrize("bad", [{(0, 1): 1.0}, {(1, 6): 1.0}, {(1,): 1.0}])
def test_bad_keys_rejected(bad):
    with pytest.raises(ValueError):
        ExteriorForm(5, 2, bad)


def test_grade_out_of_range():
    with pytest.raises(ValueError):
        ExteriorForm(3, 4)


def test_equality_ignores_explicit_zeros():
    assert ExteriorForm(4, 2, {(1, 2): 1.0, (3, 4): 0.0}) == basis(4, 1, 2)


def test_mismatched_addition_rejected():
    with pytest.raises(ValueError):
        basis(4, 1, 2) + basis(4, 1, 2, 3)
    with pytest.raises(ValueError):
        basis(4, 1) + basis(5, 1)


def test_immutable():
    w = basis(4, 1)
    with pytest.raises(AttributeError):
        w.n = 5
    with pytest.raises(TypeError):
        w.coeffs[(2,)] = 1.0


def test_wedge_examples():
    assert wedge(basis(5, 1), basis(5, 2)) == basis(5, 1, 2)
    a, b = 2 * basis(5, 1, 2), 2 * basis(5, 3, 4)
    assert (a ^ b) + (b ^ a) == 8 * basis(5, 1, 2, 3, 4)
    assert wedge(basis(5, 1), basis(5, 1)).is_zero()


def test_wedge_dimension_mismatch():
    with pytest.raises(ValueError):
        wedge(basis(4, 1), basis(5, 2))


def test_wedge_overflow_is_zero():
    w = wedge(basis(4, 1, 2, 3), basis(4, 2, 4))
    assert w.is_zero() and w.k == 4


def test_interior_examples():
    assert interior(5, SASAKI) == 2 * basis(5, 1, 2) + 2 * basis(5, 3, 4)
    assert interior(1, 2 * basis(5, 1, 2, 5)) == 2 * basis(5, 2, 5)
    assert interior(3, basis(5, 1, 2)).is_zero()
    z = interior(2, scalar(5, 3.0))
    assert z.k == 0 and z.is_zero()


def test_interior_index_errors():
    with pytest.raises(IndexError):
        interior(6, SASAKI)
    with pytest.raises(ValueError):
        interior(np.ones(4), SASAKI)


def test_norm_examples():
    assert norm_sq(SASAKI) == 8.0
    t = 0.37
    v42 = -math.sqrt(2 * t) * from_terms(5, [((1, 3, 5), 1.0), ((2, 4, 5), 1.0)])
    assert norm_sq(v42) == pytest.approx(4 * t, abs=1e-14)
    assert norm_sq(zero(5, 3)) == 0.0


def test_sigma_examples():
    assert sigma_T(SASAKI).allclose(4 * basis(5, 1, 2, 3, 4), 1e-14)
    rng = np.random.default_rng(3)
    assert sigma_T(random_form(4, 3, rng)).is_zero(1e-14)
    assert sigma_T(zero(6, 3)).is_zero()
    with pytest.raises(ValueError):
        sigma_T(basis(5, 1, 2))


def test_sasaki_dT_is_twice_sigma():
    # dη = 2(e12 + e34) for η = e5, and d(η∧dη) = dη∧dη
    deta = 2 * basis(5, 1, 2) + 2 * basis(5, 3, 4)
    assert (deta ^ basis(5, 5)) == SASAKI
    assert (deta ^ deta).allclose(2 * sigma_T(SASAKI), 1e-14)
    assert (deta ^ deta) == 8 * basis(5, 1, 2, 3, 4)


def test_vector_valued_torsion():
    t = 2 * basis(5, 1, 2, 5)
    np.testing.assert_array_equal(vector_valued_torsion(t, 1, 2), [0, 0, 0, 0, 2])
    np.testing.assert_array_equal(vector_valued_torsion(t, 1, 1), np.zeros(5))
    s = math.sqrt(2 * 0.3)
    v42 = -s * from_terms(5, [((1, 3, 5), 1.0), ((2, 4, 5), 1.0)])
    np.testing.assert_allclose(vector_valued_torsion(v42, 1, 3), [0, 0, 0, 0, -s])
    with pytest.raises(IndexError):
        vector_valued_torsion(t, 0, 1)


# -- properties ---------------------------------------------------------------

@given(st.data())
def test_wedge_matches_dense_oracle(data):
    n = data.draw(st.integers(4, 7))
    ka, kb = data.draw(st.integers(0, 3)), data.draw(st.integers(0, 3))
    a, b = data.draw(forms(n, ka)), data.draw(forms(n, kb))
    w = wedge(a, b)
    if ka + kb > n:
        assert w.is_zero()
        return
    np.testing.assert_allclose(dense(w), dense_wedge(dense(a), dense(b), ka, kb), atol=1e-10)


@given(vectors_and_forms())
def test_interior_matches_dense_oracle(case):
    x, a, _ = case
    np.testing.assert_allclose(dense(interior(x, a)), dense_interior(x, dense(a)), atol=1e-10)


@given(form_triples())
def test_graded_commutativity(triple):
    a, b, _ = triple
    assert (a ^ b).allclose((-1) ** (a.k * b.k) * (b ^ a), 1e-10)


@given(form_triples())
def test_associativity(triple):
    a, b, c = triple
    assert ((a ^ b) ^ c).allclose(a ^ (b ^ c), 1e-9)


@given(vectors_and_forms())
def test_interior_antiderivation(case):
    x, a, b = case
    assume(a.k + b.k <= a.n)
    lhs = interior(x, a ^ b)
    rhs = (interior(x, a) ^ b) + (-1) ** a.k * (a ^ interior(x, b))
    assert lhs.allclose(rhs, 1e-9)


@given(vectors_and_forms())
def test_double_interior_vanishes(case):
    x, a, _ = case
    assert interior(x, interior(x, a)).is_zero(1e-10)


@given(forms(k=3), st.floats(-5, 5))
def test_sigma_quadratic(t, c):
    assert sigma_T(c * t).allclose(c * c * sigma_T(t), 1e-9)


@given(forms())
def test_dense_round_trip(w):
    back = from_dense(dense(w), n=w.n)
    assert back.allclose(w, 1e-14)
    # ‖w‖² = (1/k!) Σ |w_{i1..ik}|² over all index tuples
    assert norm_sq(w) == pytest.approx(np.sum(dense(w) ** 2) / math.factorial(w.k), abs=1e-10)


def test_vector_and_scalar_constructors():
    v = vector([1.0, 0.0, -2.0])
    assert v.coeffs == {(1,): 1.0, (3,): -2.0}
    assert scalar(3, 2.5).coeffs == {(): 2.5}
    with pytest.raises(ValueError):
        from_terms(3, [])
