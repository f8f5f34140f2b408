import math

import numpy as np
import pytest

from spintorsion import estimates as est
from spintorsion import verifier as ver
from spintorsion.clifford_forms import ExteriorForm, from_terms, norm_sq
from spintorsion.homogeneous import (
    algebraic_dirac,
    build_stiefel_42,
    build_stiefel_52,
    curvature,
    invariant_spinors,
    ricci_c,
)
from spintorsion.spin_rep import act, act_vector, build_spin_rep

S5 = math.sqrt(5)


@pytest.fixture(scope="module")
def v42():
    m = build_stiefel_42(0.4)
    rep = build_spin_rep(5)
    return m, rep, invariant_spinors(m, rep)


@pytest.fixture(scope="module")
def v52():
    m = build_stiefel_52(42 / 49)
    rep = build_spin_rep(7)
    return m, rep, invariant_spinors(m, rep)


def _cand(psi, kappa, n, mu=None):
    return ver.KillingCandidate(psi, kappa, est.twistor_parameter(n), mu)


def test_v42_killing_spinors(v42):
    m, rep, sp = v42
    for j, sign in ((0, -1), (1, 1)):
        rep_ = ver.killing_residual(m, rep, None, _cand(sp.basis[:, j], sign * S5 / 10, 5, sp.mus[j]))
        assert rep_.passed and rep_.max <= 1e-9
        assert rep_.max == max(rep_.residuals)
        wrong = ver.killing_residual(m, rep, None, _cand(sp.basis[:, j], sign * 3 * S5 / 10, 5))
        assert not wrong.passed and wrong.max >= 0.1


def test_v42_roots_come_from_quadratic(v42):
    m, _, sp = v42
    scal = curvature(m, 0).scal
    for j, sign in ((0, -1), (1, 1)):
        roots = est.kappa_solutions(5, scal, norm_sq(m.torsion), sp.mus[j])
        assert min(roots, key=abs) == pytest.approx(sign * S5 / 10, abs=1e-12)


def test_v52_killing_spinors(v52):
    m, rep, sp = v52
    kappa = -math.sqrt(42) / 56
    for j in range(2):
        r = ver.killing_residual(m, rep, None, _cand(sp.basis[:, j], kappa, 7))
        assert r.passed
    other = [k for k in est.kappa_solutions(7, curvature(m, 0).scal, norm_sq(m.torsion), sp.mus[0])
             if abs(k - kappa) > 1e-6]
    assert len(other) == 1
    assert not ver.killing_residual(m, rep, None, _cand(sp.basis[:, 0], other[0], 7)).passed


def test_killing_implies_twistor_and_eigen(v42, v52):
    for (m, rep, sp), kappas in ((v42, (-S5 / 10, S5 / 10)), (v52, (-math.sqrt(42) / 56,) * 2)):
        n = m.n
        s = est.twistor_parameter(n)
        d = algebraic_dirac(m, rep, s).dirac
        for j, k in enumerate(kappas):
            psi = sp.basis[:, j]
            assert ver.killing_residual(m, rep, None, _cand(psi, k, n)).passed
            assert ver.twistor_residual(m, rep, None, psi, s).max <= 1e-9
            lam = ver.dirac_from_killing(n, k, sp.mus[j])
            assert np.linalg.norm(d @ psi - lam * psi) < 1e-8


def test_twistor_fails_at_normal_metric():
    m = build_stiefel_42(0.5)
    rep = build_spin_rep(5)
    sp = invariant_spinors(m, rep)
    for j in range(2):
        assert ver.twistor_residual(m, rep, None, sp.basis[:, j], 0.5).max > 1e-3


def test_dirac_squared(v42):
    m, rep, sp = v42
    d = algebraic_dirac(m, rep, 0.5).dirac
    for j in range(2):
        psi = sp.basis[:, j]
        assert ver.dirac_squared_check(m, rep, None, psi) <= 1e-8
        assert np.vdot(psi, d @ d @ psi).real == pytest.approx(1.25, abs=1e-12)


NK = from_terms(6, [((1, 3, 5), 1.0), ((1, 4, 6), -1.0), ((2, 3, 6), -1.0), ((2, 4, 5), -1.0)])


def test_dirac_squared_rhs_limits():
    rep = build_spin_rep(6)
    np.testing.assert_allclose(ver.dirac_squared_rhs(6, 30.0, ExteriorForm(6, 3), rep), 9.0 * rep.identity())
    # nearly Kähler type torsion, Scal = 30 and |T|² = 4: on Σ_{±4} the right side is |T|²
    rhs = ver.dirac_squared_rhs(6, 30.0, NK, rep)
    tm = act(rep, NK)
    vals, vecs = np.linalg.eigh(tm)
    for idx in (0, -1):
        assert abs(vals[idx]) == pytest.approx(4.0)
        psi = vecs[:, idx]
        np.testing.assert_allclose(rhs @ psi, norm_sq(NK) * psi, atol=1e-12)


def test_commutator(v42, v52):
    for m, rep, sp in (v42, v52):
        for j in range(2):
            assert ver.commutator_check(m, rep, None, sp.basis[:, j]) <= 1e-8


def test_commutator_n6_reduction(rng):
    # at n = 6 the T D̸ term drops: the residual only sees D̸Tψ + 1/3 (T² + 2|T|²)ψ
    rep = build_spin_rep(6)
    tm = act(rep, NK)
    d = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    psi = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    direct = np.linalg.norm(d @ tm @ psi + (tm @ tm @ psi + 2 * 4.0 * psi) / 3)
    assert ver.commutator_residual(6, d, tm, 4.0, psi) == pytest.approx(direct, rel=1e-12)
    assert ver.commutator_residual(6, np.zeros((8, 8)), np.zeros((8, 8)), 0.0, psi) == 0.0


def test_integrability_annihilates_killing_spinors(v42, v52):
    for (m, rep, sp), kappas in ((v42, (-S5 / 10, S5 / 10)), (v52, (-math.sqrt(42) / 56,) * 2)):
        for j, k in enumerate(kappas):
            r = ver.integrability_residual(m, rep, None, sp.basis[:, j], k)
            assert len(r.residuals) == m.n and r.max <= 1e-8


def test_integrability_riemannian_limit():
    n, scal = 5, 20.0
    kappa = math.sqrt(scal / (4 * n * (n - 1)))
    rep = build_spin_rep(n)
    for x in range(1, n + 1):
        m = ver.integrability_endomorphism(n, ExteriorForm(n, 3), scal / n * np.eye(n), kappa, x, rep)
        assert np.abs(m).max() < 1e-12


def test_integrability_wrong_roots_not_annihilated(v42):
    m, rep, sp = v42
    r = ver.integrability_residual(m, rep, None, sp.basis[:, 0], -3 * S5 / 10)
    assert r.max > 1e-3


def test_integrability_errors():
    with pytest.raises(ValueError):
        ver.integrability_endomorphism(3, ExteriorForm(3, 3), np.eye(3), 0.0, 1)
    with pytest.raises(ValueError):
        ver.integrability_endomorphism(5, ExteriorForm(5, 3), np.eye(4), 0.0, 1)


def test_ricci_c_correction_matches_curvature():
    for m in (build_stiefel_42(0.35), build_stiefel_52(1.2)):
        np.testing.assert_allclose(ver.ricci_c_from_riemannian(curvature(m, 0).ricci, m.torsion),
                                   ricci_c(m), atol=1e-12)
    T, ric = ver.sasaki_local_model()
    np.testing.assert_allclose(ric, np.diag([2, 2, 2, 2, 0.0]), atol=1e-14)


def test_sasaki_report():
    rows = ver.sasaki_nonexistence_report(build_spin_rep(5))
    assert len(rows) == 6
    expected = {0.0: [-0.5, 0.5], 4.0: [-1 - S5 / 10, -1 + S5 / 10], -4.0: [1 - S5 / 10, 1 + S5 / 10]}
    for mu, ks in expected.items():
        got = sorted(r.kappa for r in rows if r.mu == mu)
        np.testing.assert_allclose(got, ks, atol=1e-12)
        np.testing.assert_allclose(got, est.kappa_solutions(5, 20, 8, mu), atol=1e-15)
    assert all(r.nonzero for r in rows)
    # a looser cut-off does not change any verdict
    assert all(r.abs_det > 2 * ver.DET_TOL for r in rows)
    with pytest.raises(ValueError):
        ver.sasaki_nonexistence_report(build_spin_rep(6))


def test_sasaki_all_directions():
    T, ric = ver.sasaki_local_model()
    rep = build_spin_rep(5)
    for k in est.kappa_solutions(5, 20, 8, 4):
        dets = [abs(np.linalg.det(ver.integrability_endomorphism(5, T, ric, k, x, rep))) for x in range(1, 6)]
        assert min(dets) > 1e-6


def test_parallel_rescale():
    m = build_stiefel_42(0.5)
    rep = build_spin_rep(5)
    sp = invariant_spinors(m, rep)
    for j in range(2):
        assert ver.parallel_residual(m, rep, sp.basis[:, j]).passed
        assert ver.parallel_killing_rescale_check(m, rep, sp.basis[:, j]).passed
    m0 = build_stiefel_42(0.4)
    sp0 = invariant_spinors(m0, rep)
    with pytest.raises(ValueError):
        ver.parallel_killing_rescale_check(m0, rep, sp0.basis[:, 0])


def test_parallel_rescale_zero_torsion():
    m = build_stiefel_42(0.5)
    rep = build_spin_rep(5)
    sp = invariant_spinors(m, rep)
    zero = ExteriorForm(5, 3)
    # with T = 0 the spinor is not Levi-Civita parallel here, so the guard fires
    with pytest.raises(ValueError):
        ver.parallel_killing_rescale_check(m, rep, sp.basis[:, 0], zero)


def test_guards(v42):
    m, rep, sp = v42
    with pytest.raises(ValueError):
        ver.KillingCandidate(np.zeros(4), 0.1, 0.5)
    with pytest.raises(ValueError):
        ver.killing_residual(m, rep, None, ver.KillingCandidate(sp.basis[:, 0], 0.1, 0.25))
    with pytest.raises(ver.NotInvariantError):
        ver.killing_residual(m, rep, None, _cand(np.array([1, 0, 0, 0], complex), 0.1, 5))
    with pytest.raises(ValueError):
        ver.killing_residual(m, rep, None, _cand(sp.basis[:, 0], 0.1, 5, mu=0.0))


def test_operator_identities_on_invariant_space(rng):
    m, rep = build_stiefel_42(0.4), build_spin_rep(5)
    for s in rng.uniform(-1, 1, 5):
        assert ver.difference_of_squares_residual(m, rep, s) <= 1e-8
        assert ver.anticommutator_residual(m, rep, s) <= 1e-8


def test_vector_action_consistency():
    rep = build_spin_rep(5)
    np.testing.assert_allclose(act_vector(rep, np.eye(5)[2]), rep.gammas[2])
