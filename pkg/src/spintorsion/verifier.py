"""Residual checks for Killing and twistor spinors with torsion.

All checks act on invariant spinors of a homogeneous model, where the
covariant derivative in direction Z_i is the matrix Λ̃^s(Z_i) on Δ_n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import estimates
from .clifford_forms import ExteriorForm, basis, interior, norm_sq, sigma_T, wedge
from .homogeneous import (
    ReductiveModel,
    _torsion,
    algebraic_dirac,
    invariant_spinors,
    isotropy_lifts,
    spinor_connection,
)
from .spin_rep import SpinRep, act, act_vector, build_spin_rep

LINEAR_TOL = 1e-9
QUADRATIC_TOL = 1e-8
DET_TOL = 1e-6


class NotInvariantError(ValueError):
    """The spinor is not fixed by the isotropy, so the algebraic check means nothing."""


@dataclass(frozen=True, eq=False)
class KillingCandidate:
    psi: np.ndarray
    kappa: float
    s: float
    mu: float | None = None

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=complex)
        if not np.any(np.abs(psi) > 0):
            raise ValueError("Killing candidate must be a nonzero spinor")
        object.__setattr__(self, "psi", psi)


@dataclass(frozen=True)
class ResidualReport:
    residuals: tuple[float, ...]
    tol: float

    @property
    def max(self) -> float:
        return max(self.residuals, default=0.0)

    @property
    def passed(self) -> bool:
        return self.max <= self.tol


def _check_invariant(model: ReductiveModel, rep: SpinRep, psi: np.ndarray, tol: float = 1e-9) -> None:
    scale = max(np.linalg.norm(psi), 1.0)
    for lift in isotropy_lifts(model, rep):
        r = np.linalg.norm(lift @ psi)
        if r > tol * scale:
            raise NotInvariantError(f"spinor is not isotropy invariant (|h·ψ| = {r:.3e})")


def _twistorial_s(n: int, s: float) -> None:
    target = estimates.twistor_parameter(n)
    if not math.isclose(s, target, rel_tol=1e-12, abs_tol=1e-12):
        raise ValueError(f"expected s = (n-1)/(4(n-3)) = {target}, got {s}")


def killing_residual(model: ReductiveModel, rep: SpinRep, T: ExteriorForm | None,
                     cand: KillingCandidate, tol: float = LINEAR_TOL) -> ResidualReport:
    """‖∇^s_{Z_i} ψ - κ Z_i·ψ‖ for each frame direction."""
    T = _torsion(model, T)
    _twistorial_s(model.n, cand.s)
    psi = cand.psi
    _check_invariant(model, rep, psi)
    if cand.mu is not None:
        if np.linalg.norm(act(rep, T) @ psi - cand.mu * psi) > 1e-8 * max(1.0, np.linalg.norm(psi)):
            raise ValueError(f"ψ is not in the T-eigenspace μ = {cand.mu}")
    lifts = spinor_connection(model, rep, cand.s, T)
    res = tuple(float(np.linalg.norm(l @ psi - cand.kappa * g @ psi)) for l, g in zip(lifts, rep.gammas))
    return ResidualReport(res, tol)


def twistor_residual(model: ReductiveModel, rep: SpinRep, T: ExteriorForm | None, psi: np.ndarray,
                     s: float, tol: float = LINEAR_TOL) -> ResidualReport:
    """‖∇^c_{Z_i} ψ + (1/n) Z_i·D̸ψ + λ (Z_i∧T)·ψ‖ for each direction."""
    T = _torsion(model, T)
    n = model.n
    _twistorial_s(n, s)
    psi = np.asarray(psi, dtype=complex)
    _check_invariant(model, rep, psi)
    lam = estimates.lambda_param(n)
    dpsi = algebraic_dirac(model, rep, s, T).dirac @ psi
    lifts = spinor_connection(model, rep, 0.25, T)
    res = []
    for i in range(n):
        wt = act(rep, wedge(basis(n, i + 1), T))
        r = lifts[i] @ psi + rep.gammas[i] @ dpsi / n + lam * wt @ psi
        res.append(float(np.linalg.norm(r)))
    return ResidualReport(tuple(res), tol)


def dirac_squared_rhs(n: int, scal: float, T: ExteriorForm, rep: SpinRep) -> np.ndarray:
    """[n/(4(n-1)) Scal + n(n-5)/(8(n-3)²) ‖T‖² + n(4-n)/(4(n-3)²) T²] as a matrix."""
    a, b, c = estimates.tw_coefficients(n)
    tm = act(rep, T)
    return (a * scal + b * norm_sq(T)) * rep.identity() + c * tm @ tm


def dirac_squared_check(model: ReductiveModel, rep: SpinRep, T: ExteriorForm | None, psi: np.ndarray,
                        scal: float | None = None) -> float:
    """‖D̸²ψ - RHS ψ‖ for a twistor spinor with torsion."""
    from .homogeneous import curvature

    T = _torsion(model, T)
    if scal is None:
        scal = curvature(model, 0.0, T).scal
    d = algebraic_dirac(model, rep, estimates.twistor_parameter(model.n), T).dirac
    psi = np.asarray(psi, dtype=complex)
    return float(np.linalg.norm(d @ d @ psi - dirac_squared_rhs(model.n, scal, T, rep) @ psi))


def commutator_check(model: ReductiveModel, rep: SpinRep, T: ExteriorForm | None, psi: np.ndarray) -> float:
    """‖[D̸T + (1 - 6/n) T D̸]ψ - [(5-n)/(n-3) T² - 2/(n-3) ‖T‖²]ψ‖."""
    T = _torsion(model, T)
    n = model.n
    d = algebraic_dirac(model, rep, estimates.twistor_parameter(n), T).dirac
    return commutator_residual(n, d, act(rep, T), norm_sq(T), psi)


def commutator_residual(n: int, dirac: np.ndarray, tm: np.ndarray, t_norm_sq: float, psi: np.ndarray) -> float:
    psi = np.asarray(psi, dtype=complex)
    lhs = dirac @ (tm @ psi) + (1 - 6 / n) * tm @ (dirac @ psi)
    rhs = (5 - n) / (n - 3) * tm @ (tm @ psi) - 2 / (n - 3) * t_norm_sq * psi
    return float(np.linalg.norm(lhs - rhs))


def integrability_endomorphism(n: int, T: ExteriorForm, ric_c: np.ndarray, kappa: float, X: int,
                               rep: SpinRep | None = None) -> np.ndarray:
    """M(X) = Ric^c(X)· - [ -16sκ (X⌟T) + 4(n-1)κ² X + (1-12λ²)(X⌟σ_T)
    + 2(2λ²+λ) Σ_k e_k (T(X,e_k)⌟T) ], X a 1-based frame index.

    Every Killing spinor with torsion lies in the kernel of M(X).
    """
    s = estimates.twistor_parameter(n)
    lam = estimates.lambda_param(n)
    rep = build_spin_rep(n) if rep is None else rep
    ric_c = np.asarray(ric_c, dtype=float)
    if ric_c.shape != (n, n):
        raise ValueError(f"Ric^c must be {n}x{n}")
    xT = interior(X, T)
    ex = np.zeros(n)
    ex[X - 1] = 1.0
    tail = np.zeros((rep.dim, rep.dim), dtype=complex)
    for k in range(n):
        # T(X, e_k, ·) = (X⌟T)(e_k, ·)
        v = np.array([xT[(k + 1, m)] for m in range(1, n + 1)])
        if np.any(v):
            tail += rep.gammas[k] @ act(rep, interior(v, T))
    rhs = (
        -16 * s * kappa * act(rep, xT)
        + 4 * (n - 1) * kappa ** 2 * act_vector(rep, ex)
        + (1 - 12 * lam ** 2) * act(rep, interior(X, sigma_T(T)))
        + 2 * (2 * lam ** 2 + lam) * tail
    )
    return act_vector(rep, ric_c[X - 1]) - rhs


def integrability_residual(model: ReductiveModel, rep: SpinRep, T: ExteriorForm | None,
                           psi: np.ndarray, kappa: float, ric_c: np.ndarray | None = None) -> ResidualReport:
    """‖M(Z_i) ψ‖ for every frame direction."""
    from .homogeneous import ricci_c

    T = _torsion(model, T)
    ric = ricci_c(model, T) if ric_c is None else ric_c
    psi = np.asarray(psi, dtype=complex)
    res = tuple(
        float(np.linalg.norm(integrability_endomorphism(model.n, T, ric, kappa, x, rep) @ psi))
        for x in range(1, model.n + 1)
    )
    return ResidualReport(res, QUADRATIC_TOL)


def ricci_c_from_riemannian(ric_g: np.ndarray, T: ExteriorForm) -> np.ndarray:
    """Ric^c = Ric^g - 1/4 S with S_ij = Σ T(e_i,e_k,e_l) T(e_j,e_k,e_l), valid when δT = 0."""
    from .clifford_forms import dense

    td = dense(T)
    return np.asarray(ric_g, dtype=float) - 0.25 * np.einsum("ikl,jkl->ij", td, td)


SASAKI_TORSION_TERMS = [((1, 2, 5), 2.0), ((3, 4, 5), 2.0)]
SASAKI_SCAL = 20.0


@dataclass(frozen=True)
class SasakiRow:
    mu: float
    kappa: float
    abs_det: float

    @property
    def nonzero(self) -> bool:
        return self.abs_det > DET_TOL


def sasaki_local_model() -> tuple[ExteriorForm, np.ndarray]:
    """Torsion and Ric^c of the 5-dim Einstein-Sasaki local model with Scal = 20."""
    from .clifford_forms import from_terms

    T = from_terms(5, SASAKI_TORSION_TERMS)
    ric_g = SASAKI_SCAL / 5 * np.eye(5)
    return T, ricci_c_from_riemannian(ric_g, T)


def sasaki_nonexistence_report(rep5: SpinRep | None = None, X: int = 1) -> list[SasakiRow]:
    """|det M(X)| for each admissible Killing number on each T-eigenbundle."""
    rep5 = build_spin_rep(5) if rep5 is None else rep5
    if rep5.n != 5:
        raise ValueError("the Sasaki test lives in dimension 5")
    T, ric = sasaki_local_model()
    rows = []
    for mu in (0.0, 4.0, -4.0):
        for kappa in sorted(estimates.kappa_solutions(5, SASAKI_SCAL, norm_sq(T), mu), key=abs):
            m = integrability_endomorphism(5, T, ric, kappa, X, rep5)
            rows.append(SasakiRow(mu, kappa, float(abs(np.linalg.det(m)))))
    return rows


def parallel_killing_rescale_check(model: ReductiveModel, rep: SpinRep, psi: np.ndarray,
                                   T: ExteriorForm | None = None, tol: float = 1e-10) -> ResidualReport:
    """A ∇^c-parallel spinor is Killing with κ = 0 for the torsion (n-3)/(n-1)·T."""
    T = _torsion(model, T)
    n = model.n
    psi = np.asarray(psi, dtype=complex)
    _check_invariant(model, rep, psi)
    lifts = spinor_connection(model, rep, 0.25, T)
    par = max(float(np.linalg.norm(l @ psi)) for l in lifts)
    if par > tol:
        raise ValueError(f"spinor is not ∇^c-parallel (max |∇^c ψ| = {par:.3e})")
    scaled = (n - 3) / (n - 1) * T
    cand = KillingCandidate(psi, 0.0, estimates.twistor_parameter(n))
    return killing_residual(model, rep, scaled, cand, tol=LINEAR_TOL)


def parallel_residual(model: ReductiveModel, rep: SpinRep, psi: np.ndarray,
                      T: ExteriorForm | None = None) -> ResidualReport:
    """‖∇^c_{Z_i} ψ‖ per direction."""
    lifts = spinor_connection(model, rep, 0.25, T)
    psi = np.asarray(psi, dtype=complex)
    return ResidualReport(tuple(float(np.linalg.norm(l @ psi)) for l in lifts), 1e-10)


def anticommutator_residual(model: ReductiveModel, rep: SpinRep, s: float,
                            T: ExteriorForm | None = None) -> float:
    """D^sT + TD^s - (dT + δT - 8sσ_T - 2𝒟^s), restricted to invariant spinors.

    δT is an invariant 2-form; on the models here it vanishes and is checked to do so.
    """
    from .homogeneous import divergence_torsion, invariant_exterior_derivative

    T = _torsion(model, T)
    dd = algebraic_dirac(model, rep, s, T)
    tm = act(rep, T)
    delta = divergence_torsion(model, T)
    if np.abs(delta).max(initial=0.0) > 1e-10:
        raise ValueError("δT ≠ 0 on this model")
    dT = act(rep, invariant_exterior_derivative(model, T))
    lhs = dd.D_s @ tm + tm @ dd.D_s
    rhs = dT - 8 * s * act(rep, sigma_T(T)) - 2 * dd.calD_s
    p = dd.space.basis
    return float(np.linalg.norm((lhs - rhs) @ p, 2))


def difference_of_squares_residual(model: ReductiveModel, rep: SpinRep, s: float,
                                   T: ExteriorForm | None = None) -> float:
    """(D^{s/3})² - (1/n)(D^s)² against both completed-square forms, on invariant spinors."""
    T = _torsion(model, T)
    n = model.n
    tm = act(rep, T)
    d_third = algebraic_dirac(model, rep, s / 3, T).D_s
    dd = algebraic_dirac(model, rep, s, T)
    d0 = algebraic_dirac(model, rep, 0.0, T).D_s
    lhs = d_third @ d_third - dd.D_s @ dd.D_s / n
    tail = 4 * s * s / (1 - n) * tm @ tm
    a = d0 + s * (n - 3) / (n - 1) * tm
    b = dd.D_s - 2 * s * n / (n - 1) * tm
    r1 = lhs - ((n - 1) / n * a @ a + tail)
    r2 = lhs - ((n - 1) / n * b @ b + tail)
    p = dd.space.basis
    return float(max(np.linalg.norm(r1 @ p, 2), np.linalg.norm(r2 @ p, 2)))


def dirac_from_killing(n: int, kappa: float, mu: float) -> float:
    """D̸ψ = -nκψ - n/(2(n-3)) Tψ for a Killing spinor in Σ_μ."""
    return -n * kappa - n * mu / (2 * (n - 3))
