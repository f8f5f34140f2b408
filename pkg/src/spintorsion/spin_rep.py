"""Complex spin representations Δ_n and the Clifford action of forms.

Convention used everywhere in the package: e_i · e_i = -1, the Hermitian
inner product on Δ_n is ``np.vdot``, vectors act skew-adjointly and 3-forms
act self-adjointly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .clifford_forms import (
    ExteriorForm,
    interior,
    norm_sq,
    sigma_T,
    vector,
    vector_valued_torsion,
    wedge,
)

MAX_DIM = 12

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _kron(mats):
    return reduce(np.kron, mats, np.eye(1, dtype=complex))


@dataclass(frozen=True, eq=False)
class SpinRep:
    """Generators γ_1..γ_n of Cl(R^n) acting on Δ_n, dim Δ_n = 2^⌊n/2⌋."""

    n: int
    gammas: tuple[np.ndarray, ...]
    _blade_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.gammas[0].shape[0]

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def blade(self, idx: tuple[int, ...]) -> np.ndarray:
        """γ_{i1} ⋯ γ_{ik} for a 1-based index tuple."""
        mat = self._blade_cache.get(idx)
        if mat is None:
            mat = self.identity()
            for i in idx:
                mat = mat @ self.gammas[i - 1]
            mat.setflags(write=False)
            self._blade_cache[idx] = mat
        return mat

    def volume(self) -> np.ndarray:
        return self.blade(tuple(range(1, self.n + 1)))


def build_spin_rep(n: int) -> SpinRep:
    """Gamma matrices from Pauli tensor products.

    Hermitian generators Γ_{2a-1} = Z⊗..⊗Z⊗X⊗1.., Γ_{2a} = Z⊗..⊗Z⊗Y⊗1..,
    and for odd n the last one Γ_n = Z⊗..⊗Z. Then γ_i = iΓ_i.  For odd n the
    two inequivalent representations differ by γ → -γ; the one built here is
    fixed by Γ_n = +Z⊗..⊗Z.
    """
    if not 1 <= n <= MAX_DIM:
        raise ValueError(f"spin representation supported for 1 <= n <= {MAX_DIM}, got {n}")
    m = n // 2
    hermitian = []
    for a in range(m):
        left = [_Z] * a
        right = [_I2] * (m - a - 1)
        hermitian.append(_kron(left + [_X] + right))
        hermitian.append(_kron(left + [_Y] + right))
    if n % 2:
        hermitian.append(_kron([_Z] * m))
    gammas = tuple(1j * g for g in hermitian)
    for g in gammas:
        g.setflags(write=False)
    return SpinRep(n, gammas)


def act(rep: SpinRep, w: ExteriorForm) -> np.ndarray:
    """Clifford action of a form: e_{i1..ik} ↦ γ_{i1}⋯γ_{ik}, extended linearly."""
    if rep.n != w.n:
        raise ValueError(f"dimension mismatch: rep n={rep.n}, form n={w.n}")
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    for key, val in w.items():
        if val != 0.0:
            out += val * rep.blade(key)
    return out


def act_vector(rep: SpinRep, x: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.einsum("i,ijk->jk", x, np.asarray(rep.gammas))


def spin_lift(rep: SpinRep, a: np.ndarray) -> np.ndarray:
    """Lift of a skew matrix A ∈ so(n) to an endomorphism of Δ_n.

    Normalised so that [lift(A), X·] = (AX)· for every vector X, i.e. the lift
    is -1/2 Σ_{i<j} A_ij e_i e_j.  With A = 2s T(X, ·, ·) (as the matrix
    A_mj = 2s T(X, e_j, e_m)) this gives s (X ⌟ T).
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (rep.n, rep.n):
        raise ValueError(f"expected a {rep.n}x{rep.n} matrix, got {a.shape}")
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    for i in range(rep.n):
        for j in range(i + 1, rep.n):
            if a[i, j] != 0.0:
                out -= 0.5 * a[i, j] * rep.blade((i + 1, j + 1))
    return out


@dataclass(frozen=True, eq=False)
class EigenBundle:
    mu: float
    multiplicity: int
    projector: np.ndarray
    basis: np.ndarray  # columns: orthonormal eigenvectors


def split_eigenbundles(rep: SpinRep, t: ExteriorForm, cluster_tol: float = 1e-8) -> list[EigenBundle]:
    """Eigenbundles Σ_μ of the Clifford action of ``t``, μ descending."""
    return split_hermitian(act(rep, t), cluster_tol)


def split_hermitian(mat: np.ndarray, cluster_tol: float = 1e-8) -> list[EigenBundle]:
    vals, vecs = np.linalg.eigh(mat)
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    bundles = []
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[start] - vals[i] > cluster_tol:
            block = vecs[:, start:i]
            bundles.append(EigenBundle(
                mu=float(np.mean(vals[start:i])),
                multiplicity=i - start,
                projector=block @ block.conj().T,
                basis=block,
            ))
            start = i
    return bundles


@dataclass(frozen=True, eq=False)
class TorsionDatum:
    """(n, T, Scal^g) together with the derived spinorial data."""

    n: int
    torsion: ExteriorForm
    scal_g: float
    rep: SpinRep | None = None
    cluster_tol: float = 1e-8

    def __post_init__(self):
        if self.torsion.k != 3 or self.torsion.n != self.n:
            raise ValueError("torsion must be a 3-form on R^n")
        if self.rep is None:
            object.__setattr__(self, "rep", build_spin_rep(self.n))

    @property
    def t_norm_sq(self) -> float:
        return norm_sq(self.torsion)

    @property
    def sigma(self) -> ExteriorForm:
        return sigma_T(self.torsion)

    @property
    def eigenbundles(self) -> list[EigenBundle]:
        return split_eigenbundles(self.rep, self.torsion, self.cluster_tol)

    @property
    def mus(self) -> list[float]:
        return [b.mu for b in self.eigenbundles]

    @property
    def max_mu_sq(self) -> float:
        return max(b.mu ** 2 for b in self.eigenbundles)


def clifford_multiply(rep: SpinRep, phi: np.ndarray) -> np.ndarray:
    """m(φ) = Σ_k e_k · φ_k for φ given as an (n, dim) array of spinors."""
    phi = np.asarray(phi)
    return np.einsum("kab,kb->a", np.asarray(rep.gammas), phi)


def twistor_project(rep: SpinRep, phi: np.ndarray) -> np.ndarray:
    """p(φ)_k = φ_k + (1/n) e_k · m(φ): projection of T*⊗Σ onto ker m."""
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (rep.n, rep.dim):
        raise ValueError(f"expected φ of shape {(rep.n, rep.dim)}, got {phi.shape}")
    m = clifford_multiply(rep, phi)
    return phi + np.einsum("kab,b->ka", np.asarray(rep.gammas), m) / rep.n


def killing_vector(rep: SpinRep, psi: np.ndarray) -> np.ndarray:
    """X_ψ = Σ_j i⟨ψ, e_j·ψ⟩ e_j, real because γ_j is skew-Hermitian."""
    psi = np.asarray(psi, dtype=complex)
    comps = np.array([1j * np.vdot(psi, g @ psi) for g in rep.gammas])
    return comps.real


def _opnorm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2)) if m.size else 0.0


IDENTITY_NAMES = (
    "(1) X·T = X∧T − X⌟T, T·X = −X∧T − X⌟T",
    "(2) X·ω − (−1)^k ω·X = −2 X⌟ω",
    "(3) ⟨Tψ, φ⟩ = ⟨ψ, Tφ⟩",
    "(4) Σ (e_i⌟T)e_i = Σ e_i(e_i⌟T) = 3T",
    "(5) Σ (e_i⌟T)(e_i⌟T) = 2σ_T − 3‖T‖²",
    "(6) T² = −2σ_T + ‖T‖²",
    "(7) Σ e_i(e_i∧T) = (3−n)T",
    "(8) Σ T(X,e_j) e_j = −2 X⌟T",
)


def identity_suite(rep: SpinRep, t: ExteriorForm, x: Sequence[float],
                   omega: ExteriorForm | None = None) -> list[float]:
    """Operator-norm residuals of the eight standard Clifford identities for (T, X).

    ``omega`` is the k-form used in the general version of identity (2);
    it defaults to T itself.
    """
    n = rep.n
    if t.n != n or t.k != 3:
        raise ValueError("t must be a 3-form on R^n")
    x = np.asarray(x, dtype=float)
    X = vector(x) if np.any(x) else ExteriorForm(n, 1)
    Xm = act_vector(rep, x)
    Tm = act(rep, t)
    ident = rep.identity()
    tn2 = norm_sq(t)
    sig = act(rep, sigma_T(t))
    xT = act(rep, interior(x, t))
    xwT = act(rep, wedge(X, t))
    res = []

    res.append(max(_opnorm(Xm @ Tm - (xwT - xT)), _opnorm(Tm @ Xm - (-xwT - xT))))

    omega = t if omega is None else omega
    Om = act(rep, omega)
    res.append(_opnorm(Xm @ Om - (-1) ** omega.k * Om @ Xm + 2 * act(rep, interior(x, omega))))

    res.append(_opnorm(Tm - Tm.conj().T))

    s4a = sum(act(rep, interior(i, t)) @ rep.gammas[i - 1] for i in range(1, n + 1))
    s4b = sum(rep.gammas[i - 1] @ act(rep, interior(i, t)) for i in range(1, n + 1))
    res.append(max(_opnorm(s4a - 3 * Tm), _opnorm(s4b - 3 * Tm)))

    s5 = sum(act(rep, interior(i, t)) @ act(rep, interior(i, t)) for i in range(1, n + 1))
    res.append(_opnorm(s5 - (2 * sig - 3 * tn2 * ident)))

    res.append(_opnorm(Tm @ Tm - (-2 * sig + tn2 * ident)))

    s7 = sum(rep.gammas[i - 1] @ act(rep, wedge(vector(np.eye(n)[i - 1]), t)) for i in range(1, n + 1))
    res.append(_opnorm(s7 - (3 - n) * Tm))

    s8 = np.zeros_like(Tm)
    for j in range(1, n + 1):
        txj = sum(x[i - 1] * vector_valued_torsion(t, i, j) for i in range(1, n + 1))
        s8 = s8 + act_vector(rep, txj) @ rep.gammas[j - 1]
    res.append(_opnorm(s8 + 2 * xT))
    return res
