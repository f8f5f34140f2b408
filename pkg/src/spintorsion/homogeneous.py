"""Reductive homogeneous spaces G/H ⊂ so(N) with diagonally deformed metrics.

Everything is evaluated at the origin in an orthonormal frame Z_1..Z_n of
m, so invariant tensors become constant arrays and invariant connections
become the map Λ: m → so(m) of Wang's theorem.

Conventions:
  * ``E_ij`` is the element of so(N) with E_ij(e_i) = e_j, E_ij(e_j) = -e_i.
  * ``lambdas[i][k, j] = <Λ(Z_i) Z_j, Z_k>`` (column j is the image of Z_j).
  * ``R[i, j, k, l] = <R(Z_i, Z_j) Z_k, Z_l>``, Ric(Y, Z) = Σ_m R(Z_m, Y, Z, Z_m).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .clifford_forms import ExteriorForm, dense, from_dense, from_terms, interior, norm_sq, sigma_T
from .spin_rep import SpinRep, act, spin_lift


class NonParallelTorsionError(ValueError):
    """The characteristic connection does not parallelise the torsion."""


def so_generator(N: int, i: int, j: int) -> np.ndarray:
    """E_ij ∈ so(N) (1-based), mapping e_i ↦ e_j and e_j ↦ -e_i."""
    m = np.zeros((N, N))
    m[j - 1, i - 1] = 1.0
    m[i - 1, j - 1] = -1.0
    return m


def _bracket(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


@dataclass(frozen=True, eq=False)
class ReductiveModel:
    """so(N) = h ⊕ m with m_basis orthonormal for the (deformed) metric."""

    name: str
    N: int
    h_basis: tuple[np.ndarray, ...]
    m_basis: tuple[np.ndarray, ...]
    t: float
    torsion: ExteriorForm | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return len(self.m_basis)

    @cached_property
    def _solver(self) -> np.ndarray:
        basis = np.array([b.ravel() for b in self.h_basis + self.m_basis]).T
        if np.linalg.matrix_rank(basis) != len(self.h_basis) + len(self.m_basis):
            raise ValueError("h_basis and m_basis are not linearly independent")
        return np.linalg.pinv(basis)

    def decompose(self, a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Coordinates of ``a`` along h_basis and m_basis."""
        c = self._solver @ np.asarray(a, dtype=float).ravel()
        return c[: len(self.h_basis)], c[len(self.h_basis):]

    @cached_property
    def structure(self) -> tuple[np.ndarray, np.ndarray]:
        """(c_h, c_m) with [Z_a, Z_b] = Σ c_h[a,b,p] H_p + Σ c_m[a,b,c] Z_c."""
        n, k = self.n, len(self.h_basis)
        c_h = np.zeros((n, n, k))
        c_m = np.zeros((n, n, n))
        for a in range(n):
            for b in range(n):
                c_h[a, b], c_m[a, b] = self.decompose(_bracket(self.m_basis[a], self.m_basis[b]))
        return c_h, c_m

    @cached_property
    def isotropy(self) -> np.ndarray:
        """ad(H_p)|_m in the Z frame, shape (dim h, n, n)."""
        out = np.zeros((len(self.h_basis), self.n, self.n))
        for p, hp in enumerate(self.h_basis):
            for j, zj in enumerate(self.m_basis):
                out[p][:, j] = self.decompose(_bracket(hp, zj))[1]
        return out

    def reductive_residual(self) -> float:
        """max |[h, m]_h| + |[h, h]_m| + asymmetry of ad(h)|_m (metric invariance)."""
        worst = 0.0
        for hp in self.h_basis:
            for zj in self.m_basis:
                worst = max(worst, np.abs(self.decompose(_bracket(hp, zj))[0]).max(initial=0.0))
            for hq in self.h_basis:
                worst = max(worst, np.abs(self.decompose(_bracket(hp, hq))[1]).max(initial=0.0))
        for a in self.isotropy:
            worst = max(worst, np.abs(a + a.T).max(initial=0.0))
        return float(worst)


def _model(name, N, h, m, t, torsion):
    return ReductiveModel(name, N, tuple(h), tuple(m), float(t), torsion)


def build_stiefel_42(t: float) -> ReductiveModel:
    """V_{4,2} = SO(4)/SO(2) with the Jensen metric of parameter t."""
    if t <= 0:
        raise ValueError(f"deformation parameter must be positive, got {t}")
    E = lambda i, j: so_generator(4, i, j)  # noqa: E731
    h = [E(3, 4)]
    m = [E(1, 3), E(1, 4), E(2, 3), E(2, 4), E(1, 2) / np.sqrt(2 * t)]
    c = -np.sqrt(2 * t)
    torsion = from_terms(5, [((1, 3, 5), c), ((2, 4, 5), c)])
    return _model("V42", 4, h, m, t, torsion)


def build_stiefel_52(t: float) -> ReductiveModel:
    """V_{5,2} = SO(5)/SO(3), Killing-form metric deformed by t along m_1 = R·E_45."""
    if t <= 0:
        raise ValueError(f"deformation parameter must be positive, got {t}")
    E = lambda i, j: so_generator(5, i, j)  # noqa: E731
    h = [E(1, 2), E(1, 3), E(2, 3)]
    m = [E(1, 4), E(2, 4), E(3, 4), E(1, 5), E(2, 5), E(3, 5), E(4, 5) / np.sqrt(t)]
    c = -np.sqrt(t)
    torsion = from_terms(7, [((1, 4, 7), c), ((2, 5, 7), c), ((3, 6, 7), c)])
    return _model("V52", 5, h, m, t, torsion)


def build_sphere(n: int) -> ReductiveModel:
    """Round S^n = SO(n+1)/SO(n) with the normal metric; torsion-free model."""
    N = n + 1
    h = [so_generator(N, i, j) for i, j in itertools.combinations(range(1, n + 1), 2)]
    m = [so_generator(N, i, N) for i in range(1, n + 1)]
    return _model(f"S{n}", N, h, m, 1.0, ExteriorForm(n, 3))


def _torsion(model: ReductiveModel, T: ExteriorForm | None) -> ExteriorForm:
    T = model.torsion if T is None else T
    if T is None:
        return ExteriorForm(model.n, 3)
    if T.n != model.n or T.k != 3:
        raise ValueError("torsion must be a 3-form on m")
    return T


@dataclass(frozen=True, eq=False)
class ConnectionMap:
    s: float
    lambdas: np.ndarray  # (n, n, n)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("i,ikj->kj", np.asarray(x, dtype=float), self.lambdas)


def levi_civita_map(model: ReductiveModel) -> ConnectionMap:
    """2<Λ(X)Y, Z> = <[X,Y]_m, Z> - <[Y,Z]_m, X> + <[Z,X]_m, Y>."""
    key = "lc"
    if key not in model._cache:
        _, c = model.structure
        lam = 0.5 * (
            np.einsum("ijk->ikj", c)
            - np.einsum("jki->ikj", c)
            + np.einsum("kij->ikj", c)
        )
        model._cache[key] = lam
    return ConnectionMap(0.0, model._cache[key])


def connection_family(model: ReductiveModel, s: float, T: ExteriorForm | None = None) -> ConnectionMap:
    """Λ^s(X) = Λ^g(X) + 2s T(X, ·, ·), i.e. ∇^s_X Y = ∇^g_X Y + 2s T(X, Y, -)."""
    T = _torsion(model, T)
    td = dense(T)
    # (T_X)_{mj} = T(X, e_j, e_m)
    return ConnectionMap(s, levi_civita_map(model).lambdas + 2 * s * np.transpose(td, (0, 2, 1)))


def torsion_of(model: ReductiveModel, conn: ConnectionMap) -> np.ndarray:
    """Torsion tensor Λ(X)Y - Λ(Y)X - [X,Y]_m as an array tor[x, y, m]."""
    _, c = model.structure
    lam = conn.lambdas
    return np.einsum("xmy->xym", lam) - np.einsum("ymx->xym", lam) - c


def _nabla_tensor(lam: np.ndarray, tensor: np.ndarray) -> np.ndarray:
    """(∇_X A)(...) for an invariant covariant tensor A, shape (n,) + A.shape."""
    n = lam.shape[0]
    k = tensor.ndim
    out = np.zeros((n,) + tensor.shape)
    for x in range(n):
        for slot in range(k):
            # -A(..., Λ(X)U, ...) in the given slot
            moved = np.tensordot(lam[x], tensor, axes=([0], [slot]))
            out[x] -= np.moveaxis(moved, 0, slot)
    return out


def covariant_derivative_torsion(model: ReductiveModel, s: float, T: ExteriorForm | None = None,
                                 tol: float = 1e-10) -> np.ndarray:
    """Residual (∇^s_X T)(U,V,W) - (2s - 1/2) σ_T(U,V,W,X), indexed [x, u, v, w].

    Raises NonParallelTorsionError if ∇^c T ≠ 0 (s = 1/4) to within ``tol``.
    """
    T = _torsion(model, T)
    td = dense(T)
    par = np.abs(_nabla_tensor(connection_family(model, 0.25, T).lambdas, td)).max(initial=0.0)
    if par > tol:
        raise NonParallelTorsionError(f"∇^c T = 0 fails on {model.name}: max |∇^c T| = {par:.3e}")
    nab = _nabla_tensor(connection_family(model, s, T).lambdas, td)
    sig = dense(sigma_T(T)) if model.n >= 4 else np.zeros((model.n,) * 4)
    return nab - (2 * s - 0.5) * np.transpose(sig, (3, 0, 1, 2))


@dataclass(frozen=True, eq=False)
class CurvatureData:
    s: float
    R: np.ndarray
    ricci: np.ndarray
    scal: float

    def ricci_vector(self, x: int) -> np.ndarray:
        """Ric(Z_x) as a vector (0-based index)."""
        return self.ricci[x]


def curvature_operators(model: ReductiveModel, conn: ConnectionMap) -> np.ndarray:
    """R(Z_i, Z_j) as endomorphisms of m: [Λ_i, Λ_j] - Λ([Z_i,Z_j]_m) - ad([Z_i,Z_j]_h)."""
    c_h, c_m = model.structure
    lam = conn.lambdas
    comm = np.einsum("iab,jbc->ijac", lam, lam) - np.einsum("jab,ibc->ijac", lam, lam)
    return comm - np.einsum("ijc,cab->ijab", c_m, lam) - np.einsum("ijp,pab->ijab", c_h, model.isotropy)


def curvature(model: ReductiveModel, s: float, T: ExteriorForm | None = None) -> CurvatureData:
    ops = curvature_operators(model, connection_family(model, s, T))
    R = np.einsum("ijlk->ijkl", ops)
    ricci = np.einsum("myzm->yz", R)
    return CurvatureData(float(s), R, ricci, float(np.trace(ricci)))


def bianchi_residual(model: ReductiveModel, s: float, T: ExteriorForm | None = None) -> float:
    """max |S_{X,Y,Z} R^s(X,Y,Z,V) - s(6 - 8s) σ_T(X,Y,Z,V)|."""
    T = _torsion(model, T)
    R = curvature(model, s, T).R
    cyc = R + np.einsum("yzxv->xyzv", R) + np.einsum("zxyv->xyzv", R)
    sig = dense(sigma_T(T))
    return float(np.abs(cyc - s * (6 - 8 * s) * sig).max())


def invariant_exterior_derivative(model: ReductiveModel, w: ExteriorForm) -> ExteriorForm:
    """d of an invariant form: dω(X_0..X_k) = Σ_{i<j} (-1)^{i+j} ω([X_i,X_j]_m, X_0, ^, ^, X_k)."""
    n, k = model.n, w.k
    _, c = model.structure
    wd = dense(w)
    out = {}
    for idx in itertools.combinations(range(n), k + 1):
        val = 0.0
        for a, b in itertools.combinations(range(k + 1), 2):
            rest = [idx[r] for r in range(k + 1) if r not in (a, b)]
            br = c[idx[a], idx[b]]
            val += (-1) ** (a + b) * float(np.tensordot(br, wd[(slice(None),) + tuple(rest)], axes=1)) \
                if k >= 1 else 0.0
        if val != 0.0:
            out[tuple(i + 1 for i in idx)] = val
    return ExteriorForm(n, k + 1, out)


def dual_one_form(model: ReductiveModel, x: int) -> ExteriorForm:
    """η = <Z_x, ·> as a 1-form (1-based x)."""
    return ExteriorForm(model.n, 1, {(x,): 1.0})


def divergence_torsion(model: ReductiveModel, T: ExteriorForm | None = None) -> np.ndarray:
    """δT = -Σ_i (∇^g_{e_i} T)(e_i, ·, ·) as a 2-form array."""
    T = _torsion(model, T)
    nab = _nabla_tensor(levi_civita_map(model).lambdas, dense(T))
    return -np.einsum("iiab->ab", nab)


# -- spinors -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class InvariantSpinorSpace:
    basis: np.ndarray  # (dim Δ, d) orthonormal columns
    mus: np.ndarray    # T-eigenvalue of each column

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def restrict(self, op: np.ndarray) -> np.ndarray:
        return self.basis.conj().T @ op @ self.basis


def isotropy_lifts(model: ReductiveModel, rep: SpinRep) -> list[np.ndarray]:
    return [spin_lift(rep, a) for a in model.isotropy]


def invariant_spinors(model: ReductiveModel, rep: SpinRep, T: ExteriorForm | None = None,
                      tol: float = 1e-10) -> InvariantSpinorSpace:
    """Kernel of the lifted isotropy action, in a basis of T-eigenvectors."""
    if rep.n != model.n:
        raise ValueError(f"rep dimension {rep.n} does not match model dimension {model.n}")
    lifts = isotropy_lifts(model, rep)
    if lifts:
        stacked = np.vstack(lifts)
        _, sv, vh = np.linalg.svd(stacked)
        rank = int(np.sum(sv > tol * max(1.0, sv[0] if sv.size else 1.0)))
        kernel = vh[rank:].conj().T
    else:
        kernel = np.eye(rep.dim, dtype=complex)
    T = _torsion(model, T)
    if kernel.shape[1] == 0:
        return InvariantSpinorSpace(kernel, np.zeros(0))
    tm = kernel.conj().T @ act(rep, T) @ kernel
    vals, vecs = np.linalg.eigh(0.5 * (tm + tm.conj().T))
    order = np.argsort(vals)[::-1]
    return InvariantSpinorSpace(kernel @ vecs[:, order], vals[order])


def spinor_connection(model: ReductiveModel, rep: SpinRep, s: float,
                      T: ExteriorForm | None = None) -> list[np.ndarray]:
    """Λ̃^s(Z_i): on invariant spinors ∇^s_{Z_i} ψ = Λ̃^s(Z_i) ψ."""
    lam = connection_family(model, s, T).lambdas
    return [spin_lift(rep, lam[i]) for i in range(model.n)]


def dirac_matrix(model: ReductiveModel, rep: SpinRep, s: float, T: ExteriorForm | None = None) -> np.ndarray:
    """D^s = Σ Z_i · Λ̃^s(Z_i) on invariant spinors (full Δ_n matrix)."""
    lifts = spinor_connection(model, rep, s, T)
    return sum(g @ l for g, l in zip(rep.gammas, lifts))


@dataclass(frozen=True, eq=False)
class DiracData:
    s: float
    D_s: np.ndarray        # D^s
    dirac: np.ndarray      # D̸ = D^0 + T/4
    calD_s: np.ndarray     # 𝒟^s = Σ (Z_i ⌟ T) · Λ̃^s(Z_i)
    space: InvariantSpinorSpace

    def on_space(self, op: np.ndarray) -> np.ndarray:
        return self.space.restrict(op)


def algebraic_dirac(model: ReductiveModel, rep: SpinRep, s: float, T: ExteriorForm | None = None,
                    space: InvariantSpinorSpace | None = None) -> DiracData:
    T = _torsion(model, T)
    space = invariant_spinors(model, rep, T) if space is None else space
    if space.dim == 0:
        raise ValueError(f"{model.name} has no invariant spinors")
    lifts = spinor_connection(model, rep, s, T)
    D_s = sum(g @ l for g, l in zip(rep.gammas, lifts))
    dirac = dirac_matrix(model, rep, 0.0, T) + 0.25 * act(rep, T)
    calD = sum(act(rep, interior(i + 1, T)) @ lifts[i] for i in range(model.n))
    return DiracData(float(s), D_s, dirac, calD, space)


def spinor_curvature(model: ReductiveModel, rep: SpinRep, s: float,
                     T: ExteriorForm | None = None) -> np.ndarray:
    """Spin lift of R^s(Z_i, Z_j), shape (n, n, dim, dim)."""
    ops = curvature_operators(model, connection_family(model, s, T))
    n = model.n
    out = np.zeros((n, n, rep.dim, rep.dim), dtype=complex)
    for i in range(n):
        for j in range(n):
            out[i, j] = spin_lift(rep, ops[i, j])
    return out


def ricci_c(model: ReductiveModel, T: ExteriorForm | None = None) -> np.ndarray:
    return curvature(model, 0.25, T).ricci


def torsion_norm_sq(model: ReductiveModel) -> float:
    return norm_sq(_torsion(model, None))


def form_from_array(arr: np.ndarray) -> ExteriorForm:
    return from_dense(arr, atol=1e-14)
