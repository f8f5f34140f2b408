"""Closed-form eigenvalue bounds and scalar relations for Dirac operators with torsion.

Throughout, ``t_norm_sq`` is ‖T‖², ``mu`` an eigenvalue of the Clifford
action of T, and ``scal`` the (minimum of the) Riemannian scalar curvature.
The Dirac operator addressed by the bounds is D̸ = D^g + T/4.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .clifford_forms import ExteriorForm, norm_sq
from .spin_rep import build_spin_rep, split_eigenbundles


def _require_n(n: int) -> None:
    if n <= 3:
        raise ValueError(f"twistorial formulas need n >= 4, got n={n}")


def twistor_parameter(n: int) -> float:
    """s = (n-1)/(4(n-3)), the parameter of the twistor operator with torsion."""
    _require_n(n)
    return (n - 1) / (4 * (n - 3))


def lambda_param(n: int) -> float:
    """λ = 1/(2(n-3))."""
    _require_n(n)
    return 1 / (2 * (n - 3))


@dataclass(frozen=True)
class ConnectionParams:
    n: int
    s: float
    lam: float

    @classmethod
    def twistorial(cls, n: int) -> "ConnectionParams":
        return cls(n, twistor_parameter(n), lambda_param(n))


def scal_s(scal_g: float, s: float, t_norm_sq: float) -> float:
    return scal_g - 24 * s * s * t_norm_sq


def beta_univ(n: int, scal_min: float, t_norm_sq: float, mu: float) -> float:
    return scal_min / 4 + t_norm_sq / 8 - mu * mu / 4


def tw_coefficients(n: int) -> tuple[float, float, float]:
    """Coefficients of (Scal_min, ‖T‖², μ²) in the twistorial bound."""
    _require_n(n)
    return (
        n / (4 * (n - 1)),
        n * (n - 5) / (8 * (n - 3) ** 2),
        n * (4 - n) / (4 * (n - 3) ** 2),
    )


def beta_tw(n: int, scal_min: float, t_norm_sq: float, mu: float) -> float:
    a, b, c = tw_coefficients(n)
    return a * scal_min + b * t_norm_sq + c * mu * mu


def friedrich_bound(n: int, scal_min: float) -> float:
    # same grouping as the Scal term of beta_tw, so the T = 0 limit is exact
    return n / (4 * (n - 1)) * scal_min


@dataclass(frozen=True)
class BoundRow:
    mu: float
    multiplicity: int
    beta_univ: float
    beta_tw: float


@dataclass(frozen=True)
class BoundReport:
    rows: tuple[BoundRow, ...]
    beta_univ: float
    beta_tw: float
    max_mu_sq: float

    @property
    def tw_dominates(self) -> bool:
        return self.beta_tw > self.beta_univ

    @property
    def univ_dominates(self) -> bool:
        return self.beta_univ > self.beta_tw


def bound_report(n: int, scal_min: float, t_norm_sq: float,
                 spectrum: Sequence[tuple[float, int]]) -> BoundReport:
    """Per-μ and global universal/twistorial bounds for a list of (μ, multiplicity)."""
    rows = tuple(
        BoundRow(mu, mult, beta_univ(n, scal_min, t_norm_sq, mu), beta_tw(n, scal_min, t_norm_sq, mu))
        for mu, mult in spectrum
    )
    top = max(rows, key=lambda r: r.mu ** 2)
    return BoundReport(rows, top.beta_univ, top.beta_tw, top.mu ** 2)


def kappa_rhs(n: int, scal: float, t_norm_sq: float, mu: float) -> float:
    """Right-hand side of n[κ + μ/(2(n-3))]² = ... ."""
    _require_n(n)
    return (scal / (4 * (n - 1)) + (n - 5) * t_norm_sq / (8 * (n - 3) ** 2)
            - (n - 4) * mu * mu / (4 * (n - 3) ** 2))


def kappa_residual(n: int, scal: float, t_norm_sq: float, mu: float, kappa: float) -> float:
    return n * (kappa + mu / (2 * (n - 3))) ** 2 - kappa_rhs(n, scal, t_norm_sq, mu)


def kappa_solutions(n: int, scal: float, t_norm_sq: float, mu: float) -> list[float]:
    """Real Killing numbers allowed in Σ_μ, ascending; empty if none exist."""
    rhs = kappa_rhs(n, scal, t_norm_sq, mu)
    shift = -mu / (2 * (n - 3))
    if rhs < 0:
        return []
    root = math.sqrt(rhs / n)
    if root == 0.0:
        return [shift]
    return sorted([shift - root, shift + root])


@dataclass(frozen=True)
class ParallelSpinorCheck:
    relation_residual: float      # Scal - (2μ² - ‖T‖²/2)
    first_margin: float | None    # 2n‖T‖² + (n-9)μ²  (≥ 0 required)
    scal_margin: float | None     # 9(n-1)/(2(9-n)) ‖T‖² - Scal  (≥ 0 required)
    trivial: bool                 # n ≥ 9: inequalities carry no information
    relation_holds: bool
    inequalities_hold: bool
    equality: bool


def parallel_spinor_criteria(n: int, scal: float, t_norm_sq: float, mu: float,
                             tol: float = 1e-10) -> ParallelSpinorCheck:
    """Necessary conditions for a ∇^c-parallel spinor in Σ_μ."""
    rel = scal - (2 * mu * mu - t_norm_sq / 2)
    if n >= 9:
        return ParallelSpinorCheck(rel, None, None, True, abs(rel) <= tol, True, False)
    first = 2 * n * t_norm_sq + (n - 9) * mu * mu
    second = 9 * (n - 1) / (2 * (9 - n)) * t_norm_sq - scal
    holds = first >= -tol and second >= -tol
    eq = abs(first) <= tol and abs(second) <= tol
    return ParallelSpinorCheck(rel, first, second, False, abs(rel) <= tol, holds, eq)


@dataclass(frozen=True)
class N6Relations:
    dirac_eigenvalue: float
    kappa: float
    scal_g: float
    kappa_excluded: float


def n6_relations(mu: float, t_norm_sq: float) -> N6Relations:
    """Twistor spinors with torsion in Σ_μ on 6-manifolds (μ ≠ 0)."""
    if mu == 0:
        raise ValueError("μ = 0: a twistor spinor in Σ_0 forces T = 0 or ψ = 0")
    dirac = -(mu + 2 * t_norm_sq / mu) / 3
    kappa = (t_norm_sq / mu - mu) / 9
    scal = (10 / 3) * (4 * mu * mu / 9 + 13 * t_norm_sq / 36 + 4 * t_norm_sq ** 2 / (9 * mu * mu))
    kappa2 = -(t_norm_sq / mu + 2 * mu) / 9
    return N6Relations(dirac, kappa, scal, kappa2)


# -- products ----------------------------------------------------------------

@dataclass(frozen=True)
class Block:
    dim: int
    torsion: ExteriorForm
    mus: tuple[float, ...] = field(default=())

    @property
    def t_norm_sq(self) -> float:
        return norm_sq(self.torsion)

    def spectrum(self) -> tuple[float, ...]:
        if self.mus:
            return self.mus
        if self.dim < 3 or not self.torsion.items():
            return (0.0,)
        rep = build_spin_rep(self.dim)
        return tuple(b.mu for b in split_eigenbundles(rep, self.torsion))


@dataclass(frozen=True)
class ProductDatum:
    blocks: tuple[Block, ...]
    scal_g: float

    def __post_init__(self):
        dims = [b.dim for b in self.blocks]
        if dims != sorted(dims):
            raise ValueError(f"blocks must be sorted by ascending dimension, got {dims}")

    @property
    def n(self) -> int:
        return sum(b.dim for b in self.blocks)

    @property
    def t_norm_sq(self) -> float:
        return sum(b.t_norm_sq for b in self.blocks)

    def mu_sq_sums(self, tol: float = 1e-9) -> list[float]:
        """All eigenvalues of T² = Σ T_i²: sums of per-block μ_i² (deduplicated)."""
        per_block = [sorted({round(m * m / tol) * tol for m in b.spectrum()}) for b in self.blocks]
        sums = {round(sum(c) / tol) * tol for c in itertools.product(*per_block)}
        return sorted(sums)

    @property
    def max_mu_sq(self) -> float:
        return sum(max(m * m for m in b.spectrum()) for b in self.blocks)


def product_bound(p: ProductDatum) -> float:
    """Twistorial bound for reducible parallel torsion, using the largest block dimension."""
    nk = p.blocks[-1].dim
    _require_n(nk)
    return beta_tw(nk, p.scal_g, p.t_norm_sq, math.sqrt(p.max_mu_sq))


def riemannian_product_gap(lambda_total: float, lambdas: Sequence[float], dims: Sequence[int],
                           scal_min: float, tol: float = 1e-9) -> float:
    """λ - Σ λ_i/n_i - Scal_min/4, which is ≥ 0 for actual spectra."""
    if len(lambdas) != len(dims):
        raise ValueError("one partial eigenvalue per block is required")
    if any(d <= 0 for d in dims):
        raise ValueError("block dimensions must be positive")
    if abs(lambda_total - sum(lambdas)) > tol * max(1.0, abs(lambda_total)):
        raise ValueError(f"λ = {lambda_total} is not the sum of the partial eigenvalues {list(lambdas)}")
    return lambda_total - sum(l / d for l, d in zip(lambdas, dims)) - scal_min / 4


# -- quoted comparison formulas ----------------------------------------------

def deformation_bound_n4(c: float, t_norm_sq: float) -> float | None:
    """Deformation-method bound for n = 4 quoted from the literature, c = Scal_min/‖T‖²."""
    if c >= 1.5:
        return t_norm_sq / 4 * (c - 0.5)
    if c >= 1 / 6:
        return t_norm_sq / 16 * (math.sqrt(6 * c) - 1) ** 2
    return None


def deformation_bound_sasaki5(scal_min: float) -> float | None:
    """Deformation-method bound for 5-dimensional Sasaki manifolds, quoted from the literature."""
    threshold = 4 * (9 + 4 * math.sqrt(5))
    if -4 < scal_min <= threshold:
        return (1 + scal_min / 4) ** 2 / 16
    if scal_min >= threshold:
        return 5 * scal_min / 16
    return None


def w34_bound_coefficients() -> dict[str, float]:
    """n=6, μ² = 2‖T‖²: coefficient of ‖T‖² from the general formula versus the printed one."""
    a, b, c = tw_coefficients(6)
    return {"scal": a, "t_norm_sq_computed": b + 2 * c, "t_norm_sq_printed": -7 / 16}


def product_example_coefficients() -> dict[str, float]:
    """Two 5-dimensional blocks: plain 10-dim coefficients vs the product bound (n_k = 5)."""
    a10, b10, c10 = tw_coefficients(10)
    a5, b5, c5 = tw_coefficients(5)
    return {
        "plain_scal": a10, "plain_t_norm_sq": b10, "plain_mu_sq": c10,
        "product_scal": a5, "product_t_norm_sq": b5, "product_mu_sq": c5,
        "product_scal_printed": 5 / 4,
    }


def roots_agree(a: Sequence[float], b: Sequence[float], tol: float = 1e-12) -> bool:
    return len(a) == len(b) and bool(np.all(np.abs(np.sort(a) - np.sort(b)) <= tol))
