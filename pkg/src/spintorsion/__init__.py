"""Spin geometry with skew torsion: Clifford identities, Dirac eigenvalue bounds,
Killing and twistor spinors with torsion on homogeneous models."""
from .clifford_forms import ExteriorForm, basis, from_terms, interior, norm_sq, sigma_T, wedge
from .spin_rep import SpinRep, TorsionDatum, act, build_spin_rep, identity_suite, split_eigenbundles
from .estimates import (
    BoundReport,
    ConnectionParams,
    ProductDatum,
    beta_tw,
    beta_univ,
    kappa_solutions,
    n6_relations,
    parallel_spinor_criteria,
    product_bound,
    riemannian_product_gap,
    scal_s,
)
from .homogeneous import ReductiveModel, build_sphere, build_stiefel_42, build_stiefel_52
from .verifier import (
    KillingCandidate,
    ResidualReport,
    integrability_endomorphism,
    killing_residual,
    sasaki_nonexistence_report,
    twistor_residual,
)

__version__ = "0.1.0"
