"""Command-line front end.

Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import estimates as est
from . import verifier as ver
from .clifford_forms import ExteriorForm, norm_sq, random_form
from .homogeneous import (
    algebraic_dirac,
    build_stiefel_42,
    build_stiefel_52,
    curvature,
    invariant_spinors,
    ricci_c,
)
from .spin_rep import IDENTITY_NAMES, MAX_DIM, act, build_spin_rep, identity_suite, split_eigenbundles

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SWEEP_HEADER = ["t", "lambda_known", "beta_univ", "beta_tw", "beta_univ_mu0", "beta_tw_mu0"]


class ConfigError(ValueError):
    pass


# -- config ------------------------------------------------------------------

@dataclass(frozen=True)
class GeometryConfig:
    n: int
    scal_g: float
    torsion: ExteriorForm
    blocks: tuple[tuple[int, int], ...] | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> "GeometryConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        for key in ("n", "scal_g", "torsion"):
            if key not in raw:
                raise ConfigError(f"missing field '{key}'")
        n = raw["n"]
        if not isinstance(n, int) or isinstance(n, bool) or not 1 <= n <= MAX_DIM:
            raise ConfigError(f"'n' must be an integer in 1..{MAX_DIM}, got {n!r}")
        scal = raw["scal_g"]
        if not isinstance(scal, (int, float)) or isinstance(scal, bool) or not math.isfinite(scal):
            raise ConfigError(f"'scal_g' must be a finite real, got {scal!r}")
        if not isinstance(raw["torsion"], list):
            raise ConfigError("'torsion' must be a list of {i, j, k, coeff}")
        coeffs: dict[tuple[int, int, int], float] = {}
        for pos, term in enumerate(raw["torsion"]):
            try:
                idx = (term["i"], term["j"], term["k"])
                c = term["coeff"]
            except (KeyError, TypeError):
                raise ConfigError(f"torsion[{pos}] needs keys i, j, k, coeff") from None
            if not all(isinstance(v, int) and not isinstance(v, bool) for v in idx):
                raise ConfigError(f"torsion[{pos}]: indices must be integers")
            if not 1 <= idx[0] < idx[1] < idx[2] <= n:
                raise ConfigError(f"torsion[{pos}]: indices {idx} must satisfy 1 <= i < j < k <= {n}")
            if not isinstance(c, (int, float)) or isinstance(c, bool) or not math.isfinite(c):
                raise ConfigError(f"torsion[{pos}]: coeff must be a finite real")
            coeffs[idx] = coeffs.get(idx, 0.0) + float(c)
        if n < 3 and coeffs:
            raise ConfigError("a nonzero 3-form needs n >= 3")
        torsion = ExteriorForm(n, 3, coeffs) if n >= 3 else None
        blocks = None
        if raw.get("blocks") is not None:
            blocks = _parse_blocks(raw["blocks"], n)
        return cls(n, float(scal), torsion, blocks)

    @classmethod
    def load(cls, path: str | Path) -> "GeometryConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from None
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(raw)


def _parse_blocks(raw, n: int) -> tuple[tuple[int, int], ...]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("'blocks' must be a non-empty list of [first, last] index ranges")
    out = []
    for pos, b in enumerate(raw):
        if (not isinstance(b, list) or len(b) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in b)):
            raise ConfigError(f"blocks[{pos}] must be [first, last]")
        if not 1 <= b[0] <= b[1] <= n:
            raise ConfigError(f"blocks[{pos}] = {b} out of range 1..{n}")
        out.append((b[0], b[1]))
    covered = sorted(i for a, b in out for i in range(a, b + 1))
    if covered != list(range(1, n + 1)):
        raise ConfigError("blocks must be disjoint and cover 1..n")
    return tuple(sorted(out))


def _kappa_text(roots: Sequence[float]) -> str:
    return ", ".join(f"{k:.12g}" for k in roots) if roots else "none"


# -- identities --------------------------------------------------------------

def cmd_identities(args) -> int:
    if not 4 <= args.n <= 9:
        print(f"error: identities supports 4 <= n <= 9, got {args.n}", file=sys.stderr)
        return EXIT_USAGE
    if args.trials < 1:
        print("error: --trials must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    rng = np.random.default_rng(args.seed)
    rep = build_spin_rep(args.n)
    worst = np.zeros(len(IDENTITY_NAMES))
    for _ in range(args.trials):
        t = random_form(args.n, 3, rng)
        x = rng.standard_normal(args.n)
        omega = random_form(args.n, int(rng.integers(0, args.n + 1)), rng)
        worst = np.maximum(worst, identity_suite(rep, t, x, omega))
    ok = bool(np.all(worst <= args.tol))
    print(f"n={args.n} trials={args.trials} seed={args.seed}")
    for name, r in zip(IDENTITY_NAMES, worst):
        print(f"  {'ok  ' if r <= args.tol else 'FAIL'} {r:.3e}  {name}")
    return EXIT_OK if ok else EXIT_FAIL


# -- bounds ------------------------------------------------------------------

def bounds_payload(cfg: GeometryConfig) -> dict:
    n = cfg.n
    if n <= 3:
        raise ConfigError(f"bounds need n >= 4, got n={n}")
    rep = build_spin_rep(n)
    tn2 = norm_sq(cfg.torsion)
    spectrum = [(b.mu, b.multiplicity) for b in split_eigenbundles(rep, cfg.torsion)]
    report = est.bound_report(n, cfg.scal_g, tn2, spectrum)
    rows = []
    for r in report.rows:
        rows.append({
            "mu": r.mu,
            "multiplicity": r.multiplicity,
            "beta_univ": r.beta_univ,
            "beta_tw": r.beta_tw,
            "kappa": est.kappa_solutions(n, cfg.scal_g, tn2, r.mu),
        })
    payload = {
        "n": n,
        "scal_g": cfg.scal_g,
        "t_norm_sq": tn2,
        "max_mu_sq": report.max_mu_sq,
        "beta_univ": report.beta_univ,
        "beta_tw": report.beta_tw,
        "dominant": "twistorial" if report.tw_dominates else ("universal" if report.univ_dominates else "equal"),
        "friedrich": est.friedrich_bound(n, cfg.scal_g),
        "rows": rows,
        "notes": [],
    }
    if n == 4 and tn2 > 0:
        payload["deformation_reference"] = est.deformation_bound_n4(cfg.scal_g / tn2, tn2)
    if n == 5:
        payload["deformation_reference"] = est.deformation_bound_sasaki5(cfg.scal_g)
    if n == 6 and tn2 > 0 and math.isclose(report.max_mu_sq, 2 * tn2, rel_tol=1e-9):
        c = est.w34_bound_coefficients()
        payload["notes"].append(
            f"‖T‖² coefficient with μ² = 2‖T‖²: computed {c['t_norm_sq_computed']:.6g}, "
            f"printed in the literature {c['t_norm_sq_printed']:.6g}")
    return payload


def _bounds_text(p: dict) -> str:
    out = io.StringIO()
    out.write(f"n={p['n']}  Scal={p['scal_g']:.12g}  |T|^2={p['t_norm_sq']:.12g}  max mu^2={p['max_mu_sq']:.12g}\n")
    out.write(f"{'mu':>14} {'mult':>5} {'beta_univ':>14} {'beta_tw':>14}  kappa\n")
    for r in p["rows"]:
        out.write(f"{r['mu']:>14.10g} {r['multiplicity']:>5d} {r['beta_univ']:>14.10g} "
                  f"{r['beta_tw']:>14.10g}  {_kappa_text(r['kappa'])}\n")
    out.write(f"global: beta_univ={p['beta_univ']:.12g} beta_tw={p['beta_tw']:.12g} ({p['dominant']})\n")
    out.write(f"friedrich (T=0): {p['friedrich']:.12g}\n")
    if p.get("deformation_reference") is not None:
        out.write(f"deformation reference: {p['deformation_reference']:.12g}\n")
    for note in p["notes"]:
        out.write(f"note: {note}\n")
    return out.getvalue()


def cmd_bounds(args) -> int:
    cfg = GeometryConfig.load(args.config)
    payload = bounds_payload(cfg)
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(_bounds_text(payload), end="")
    return EXIT_OK


# -- stiefel sweep -----------------------------------------------------------

BUILDERS = {"42": build_stiefel_42, "52": build_stiefel_52}


def stiefel_row(which: str, t: float) -> list[float]:
    """One sweep row, with Scal, ‖T‖² and max μ² read off the model itself."""
    model = BUILDERS[which](t)
    n = model.n
    scal = curvature(model, 0.0).scal
    tn2 = norm_sq(model.torsion)
    rep = build_spin_rep(n)
    mu_max = math.sqrt(max(b.mu ** 2 for b in split_eigenbundles(rep, model.torsion)))
    known = 1 / (2 * t) if which == "42" else 9 / (4 * t)
    return [
        t,
        known,
        est.beta_univ(n, scal, tn2, mu_max),
        est.beta_tw(n, scal, tn2, mu_max),
        est.beta_univ(n, scal, tn2, 0.0),
        est.beta_tw(n, scal, tn2, 0.0),
    ]


def sweep_grid(t_min: float, t_max: float, steps: int) -> np.ndarray:
    if not (0 < t_min <= t_max) or not math.isfinite(t_max):
        raise ConfigError(f"need 0 < t_min <= t_max, got [{t_min}, {t_max}]")
    if steps < 1:
        raise ConfigError("steps must be >= 1")
    if steps == 1:
        return np.array([t_min])
    return np.linspace(t_min, t_max, steps)


def write_sweep(which: str, grid: np.ndarray, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for t in grid:
        w.writerow(["%.12g" % v for v in stiefel_row(which, float(t))])


def cmd_stiefel(args) -> int:
    grid = sweep_grid(args.t_min, args.t_max, args.steps)
    if args.out == "-":
        write_sweep(args.which, grid, sys.stdout)
    else:
        try:
            with open(args.out, "w", newline="", encoding="utf-8") as fh:
                write_sweep(args.which, grid, fh)
        except OSError as exc:
            raise ConfigError(f"cannot write {args.out}: {exc}") from None
    return EXIT_OK


# -- verify ------------------------------------------------------------------

@dataclass(frozen=True)
class CandidateResult:
    spinor: int
    mu: float
    kappa: float
    killing: float
    twistor: float
    dirac_sq: float
    integrability: float

    @property
    def passed(self) -> bool:
        return (self.killing <= ver.LINEAR_TOL and self.twistor <= ver.LINEAR_TOL
                and self.dirac_sq <= ver.QUADRATIC_TOL and self.integrability <= ver.QUADRATIC_TOL)


def verify_model(which: str, t: float, kappas: Sequence[float] | None) -> list[CandidateResult]:
    """Test each κ (or, if ``kappas`` is None, every admissible root) on each invariant spinor."""
    model = BUILDERS[which](t)
    n = model.n
    rep = build_spin_rep(n)
    T = model.torsion
    space = invariant_spinors(model, rep)
    s = est.twistor_parameter(n)
    scal = curvature(model, 0.0).scal
    tn2 = norm_sq(T)
    ric = ricci_c(model)
    out = []
    for j in range(space.dim):
        psi = space.basis[:, j]
        mu = float(space.mus[j])
        tw = ver.twistor_residual(model, rep, T, psi, s).max
        dsq = ver.dirac_squared_check(model, rep, T, psi, scal)
        roots = est.kappa_solutions(n, scal, tn2, mu) if kappas is None else list(kappas)
        for kappa in roots:
            kil = ver.killing_residual(model, rep, T, ver.KillingCandidate(psi, kappa, s)).max
            integ = ver.integrability_residual(model, rep, T, psi, kappa, ric).max
            out.append(CandidateResult(j, mu, kappa, kil, tw, dsq, integ))
    return out


def cmd_verify(args) -> int:
    if args.t <= 0:
        raise ConfigError("t must be positive")
    if args.rescale_torsion:
        model = BUILDERS[args.which](args.t)
        rep = build_spin_rep(model.n)
        space = invariant_spinors(model, rep)
        kappas = args.kappa if args.kappa else [0.0]
        if any(k != 0.0 for k in kappas):
            raise ConfigError("--rescale-torsion checks κ = 0 only")
        ok = True
        for j in range(space.dim):
            try:
                r = ver.parallel_killing_rescale_check(model, rep, space.basis[:, j])
                line = f"spinor {j} mu={space.mus[j]:.10g} kappa=0 rescaled killing={r.max:.3e}"
                ok &= r.passed
                print(("PASS " if r.passed else "FAIL ") + line)
            except ValueError as exc:
                ok = False
                print(f"FAIL spinor {j}: {exc}")
        return EXIT_OK if ok else EXIT_FAIL
    if args.auto == bool(args.kappa):
        raise ConfigError("give either --auto or --kappa")
    results = verify_model(args.which, args.t, None if args.auto else args.kappa)
    print(f"V_{args.which[0]},{args.which[1]}  t={args.t:.12g}")
    for r in results:
        print(f"{'PASS' if r.passed else 'fail'} spinor {r.spinor} mu={r.mu:+.10g} kappa={r.kappa:+.12g} "
              f"killing={r.killing:.3e} twistor={r.twistor:.3e} dirac2={r.dirac_sq:.3e} "
              f"integrability={r.integrability:.3e}")
    if args.auto:
        ok = any(r.passed for r in results)
    else:
        ok = all(any(r.passed for r in results if r.kappa == k) for k in args.kappa)
    return EXIT_OK if ok else EXIT_FAIL


# -- sasaki ------------------------------------------------------------------

def cmd_sasaki_check(args) -> int:
    rows = ver.sasaki_nonexistence_report()
    print(f"{'mu':>5} {'kappa':>16} {'|det M(e1)|':>14}")
    for r in rows:
        print(f"{r.mu:>5.0f} {r.kappa:>16.12g} {r.abs_det:>14.6g}")
    ok = all(r.nonzero for r in rows)
    print("no Killing spinor with torsion" if ok else "integrability test inconclusive")
    return EXIT_OK if ok else EXIT_FAIL


# -- product -----------------------------------------------------------------

def split_blocks(cfg: GeometryConfig) -> list[tuple[tuple[int, int], ExteriorForm]]:
    """Per-block torsion on the full R^n; every term must live inside one block."""
    if cfg.blocks is None:
        raise ConfigError("product needs a 'blocks' field")
    parts = {b: {} for b in cfg.blocks}
    for key, val in cfg.torsion.items():
        home = [b for b in cfg.blocks if b[0] <= key[0] and key[-1] <= b[1]]
        if not home:
            raise ConfigError(f"torsion term e{key} straddles blocks: torsion does not split")
        parts[home[0]][key] = val
    return [(b, ExteriorForm(cfg.n, 3, parts[b])) for b in cfg.blocks]


def _localise(block: tuple[int, int], t: ExteriorForm) -> ExteriorForm:
    a, b = block
    dim = b - a + 1
    if dim < 3:
        return ExteriorForm(dim, dim)
    return ExteriorForm(dim, 3, {tuple(i - a + 1 for i in key): v for key, v in t.items()})


def product_payload(cfg: GeometryConfig) -> dict:
    parts = split_blocks(cfg)
    rep = build_spin_rep(cfg.n)
    mats = [act(rep, t) for _, t in parts]
    anti = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            anti = max(anti, float(np.linalg.norm(mats[i] @ mats[j] + mats[j] @ mats[i], 2)))
    total = act(rep, cfg.torsion)
    sq_split = float(np.linalg.norm(total @ total - sum(m @ m for m in mats), 2))
    blocks = []
    for blk, t in sorted(parts, key=lambda p: p[0][1] - p[0][0]):
        local = _localise(blk, t)
        mus = (0.0,) if local.k != 3 or not local.items() else None
        blocks.append(est.Block(blk[1] - blk[0] + 1, local, mus or ()))
    datum = est.ProductDatum(tuple(blocks), cfg.scal_g)
    nk = blocks[-1].dim
    if nk <= 3:
        raise ConfigError(f"largest block has dimension {nk}; the product bound needs n_k >= 4")
    sum_set = datum.mu_sq_sums()
    brute = sorted({round(v / 1e-9) * 1e-9 for v in np.linalg.eigvalsh(total @ total)})
    plain_mu = math.sqrt(datum.max_mu_sq)
    payload = {
        "n": cfg.n,
        "block_dims": [b.dim for b in blocks],
        "anticommutation_residual": anti,
        "square_split_residual": sq_split,
        "mu_sq_sums": sum_set,
        "mu_sq_brute_force": brute,
        "mu_sq_match": len(sum_set) == len(brute) and bool(np.allclose(sum_set, brute, atol=1e-8)),
        "t_norm_sq": datum.t_norm_sq,
        "max_mu_sq": datum.max_mu_sq,
        "product_bound": est.product_bound(datum),
        "coefficients_product": list(est.tw_coefficients(nk)),
        "notes": [],
    }
    if cfg.n >= 4:
        payload["plain_beta_tw"] = est.beta_tw(cfg.n, cfg.scal_g, datum.t_norm_sq, plain_mu)
        payload["coefficients_plain"] = list(est.tw_coefficients(cfg.n))
    if [b.dim for b in blocks] == [5, 5]:
        c = est.product_example_coefficients()
        payload["notes"].append(
            f"Scal coefficient for two 5-dim blocks: computed {c['product_scal']:.6g}, "
            f"printed in the literature {c['product_scal_printed']:.6g}")
    return payload


def cmd_product(args) -> int:
    cfg = GeometryConfig.load(args.config)
    p = product_payload(cfg)
    ok = p["anticommutation_residual"] <= 1e-10 and p["square_split_residual"] <= 1e-10 and p["mu_sq_match"]
    if args.format == "json":
        print(json.dumps(p, indent=2))
    else:
        print(f"blocks {p['block_dims']}  n={p['n']}")
        print(f"anticommutation residual {p['anticommutation_residual']:.3e}")
        print(f"T^2 - sum T_i^2 residual {p['square_split_residual']:.3e}")
        print(f"mu^2 spectrum {', '.join(f'{v:.10g}' for v in p['mu_sq_sums'])} "
              f"({'matches' if p['mu_sq_match'] else 'DIFFERS FROM'} brute force)")
        print(f"product bound {p['product_bound']:.12g}  (n_k coefficients "
              f"{', '.join(f'{c:.6g}' for c in p['coefficients_product'])})")
        if "plain_beta_tw" in p:
            print(f"plain beta_tw {p['plain_beta_tw']:.12g}  (n coefficients "
                  f"{', '.join(f'{c:.6g}' for c in p['coefficients_plain'])})")
        for note in p["notes"]:
            print(f"note: {note}")
    return EXIT_OK if ok else EXIT_FAIL


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spintorsion", description="Spinors and Dirac bounds with skew torsion.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("identities", help="check the Clifford identities on random torsions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_identities)

    p = sub.add_parser("bounds", help="universal and twistorial bounds for a JSON geometry")
    p.add_argument("config")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("stiefel", help="CSV sweep of bounds on the Stiefel models")
    p.add_argument("which", choices=sorted(BUILDERS))
    p.add_argument("t_min", type=float)
    p.add_argument("t_max", type=float)
    p.add_argument("steps", type=int)
    p.add_argument("out", help="output CSV path, or - for stdout")
    p.set_defaults(func=cmd_stiefel)

    p = sub.add_parser("verify", help="verify Killing and twistor spinors on a Stiefel model")
    p.add_argument("which", choices=sorted(BUILDERS))
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--kappa", type=float, nargs="+")
    p.add_argument("--auto", action="store_true")
    p.add_argument("--rescale-torsion", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sasaki-check", help="integrability determinants on the Einstein-Sasaki model")
    p.set_defaults(func=cmd_sasaki_check)

    p = sub.add_parser("product", help="block checks and product bound for split torsion")
    p.add_argument("config")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_product)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
