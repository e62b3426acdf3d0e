"""Command-line front end: ``vekua-bergman {kernel,reproduce,project,verify}``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, bergman as bg
from .config import ConfigError, ExperimentConfig
from .errors import (
    ConvergenceError,
    DomainError,
    DomainMismatchError,
    EvaluationRegionError,
    OrthonormalizationError,
    UncertifiedTargetError,
)
from .geometry import Domain
from .gridfn import CoefficientPair, GridFunction, dbar_residual, inner_product, norm, sample
from .tables import read_coefficients, read_grid_function, write_csv, write_grid_function, write_json
from .vekua import M_ESTIMATE_WARNING, coefficient_preset, contraction_estimate, exact_family

log = logging.getLogger("vekua_bergman")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_INVARIANT = 0, 2, 3, 4


class StageError(Exception):
    def __init__(self, stage, exc, code):
        super().__init__(f"[{stage}] {exc}")
        self.stage, self.code = stage, code


@dataclass
class Experiment:
    config: ExperimentConfig
    domain: Domain
    coeffs: CoefficientPair
    system: bg.OrthonormalSystem
    assembly: bg.KernelAssembly
    reps: list
    warnings: list = field(default_factory=list)


def _stage(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except ConvergenceError as exc:
        raise StageError(name, exc, EXIT_NUMERICAL) from exc
    except (ConfigError, DomainError, DomainMismatchError, EvaluationRegionError,
            UncertifiedTargetError, ValueError, OSError) as exc:
        raise StageError(name, exc, EXIT_CONFIG) from exc
    except OrthonormalizationError as exc:
        raise StageError(name, exc, EXIT_NUMERICAL) from exc


def build_coefficients(cfg: ExperimentConfig, domain: Domain) -> CoefficientPair:
    c = cfg.raw["coefficients"]
    if c["preset"] == "csv":
        return read_coefficients(c["path"], domain)
    params = {k: v for k, v in c.items() if k != "preset"}
    return coefficient_preset(c["preset"], domain, **params)


def build_experiment(cfg: ExperimentConfig) -> Experiment:
    domain = _stage("domain", cfg.build_domain)
    coeffs = _stage("coefficients", build_coefficients, cfg, domain)
    b, s = cfg.raw["basis"], cfg.raw["solver"]
    center = None if b["center"] is None else complex(*b["center"])
    system, reps = _stage(
        "basis", bg.build_system, domain, coeffs, b["N"], center, b["generator"],
        s["tol"], s["max_iter"], s["drop_tol"], True, cfg.raw["certify"]["lattice_h"],
        s["exclusion_factor"])
    warnings = []
    for rep in reps:
        for w in rep.warnings:
            if w not in warnings:
                warnings.append(w)
    if coeffs.M_is_estimate and not reps:
        warnings.append(M_ESTIMATE_WARNING.format(M=coeffs.M))
    return Experiment(cfg, domain, coeffs, system, bg.KernelAssembly(system), reps, warnings)


def _metric(value, tol, kind="max"):
    return {"value": float(value), "tolerance": float(tol), "pass": bool(value <= tol),
            "kind": kind}


def sup_over_norm(exp: Experiment) -> dict:
    """Empirical ``sup_K |phi_n| / ||phi_n||`` over nodes in the evaluation region.

    A diagnostic for the existence-only embedding constant; never asserted.
    """
    inside = exp.domain.in_evaluation_region(exp.domain.nodes)
    vals = exp.system.values
    norms = np.array([norm(GridFunction(exp.domain, v)) for v in vals])
    ratios = np.abs(vals[:, inside]).max(axis=1) / norms
    return {"per_member": ratios.tolist(), "max": float(ratios.max()),
            "tolerance": "report-only", "kind": "diagnostic"}


def _base_report(exp: Experiment, command: str) -> dict:
    q = contraction_estimate(exp.coeffs, exp.domain)
    return {
        "command": command,
        "tool_version": __version__,
        "config": exp.config.to_dict(),
        "warnings": list(exp.warnings),
        "truncation_N": exp.assembly.N,
        "basis": {
            "candidates": len(exp.system.candidates),
            "kept": exp.system.kept,
            "dropped": exp.system.dropped,
            "gram_defect": _metric(exp.system.gram_defect, 1e-10),
            "member_residuals": exp.system.residuals,
        },
        "contraction_q": q,
        "M": exp.coeffs.M,
        "M_is_estimate": exp.coeffs.M_is_estimate,
        "sup_over_norm": sup_over_norm(exp),
        "h": exp.domain.h,
        "exclusion_factor": exp.config.raw["solver"]["exclusion_factor"],
    }


def _is_analytic_disk(exp: Experiment) -> bool:
    return exp.config.is_analytic and exp.domain.kind == "disk"


def cmd_kernel(cfg: ExperimentConfig, out: Path) -> int:
    exp = build_experiment(cfg)
    pts = cfg.evaluation_points()
    K, L = _stage("kernel", bg.kernel_KL, exp.assembly, pts, pts)
    B0 = bg.kernel_matrix(exp.assembly, 0.0, pts, pts)
    report = _base_report(exp, "kernel")
    report["alpha_zero_max"] = _metric(np.abs(B0).max(), 0.0)

    header = ["zeta_re", "zeta_im", "z_re", "z_im", "K_re", "K_im", "L_re", "L_im", "N"]
    oracle = None
    if _is_analytic_disk(exp):
        c, R = exp.domain.params
        oracle = bg.classical_disk_kernel(pts[:, None], pts[None, :], R, c)
        header.append("oracle_delta")
        delta = np.abs(K - oracle)
        rho = float(np.abs(pts - c).max()) ** 2 / R ** 2
        tol = bg.disk_tail_bound(cfg.raw["basis"]["N"], rho) + 1e-10
        report["oracle_delta_max"] = _metric(delta.max(), tol)
    rows = []
    for i, zeta in enumerate(pts):
        for j, z in enumerate(pts):
            row = [zeta.real, zeta.imag, z.real, z.imag, K[i, j].real, K[i, j].imag,
                   L[i, j].real, L[i, j].imag, exp.assembly.N]
            if oracle is not None:
                row.append(abs(K[i, j] - oracle[i, j]))
            rows.append(row)
    write_csv(out / "kernel.csv", header, rows)
    report["symmetry"] = {k: _metric(v, 1e-12) for k, v in
                          bg.kernel_symmetry_report(exp.assembly, pts, exp.config.is_analytic).items()}
    write_json(out / "kernel_report.json", report)
    return EXIT_OK


def _polynomial(coefs):
    coefs = [complex(*c) if isinstance(c, (list, tuple)) else complex(c) for c in coefs]

    def W(z):
        out = np.zeros_like(np.asarray(z, dtype=complex))
        for c in reversed(coefs):
            out = out * z + c
        return out
    return W


def resolve_target(exp: Experiment):
    """``(evaluator, grid values, certified residual, label)`` of the target."""
    t = exp.config.raw.get("target") or {"kind": "member", "index": 0}
    kind = t.get("kind")
    tol = exp.config.raw["certify"]["target_tol"]
    if kind == "member":
        idx = int(t.get("index", 0))
        if not 0 <= idx < exp.system.N:
            raise ConfigError(f"target member index {idx} outside 0..{exp.system.N - 1}")
        return exp.system.member(idx), GridFunction(exp.domain, exp.system.values[idx]), \
            exp.system.residuals[idx], f"member {idx}"
    if kind == "polynomial":
        W = _polynomial(t.get("coefficients", [[0, 1], 0, 0, 1]))
        label = "polynomial"
    elif kind == "exact_family":
        fam = exact_family(t.get("family"), t.get("params", {}), exp.domain)
        W = fam.solutions[int(t.get("solution", 0))]
        coeffs = fam.coeffs
        label = f"exact_family {t.get('family')}"
        if (coeffs.name, coeffs.params) != (exp.coeffs.name, exp.coeffs.params):
            raise UncertifiedTargetError(
                f"target family coefficients {coeffs.name}{coeffs.params} do not match "
                f"configured {exp.coeffs.name}{exp.coeffs.params}")
    else:
        raise ConfigError(f"unknown target kind {kind!r}")
    if kind == "polynomial" and not exp.coeffs.is_zero:
        raise UncertifiedTargetError("polynomial targets need a = b = 0")
    res = dbar_residual(exp.coeffs, W, exp.domain, exp.config.raw["certify"]["lattice_h"])
    if not res <= tol:
        raise UncertifiedTargetError(
            f"target is not certified: residual {res:.3e} > {tol:.1e}")
    return W, sample(W, exp.domain), res, label


def _prefix_counts(exp: Experiment) -> list:
    """Number of members spanned by the candidates of degree <= n, for each n."""
    out = []
    kept = np.array(exp.system.kept)
    for n in range(exp.config.raw["basis"]["N"] + 1):
        m = int(np.sum(kept < 2 * (n + 1)))
        if m > 0:
            out.append((n, m))
    return out


def cmd_reproduce(cfg: ExperimentConfig, out: Path) -> int:
    exp = build_experiment(cfg)
    W, Wg, res, label = _stage("target", resolve_target, exp)
    pts = cfg.evaluation_points()
    integral, fourier = _stage("reproduce", bg.reproduce_routes, exp.assembly, Wg, pts)
    exact = np.asarray(W(pts))
    err = np.abs(integral - exact)
    rows = [[z.real, z.imag, e.real, e.imag, r.real, r.imag, d, exp.assembly.N]
            for z, e, r, d in zip(pts, exact, integral, err)]
    write_csv(out / "reproduce.csv",
              ["zeta_re", "zeta_im", "W_re", "W_im", "R_re", "R_im", "error", "N"], rows)
    report = _base_report(exp, "reproduce")
    tol = 1e-10 if label.startswith("member") else 1e-8
    report.update({
        "target": label,
        "target_residual": res,
        "max_error": _metric(err.max(), tol) if exp.config.is_analytic or label.startswith("member")
        else {"value": float(err.max()), "tolerance": "report-only: see refinement_series",
              "pass": None, "kind": "max"},
        "mean_error": float(err.mean()),
        "route_agreement": _metric(np.abs(integral - fourier).max(), 1e-11),
    })
    series = []
    for n, m in _prefix_counts(exp):
        sub = bg.KernelAssembly(exp.system, m)
        r_int, _ = bg.reproduce_routes(sub, Wg, pts)
        series.append({"degree": n, "members": m, "max_error": float(np.abs(r_int - exact).max())})
    report["refinement_series"] = series
    write_json(out / "reproduce_report.json", report)
    return EXIT_OK


def _project_input(exp: Experiment):
    p = exp.config.raw.get("project") or {"preset": "zbar"}
    if "input" in p:
        return read_grid_function(p["input"], exp.domain), None, f"file {p['input']}"
    preset = p.get("preset", "zbar")
    zbar = sample(np.conj, exp.domain)
    idx = int(p.get("index", 0))
    member = GridFunction(exp.domain, exp.system.values[idx]) if exp.system.N > idx else None
    if preset == "zbar":
        return zbar, (GridFunction.zeros(exp.domain) if _is_analytic_disk(exp) else None), "zbar"
    if preset == "member":
        return member, member, f"member {idx}"
    if preset == "member_plus_zbar":
        return member + zbar, (member if _is_analytic_disk(exp) else None), f"member {idx} + zbar"
    raise ConfigError(f"unknown project preset {preset!r}")


def projection_diagnostics(A: bg.KernelAssembly, phi: GridFunction, rng) -> dict:
    P = bg.project(A, phi)
    nphi = norm(phi)
    scale = nphi if nphi > 0 else 1.0
    PP = bg.project(A, P)
    psi = GridFunction(A.domain, rng.standard_normal(A.domain.size)
                       + 1j * rng.standard_normal(A.domain.size))
    Ppsi = bg.project(A, psi)
    sa = abs(inner_product(P, psi) - inner_product(phi, Ppsi)) / (scale * norm(psi))
    return {"P": P,
            "idempotence": _metric(norm(PP - P) / scale, 1e-10),
            "self_adjointness": _metric(sa, 1e-10)}


def cmd_project(cfg: ExperimentConfig, out: Path) -> int:
    exp = build_experiment(cfg)
    phi, expected, label = _stage("input", _project_input, exp)
    diag = projection_diagnostics(exp.assembly, phi, np.random.default_rng(cfg.raw["seed"]))
    P = diag.pop("P")
    write_grid_function(out / "projected.csv", P)
    report = _base_report(exp, "project")
    report.update({"input": label, "norm_input": norm(phi), "norm_projected": norm(P), **diag})
    if expected is not None:
        tol = 1e-9 if "zbar" in label and "member" in label else 1e-10
        report["distance_to_expected"] = _metric(norm(P - expected), tol)
    write_json(out / "project_report.json", report)
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig, out: Path) -> int:
    from .suite import run_suite

    exp = build_experiment(cfg)
    checks = run_suite(exp)
    report = _base_report(exp, "verify")
    report["checks"] = checks
    report["all_pass"] = all(c["pass"] for c in checks)
    write_json(out / "verify_report.json", report)
    for c in checks:
        log.info("%s %s: %.3e (tol %.1e)", "PASS" if c["pass"] else "FAIL",
                 c["name"], c["value"], c["tolerance"])
    return EXIT_OK if report["all_pass"] else EXIT_INVARIANT


COMMANDS = {"kernel": cmd_kernel, "reproduce": cmd_reproduce,
            "project": cmd_project, "verify": cmd_verify}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vekua-bergman", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="experiment config (JSON)")
    common.add_argument("--output", help="output directory (overrides output.dir)")
    common.add_argument("--truncation", type=int, help="override basis.N")
    common.add_argument("--quad-scale", type=float, help="multiply both quadrature orders")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = ExperimentConfig.load(args.config).with_overrides(args.truncation, args.quad_scale)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.output or cfg.raw["output"]["dir"])
    try:
        return COMMANDS[args.command](cfg, out)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
