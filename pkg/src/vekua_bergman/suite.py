"""Invariant suite behind ``vekua-bergman verify``.

Each check returns ``{"name", "value", "tolerance", "pass"}`` plus an
optional ``note``.  Checks are cheap enough to run on the default
configuration in a few seconds.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import bergman as bg
from .gridfn import GridFunction, inner_product, norm, sample
from .teodorescu import (
    DENSITY_PRESETS,
    TeodorescuEvaluator,
    exact_T_of_one,
    preset_evaluator,
    sup_bound_constant,
)
from .vekua import NONCONTRACTION_WARNING, contraction_estimate, similarity_parts


def check(name, value, tolerance, note=None, passed=None):
    value = float(value)
    ok = bool(value <= tolerance) if passed is None else bool(passed)
    out = {"name": name, "value": value, "tolerance": float(tolerance), "pass": ok}
    if note:
        out["note"] = note
    return out


def _double_factorial(n):
    return 1 if n <= 0 else n * _double_factorial(n - 2)


def monomial_integral(domain, p, q) -> float:
    """Exact integral of ``(x - cx)^p (y - cy)^q`` over the domain, about its center."""
    if domain.kind == "disk":
        if p % 2 or q % 2:
            return 0.0
        R = domain.params[1]
        # int_0^{2pi} cos^p sin^q = 2pi (p-1)!!(q-1)!!/(p+q)!!
        ang = Fraction(_double_factorial(p - 1) * _double_factorial(q - 1),
                       _double_factorial(p + q))
        return float(2 * ang / (p + q + 2)) * np.pi * R ** (p + q + 2)
    lo, hi = domain.params
    hx, hy = 0.5 * (hi.real - lo.real), 0.5 * (hi.imag - lo.imag)

    def one_d(k, half):
        return 0.0 if k % 2 else 2.0 * half ** (k + 1) / (k + 1)
    return one_d(p, hx) * one_d(q, hy)


def exactness_degree(domain) -> int:
    if domain.kind == "disk":
        nr, nt = domain.orders
        return min(2 * nr - 1, nt - 1)
    return 2 * min(domain.orders) - 1


def quadrature_checks(domain):
    out = [check("quadrature.area", abs(domain.weights.sum() - domain.area) / domain.area, 1e-12)]
    deg = min(exactness_degree(domain), 12)
    c = domain.center
    x, y = (domain.nodes - c).real, (domain.nodes - c).imag
    worst = 0.0
    for p in range(deg + 1):
        for q in range(deg + 1 - p):
            exact = monomial_integral(domain, p, q)
            got = float(np.sum(domain.weights * x ** p * y ** q))
            scale = max(abs(exact), domain.area * (0.5 * domain.diameter) ** (p + q))
            worst = max(worst, abs(got - exact) / scale)
    out.append(check("quadrature.monomials", worst, 1e-12, note=f"p+q <= {deg}"))
    out.append(check("quadrature.weights_positive", 0.0, 0.0,
                     passed=bool(np.all(domain.weights > 0))))
    return out


def sample_points(domain, count, rng):
    """``count`` random points in the evaluation region (rejection sampling)."""
    c, half = domain.center, 0.5 * domain.diameter
    pts = []
    while len(pts) < count:
        z = c + half * complex(*rng.uniform(-1, 1, 2))
        if domain.in_evaluation_region(z):
            pts.append(z)
    return np.array(pts)


def run_suite(exp) -> list:
    cfg, domain, A = exp.config, exp.domain, exp.assembly
    rng = np.random.default_rng(cfg.raw["seed"])
    analytic = cfg.is_analytic
    checks = quadrature_checks(domain)

    checks.append(check("basis.gram_defect", exp.system.gram_defect, 1e-10))
    res = [r for r in exp.system.residuals if r is not None]
    if analytic:
        checks.append(check("basis.member_residual", max(res), cfg.raw["certify"]["target_tol"],
                            note="finite-difference truncation scale"))

    pts = sample_points(domain, 5, rng)
    pairs = np.concatenate([pts, cfg.evaluation_points()[:5]])
    pairs = pairs[domain.in_evaluation_region(pairs)]
    for name, v in bg.kernel_symmetry_report(A, pairs, analytic).items():
        checks.append(check(f"symmetry.{name}", v, 1e-12))

    zetas = sample_points(domain, 6, rng)
    member_vals = A.at(zetas)
    worst = route = 0.0
    for n in range(A.N):
        W = GridFunction(domain, A.values[n])
        integral, fourier = bg.reproduce_routes(A, W, zetas)
        worst = max(worst, float(np.abs(integral - member_vals[n]).max()))
        route = max(route, float(np.abs(integral - fourier).max()))
    checks.append(check("reproduce.span_members", worst, 1e-10))
    checks.append(check("reproduce.route_agreement", route, 1e-11))

    phi = GridFunction(domain, rng.standard_normal(domain.size) + 1j * rng.standard_normal(domain.size))
    psi = GridFunction(domain, rng.standard_normal(domain.size) + 1j * rng.standard_normal(domain.size))
    P, Ppsi = bg.project(A, phi), bg.project(A, psi)
    checks.append(check("project.idempotence", norm(bg.project(A, P) - P) / norm(phi), 1e-10))
    checks.append(check("project.self_adjoint",
                        abs(inner_product(P, psi) - inner_product(phi, Ppsi)) / (norm(phi) * norm(psi)),
                        1e-10))
    member = GridFunction(domain, A.values[0])
    checks.append(check("project.span_identity", norm(bg.project(A, member) - member), 1e-10))

    if analytic and domain.kind == "disk":
        c, R = domain.params
        grid = cfg.evaluation_points()
        K, _ = bg.kernel_KL(A, grid, grid)
        delta = float(np.abs(K - bg.classical_disk_kernel(grid[:, None], grid[None, :], R, c)).max())
        rho = float(np.abs(grid - c).max()) ** 2 / R ** 2
        checks.append(check("oracle.classical_disk", delta,
                            bg.disk_tail_bound(cfg.raw["basis"]["N"], rho) + 1e-10))
        zbar = sample(lambda z: np.conj(z - c), domain)
        checks.append(check("project.zbar_annihilated", norm(bg.project(A, zbar)), 1e-10))

    if domain.kind == "disk":
        t1 = preset_evaluator("one", domain, cfg.raw["solver"]["exclusion_factor"])
        pts = np.concatenate([sample_points(domain, 50, rng),
                              domain.center + 1.5 * (0.5 * domain.diameter) * np.array([1, 1j, -1])])
        C = float(np.abs(t1(pts) - exact_T_of_one(domain, pts)).max()) / domain.h
        checks.append(check("teodorescu.T1_anchor_C", C, 1.0,
                            note=f"max |T1 - exact| / h with h = {domain.h:.6g}, "
                                 f"eps = {t1.exclusion_factor}"))

    k1 = sup_bound_constant(domain)
    ext = domain.center + 1.5 * domain.diameter
    worst = -np.inf
    for name, f in DENSITY_PRESETS.items():
        dens = sample(f, domain)
        t = TeodorescuEvaluator(domain, dens, cfg.raw["solver"]["exclusion_factor"])
        vals = t(np.concatenate([domain.nodes[::7], [ext]]))
        worst = max(worst, float(np.abs(vals).max() - k1 * np.abs(dens.values).max()))
    checks.append(check("teodorescu.sup_bound_excess", worst, 1e-10,
                        note="max |T phi| - k1 sup|phi| over presets"))

    if not analytic:
        q = contraction_estimate(exp.coeffs, domain)
        if q < 1:
            ratio = max((max(r.update_ratios[1:], default=0.0) for r in exp.reps), default=0.0)
            checks.append(check("solver.contraction_ratio", ratio, q + 0.1))
        else:
            present = any(w.startswith(NONCONTRACTION_WARNING.split(":")[0]) for w in exp.warnings)
            checks.append(check("solver.noncontraction_warning", 0.0, 0.0, passed=present,
                                note=f"q = {q:.6g}"))
        slack = 0.0
        for rep in exp.reps:
            sp = similarity_parts(exp.coeffs, rep, domain,
                                  exclusion_factor=cfg.raw["solver"]["exclusion_factor"])
            slack = max(slack, float(np.abs(sp.S_values.values).max()) - k1 * exp.coeffs.M)
        checks.append(check("similarity.bound_slack", slack, 1e-2,
                            note="max |S| - k1 M over formal powers"))
        for w in exp.warnings:
            checks.append(check("warning", 0.0, 0.0, note=w, passed=True))
    return checks
