"""Bergman kernel and Bergman projection from a finite orthonormal system.

For an orthonormal system ``phi_1..phi_N`` in the real inner product
``<W, V> = Re int W conj(V)``, the truncated kernel is

    B(alpha, zeta, z) = sum_n Re(conj(alpha) phi_n(zeta)) phi_n(z),

with ``K = B(1, .)`` and ``L = B(i, .)``.  Everything downstream
(reproduction, projection, symmetry checks) uses these partial sums.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EvaluationRegionError, OrthonormalizationError
from .geometry import Domain, as_point
from .gridfn import (
    CoefficientPair,
    GridFunction,
    PointEvaluator,
    dbar_residual,
    evaluate,
    sample,
)
from .teodorescu import cauchy_apply
from .vekua import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    SolutionRep,
    analytic_basis,
    coefficient_preset,
    formal_power_basis,
)

DEFAULT_DROP_TOL = 1e-8


@dataclass(eq=False)
class Candidate:
    """A certified solution offered to Gram-Schmidt."""

    values: GridFunction
    evaluator: PointEvaluator
    residual: float | None = None
    label: str = ""


def _real_rows(domain: Domain, values: np.ndarray) -> np.ndarray:
    # maps the real inner product onto the Euclidean dot product
    s = np.sqrt(domain.weights)
    return np.concatenate([values.real * s, values.imag * s], axis=-1)


def evaluate_candidates(candidates, points) -> np.ndarray:
    """Values of every candidate at ``points``, shape ``(k, m)``.

    Fixed-point solutions sharing one domain are evaluated with a single
    batched operator application.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    out = np.empty((len(candidates), pts.size), dtype=complex)
    batch = []
    for i, c in enumerate(candidates):
        ev = c.evaluator
        if isinstance(ev, SolutionRep) and np.any(ev.density.values):
            out[i] = evaluate(ev.analytic_part, pts)
            batch.append(i)
        else:
            out[i] = evaluate(ev, pts)
    if batch:
        first = candidates[batch[0]].evaluator
        dens = np.array([candidates[i].evaluator.density.values for i in batch])
        out[batch] += cauchy_apply(first.domain, dens, pts, first.exclusion_factor)
    return out


@dataclass(eq=False)
class OrthonormalSystem:
    """Orthonormal real-linear combinations of surviving candidates.

    ``coef[n, k]`` is the weight of candidate ``k`` in member ``n``.
    """

    domain: Domain
    candidates: list
    coef: np.ndarray
    kept: list
    dropped: list
    gram_defect: float
    values: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return self.coef.shape[0]

    @property
    def members(self) -> list:
        return [GridFunction(self.domain, v) for v in self.values]

    @property
    def residuals(self) -> list:
        return [self.candidates[k].residual for k in self.kept]

    def evaluate(self, points, count: int | None = None) -> np.ndarray:
        """Member values at ``points``, shape ``(count, m)``."""
        count = self.N if count is None else count
        cols = np.flatnonzero(np.any(self.coef[:count] != 0, axis=0))
        vals = evaluate_candidates([self.candidates[k] for k in cols], points)
        return self.coef[:count][:, cols] @ vals

    def member(self, n: int) -> PointEvaluator:
        def phi(z):
            z = np.asarray(z, dtype=complex)
            return self.evaluate(z.ravel())[n].reshape(z.shape)
        return phi


def orthonormalize(candidates, drop_tol: float = DEFAULT_DROP_TOL) -> OrthonormalSystem:
    """Modified Gram-Schmidt in the real inner product, two passes.

    A candidate is dropped when the norm left after projection falls below
    ``drop_tol`` times its original norm.
    """
    candidates = list(candidates)
    if not candidates:
        raise OrthonormalizationError("no candidates")
    domain = candidates[0].values.domain
    for c in candidates[1:]:
        domain.check_same(c.values.domain)

    X = _real_rows(domain, np.array([c.values.values for c in candidates]))
    k = len(candidates)
    Q, C, kept, dropped = [], [], [], []
    for i in range(k):
        v = X[i].copy()
        coef = np.zeros(k)
        coef[i] = 1.0
        before = np.linalg.norm(v)
        for _ in range(2):
            for q, cq in zip(Q, C):
                r = q @ v
                v -= r * q
                coef -= r * cq
        after = np.linalg.norm(v)
        if before == 0 or after < drop_tol * before:
            dropped.append(i)
            continue
        Q.append(v / after)
        C.append(coef / after)
        kept.append(i)
    if not kept:
        raise OrthonormalizationError("every candidate was dropped")

    coef = np.array(C)
    values = coef @ np.array([c.values.values for c in candidates])
    G = _real_rows(domain, values)
    gram = G @ G.T
    defect = float(np.abs(gram - np.eye(len(kept))).max())
    return OrthonormalSystem(domain, candidates, coef, kept, dropped, defect, values)


@dataclass(eq=False)
class KernelAssembly:
    """Truncated kernel built from the first ``N`` members of ``system``."""

    system: OrthonormalSystem
    N: int | None = None

    def __post_init__(self):
        if self.N is None:
            self.N = self.system.N
        if not 0 < self.N <= self.system.N:
            raise ValueError(f"truncation {self.N} outside 1..{self.system.N}")

    @property
    def domain(self) -> Domain:
        return self.system.domain

    @property
    def values(self) -> np.ndarray:
        return self.system.values[:self.N]

    def at(self, points) -> np.ndarray:
        return self.system.evaluate(points, self.N)

    def check_region(self, points) -> np.ndarray:
        pts = np.atleast_1d(np.asarray(points, dtype=complex)).ravel()
        bad = ~self.domain.in_evaluation_region(pts)
        if bad.any():
            raise EvaluationRegionError(
                f"point {complex(pts[np.argmax(bad)])!r} is outside the evaluation "
                f"region (interior margin {self.domain.interior_margin!r})"
            )
        return pts


def kernel_matrix(assembly: KernelAssembly, alpha, zetas, zs) -> np.ndarray:
    """``out[i, j] = B(alpha, zetas[i], zs[j])``."""
    zetas = assembly.check_region(zetas)
    zs = assembly.check_region(zs)
    pz = assembly.at(np.concatenate([zetas, zs]))
    p_zeta, p_z = pz[:, :zetas.size], pz[:, zetas.size:]
    return (np.conj(complex(alpha)) * p_zeta).real.T @ p_z


def kernel_KL(assembly: KernelAssembly, zetas, zs):
    """``(K, L)`` matrices over ``zetas x zs`` from one member evaluation."""
    zetas = assembly.check_region(zetas)
    zs = assembly.check_region(zs)
    pz = assembly.at(np.concatenate([zetas, zs]))
    p_zeta, p_z = pz[:, :zetas.size], pz[:, zetas.size:]
    return p_zeta.real.T @ p_z, p_zeta.imag.T @ p_z


def kernel_B(assembly: KernelAssembly, alpha, zeta, z) -> complex:
    return complex(kernel_matrix(assembly, alpha, [as_point(zeta)], [as_point(z)])[0, 0])


def kernel_K(assembly: KernelAssembly, zeta, z) -> complex:
    return kernel_B(assembly, 1.0, zeta, z)


def kernel_L(assembly: KernelAssembly, zeta, z) -> complex:
    return kernel_B(assembly, 1j, zeta, z)


def fourier_coefficients(assembly: KernelAssembly, W: GridFunction) -> np.ndarray:
    assembly.domain.check_same(W.domain)
    return _real_rows(assembly.domain, assembly.values) @ _real_rows(assembly.domain, W.values)


def reproduce_routes(assembly: KernelAssembly, W: GridFunction, zetas):
    """Reproduce ``W`` at ``zetas`` by the quadrature integral and by the Fourier sum.

    The integral route sums ``w_j B(W_j, node_j, zeta)`` over nodes; the
    Fourier route sums ``<W, phi_n> phi_n(zeta)`` over members.
    """
    assembly.domain.check_same(W.domain)
    zetas = assembly.check_region(zetas)
    p = assembly.at(zetas)
    E = assembly.values
    w = assembly.domain.weights
    coeff = (np.conj(W.values)[None, :] * E).real
    integral = (w[None, :] * (p.T @ coeff)).sum(axis=1)
    fourier = fourier_coefficients(assembly, W) @ p
    return integral, fourier


def reproduce(assembly: KernelAssembly, W: GridFunction, zeta) -> complex:
    integral, _ = reproduce_routes(assembly, W, [as_point(zeta)])
    return complex(integral[0])


def project(assembly: KernelAssembly, phi: GridFunction) -> GridFunction:
    """Bergman projection ``sum_n <phi, phi_n> phi_n`` at the nodes."""
    c = fourier_coefficients(assembly, phi)
    return GridFunction(assembly.domain, c @ assembly.values)


def kernel_symmetry_report(assembly: KernelAssembly, points, analytic: bool = False) -> dict:
    """Largest violation of each kernel symmetry over all ordered point pairs.

    Keys ``re_K``, ``im_L``, ``re_L_im_K`` are the general identities;
    with ``analytic`` the classical-case identities ``re_L_anti``,
    ``im_L_re_K`` and ``K_minus_iL`` are added.
    """
    K, L = kernel_KL(assembly, points, points)
    rep = {
        "re_K": float(np.abs(K.real - K.real.T).max()),
        "im_L": float(np.abs(L.imag - L.imag.T).max()),
        "re_L_im_K": float(np.abs(L.real - K.imag.T).max()),
    }
    if analytic:
        rep["re_L_anti"] = float(np.abs(L.real + L.real.T).max())
        rep["im_L_re_K"] = float(np.abs(L.imag - K.real.T).max())
        rep["K_minus_iL"] = float(np.abs(K + 1j * L).max())
    return rep


def classical_disk_kernel(zeta, z, radius: float = 1.0, center=0j) -> np.ndarray:
    """``R^2 / (pi (R^2 - (z - c) conj(zeta - c))^2)`` on the open disk."""
    c = as_point(center)
    zeta = np.asarray(zeta, dtype=complex) - c
    z = np.asarray(z, dtype=complex) - c
    if np.any(np.abs(zeta) >= radius) or np.any(np.abs(z) >= radius):
        raise EvaluationRegionError("classical disk kernel needs points in the open disk")
    r2 = radius * radius
    return r2 / (np.pi * (r2 - z * np.conj(zeta)) ** 2)


def disk_tail_bound(N_degree: int, rho: float) -> float:
    """``sum_{n > N} (n + 1) rho^n / pi`` in closed form."""
    n = N_degree + 1
    # sum_{k>=n} (k+1) rho^k = rho^n (n + 1 - n rho) / (1 - rho)^2
    return rho ** n * (n + 1 - n * rho) / ((1 - rho) ** 2 * np.pi)


# --- assembly helpers ------------------------------------------------------

def analytic_candidates(N: int, center, domain: Domain, certify: bool = True,
                        lattice_h: float | None = None) -> list:
    zero = coefficient_preset("zero")
    out = []
    for n, f in enumerate(analytic_basis(N, center)):
        res = dbar_residual(zero, f, domain, lattice_h) if certify else None
        label = f"{'i*' if n % 2 else ''}(z-z0)^{n // 2}"
        out.append(Candidate(sample(f, domain), f, res, label))
    return out


def solution_candidates(reps, certify: bool = True,
                        lattice_h: float | None = None) -> list:
    out = []
    for n, rep in enumerate(reps):
        res = dbar_residual(rep.coeffs, rep, rep.domain, lattice_h) if certify else None
        label = f"formal {'i*' if n % 2 else ''}(z-z0)^{n // 2}"
        out.append(Candidate(rep.values, rep, res, label))
    return out


def build_system(domain: Domain, coeffs: CoefficientPair, N: int, center=None,
                 generator: str = "analytic", tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER, drop_tol: float = DEFAULT_DROP_TOL,
                 certify: bool = True, lattice_h: float | None = None,
                 exclusion_factor: float = 0.5):
    """Basis generation, certification and orthonormalization in one call.

    Returns ``(system, reps)``; ``reps`` is empty for the analytic generator.
    """
    center = domain.center if center is None else as_point(center)
    if generator == "analytic":
        if not coeffs.is_zero:
            raise ValueError("the analytic generator requires a = b = 0")
        return orthonormalize(analytic_candidates(N, center, domain, certify, lattice_h),
                              drop_tol), []
    if generator == "formal_powers":
        reps = formal_power_basis(coeffs, N, center, domain, tol, max_iter,
                                  exclusion_factor)
        return orthonormalize(solution_candidates(reps, certify, lattice_h), drop_tol), reps
    raise ValueError(f"unknown basis generator {generator!r}")
