"""Solutions of the Vekua equation ``dbar W = a W + b conj(W)``.

Solutions are generated from an analytic part ``Phi`` by iterating
``W <- Phi + T(a W + b conj(W))`` at the quadrature nodes.  Closed-form
families obtained by direct substitution serve as exact fixtures.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .errors import ConvergenceError, DivergenceError
from .geometry import Domain, as_point
from .gridfn import CoefficientPair, GridFunction, PointEvaluator, evaluate
from .teodorescu import TeodorescuEvaluator, cauchy_apply, sup_bound_constant

log = logging.getLogger(__name__)

NONCONTRACTION_WARNING = "non-contraction: q = k1*M = {q:.6g} >= 1; convergence is not guaranteed"
M_ESTIMATE_WARNING = "M is an estimate (max over a 4x refined sample): M = {M:.6g}"

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 200


# --- coefficient presets ---------------------------------------------------

def _const(value, z):
    return np.full(np.shape(z), value, dtype=complex)


def coefficient_preset(name: str, domain: Domain | None = None, **params) -> CoefficientPair:
    """Named coefficient pairs with closed-form ``M``.

    ``zero``; ``constant`` (``b`` constant, keys ``re``/``im``);
    ``constant_a`` (``a`` constant); ``main_vekua`` with ``f`` in
    ``{"exp_x", "gauss_hyp"}`` giving ``b = dbar(f)/f``.
    """
    zero = partial(_const, 0j)
    if name == "zero":
        return CoefficientPair(zero, zero, 0.0, name="zero")
    if name in ("constant", "constant_b"):
        beta = complex(params.get("re", 0.0), params.get("im", 0.0))
        return CoefficientPair(zero, partial(_const, beta), abs(beta),
                               name="constant", params=(("beta", beta),))
    if name == "constant_a":
        gamma = complex(params.get("re", 0.0), params.get("im", 0.0))
        return CoefficientPair(partial(_const, gamma), zero, abs(gamma),
                               name="constant_a", params=(("gamma", gamma),))
    if name == "main_vekua":
        f = params.get("f", params.get("preset", "exp_x"))
        if f == "exp_x":
            return CoefficientPair(zero, partial(_const, 0.5 + 0j), 0.5,
                                   name="main_vekua", params=(("f", f),))
        if f == "gauss_hyp":
            if domain is None:
                raise ValueError("gauss_hyp needs a domain to bound sup|b|")
            return CoefficientPair(zero, np.conj, domain.sup_modulus(),
                                   name="main_vekua", params=(("f", f),))
        raise ValueError(f"unknown main_vekua preset {f!r}")
    raise ValueError(f"unknown coefficient preset {name!r}")


# --- analytic basis --------------------------------------------------------

def _power(n, scale, center, z):
    return scale * (z - center) ** n


def analytic_basis(N: int, center=0j) -> list[PointEvaluator]:
    """``(z - z0)^n`` and ``i (z - z0)^n`` for ``n = 0..N``, interleaved."""
    if N < 0:
        raise ValueError("N must be non-negative")
    c = as_point(center)
    out = []
    for n in range(N + 1):
        out.append(partial(_power, n, 1.0 + 0j, c))
        out.append(partial(_power, n, 1j, c))
    return out


# --- fixed-point solutions -------------------------------------------------

@dataclass(eq=False)
class SolutionRep:
    """A Vekua solution ``W = Phi + T g`` with ``g = a W + b conj(W)``.

    ``values`` holds W at the nodes, which equals ``Phi + T g`` there by
    construction.
    """

    domain: Domain
    coeffs: CoefficientPair
    analytic_part: PointEvaluator
    density: GridFunction
    values: GridFunction
    iterations: int
    final_update: float
    history: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    exclusion_factor: float = 0.5

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        phi = evaluate(self.analytic_part, z)
        if not np.any(self.density.values):
            return phi.copy()
        return phi + cauchy_apply(self.domain, self.density.values, z,
                                  self.exclusion_factor)

    @property
    def update_ratios(self) -> list:
        h = self.history
        return [h[k + 1] / h[k] for k in range(len(h) - 1) if h[k] > 0]


def contraction_estimate(coeffs: CoefficientPair, domain: Domain) -> float:
    return sup_bound_constant(domain) * coeffs.M


def _weighted_norms(domain, values):
    return np.sqrt(np.sum(domain.weights * np.abs(values) ** 2, axis=-1))


def _solve_batch(coeffs, phis, domain, tol, max_iter, exclusion_factor):
    q = contraction_estimate(coeffs, domain)
    warns = []
    if q >= 1:
        warns.append(NONCONTRACTION_WARNING.format(q=q))
        log.warning(warns[-1])
    if coeffs.M_is_estimate:
        warns.append(M_ESTIMATE_WARNING.format(M=coeffs.M))

    phi = np.array([evaluate(p, domain.nodes) for p in phis])
    k = len(phis)
    if coeffs.is_zero:
        zero = GridFunction.zeros(domain)
        return [SolutionRep(domain, coeffs, phis[i], zero, GridFunction(domain, phi[i]),
                            1, 0.0, [0.0], list(warns), exclusion_factor)
                for i in range(k)]

    a = evaluate(coeffs.a, domain.nodes)
    b = evaluate(coeffs.b, domain.nodes)
    W = phi.copy()
    used = np.zeros_like(W)
    active = list(range(k))
    history = [[] for _ in range(k)]
    grow = [0] * k
    iterations = [0] * k
    rel_hist = [[] for _ in range(k)]
    for it in range(1, max_iter + 1):
        g = a * W[active] + b * W[active].conj()
        W_new = phi[active] + cauchy_apply(domain, g, domain.nodes, exclusion_factor)
        upd = _weighted_norms(domain, W_new - W[active])
        size = _weighted_norms(domain, W_new)
        still = []
        for row, i in enumerate(active):
            W[i] = W_new[row]
            used[i] = g[row]
            rel = upd[row] / size[row] if size[row] > 0 else upd[row]
            if history[i] and upd[row] > history[i][-1]:
                grow[i] += 1
            else:
                grow[i] = 0
            history[i].append(float(upd[row]))
            rel_hist[i].append(float(rel))
            iterations[i] = it
            if grow[i] >= 3:
                raise DivergenceError(
                    f"fixed-point update grew for 3 consecutive iterations "
                    f"(element {i}, iteration {it}, q = {q:.6g})",
                    history=history[i], final_update=float(rel), index=i)
            if not rel <= tol:
                still.append(i)
        active = still
        if not active:
            break
    if active:
        i = active[0]
        raise ConvergenceError(
            f"no convergence after {max_iter} iterations (element {i}, "
            f"relative update {rel_hist[i][-1]:.3e} > tol {tol:.1e})",
            history=history[i], final_update=rel_hist[i][-1], index=i)
    return [SolutionRep(domain, coeffs, phis[i], GridFunction(domain, used[i]),
                        GridFunction(domain, W[i]), iterations[i], rel_hist[i][-1],
                        history[i], list(warns), exclusion_factor)
            for i in range(k)]


def solve_fixed_point(coeffs: CoefficientPair, phi: PointEvaluator, domain: Domain,
                      tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                      exclusion_factor: float = 0.5) -> SolutionRep:
    """Solve ``W = Phi + T(a W + b conj(W))`` by successive substitution.

    Stops when the relative L2 update drops to ``tol``.  Raises
    :class:`DivergenceError` if the update norm grows three iterations in a
    row and :class:`ConvergenceError` when ``max_iter`` is exhausted.  When
    ``k1 * M >= 1`` the iteration still runs but the result carries a
    non-contraction warning.
    """
    return _solve_batch(coeffs, [phi], domain, tol, max_iter, exclusion_factor)[0]


def formal_power_basis(coeffs: CoefficientPair, N: int, center, domain: Domain,
                       tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                       exclusion_factor: float = 0.5) -> list[SolutionRep]:
    """Fixed-point solutions seeded by every element of ``analytic_basis(N, center)``.

    The elements are iterated together (one operator application per
    sweep) but each stops on its own tolerance.
    """
    return _solve_batch(coeffs, analytic_basis(N, center), domain, tol, max_iter,
                        exclusion_factor)


# --- exact families --------------------------------------------------------

@dataclass(frozen=True)
class ExactFamily:
    kind: str
    params: dict
    coeffs: CoefficientPair
    solutions: tuple

    @property
    def W(self) -> PointEvaluator:
        return self.solutions[0]


def _poly(coefs, center, z):
    out = np.zeros_like(z)
    for c in reversed(coefs):
        out = out * (z - center) + c
    return out


def _exp_x(z):
    return np.exp(z.real) + 0j


def _i_over_exp_x(z):
    return 1j * np.exp(-z.real)


def _gauss_hyp(z):
    return np.exp(z.real ** 2 - z.imag ** 2) + 0j


def _i_over_gauss_hyp(z):
    return 1j * np.exp(z.imag ** 2 - z.real ** 2)


def _exp_real(beta, z):
    return np.exp(2.0 * (np.conj(beta) * z).real) + 0j


def _exp_zbar_power(gamma, n, center, z):
    return np.exp(gamma * np.conj(z)) * (z - center) ** n


def exact_family(kind: str, params: dict | None = None,
                 domain: Domain | None = None) -> ExactFamily:
    """Closed-form solution families with matching coefficients.

    ``analytic_poly``: ``a = b = 0``, W a polynomial (``coefficients``,
    ascending, complex, about ``center``).
    ``main_vekua``: ``a = 0``, ``b = dbar(f)/f``; solutions ``f`` and ``i/f``.
    ``constant_b``: ``b = beta``; ``W = exp(beta conj(z) + conj(beta) z)``.
    ``constant_a``: ``a = gamma``; ``W = exp(gamma conj(z)) (z - z0)^n``.
    """
    params = dict(params or {})
    if kind == "analytic_poly":
        coefs = [complex(*c) if isinstance(c, (list, tuple)) else complex(c)
                 for c in params.get("coefficients", [0, 0, 0, 1])]
        center = as_point(params.get("center", 0j))
        return ExactFamily(kind, params, coefficient_preset("zero"),
                           (partial(_poly, tuple(coefs), center),))
    if kind == "main_vekua":
        f = params.get("f", "exp_x")
        coeffs = coefficient_preset("main_vekua", domain, f=f)
        sols = {"exp_x": (_exp_x, _i_over_exp_x),
                "gauss_hyp": (_gauss_hyp, _i_over_gauss_hyp)}[f]
        return ExactFamily(kind, params, coeffs, sols)
    if kind == "constant_b":
        beta = complex(params.get("re", params.get("beta", 0.0)), params.get("im", 0.0))
        coeffs = coefficient_preset("constant", re=beta.real, im=beta.imag)
        return ExactFamily(kind, params, coeffs, (partial(_exp_real, beta),))
    if kind == "constant_a":
        gamma = complex(params.get("re", params.get("gamma", 0.0)), params.get("im", 0.0))
        n = int(params.get("n", 1))
        center = as_point(params.get("center", 0j))
        coeffs = coefficient_preset("constant_a", re=gamma.real, im=gamma.imag)
        return ExactFamily(kind, params, coeffs,
                           (partial(_exp_zbar_power, gamma, n, center),))
    raise ValueError(f"unknown exact family {kind!r}")


# --- similarity principle --------------------------------------------------

@dataclass(frozen=True)
class SimilarityParts:
    """``W = Psi exp(S)`` with ``S = T(a + b conj(W)/W)``."""

    density: GridFunction
    S_values: GridFunction
    S: TeodorescuEvaluator
    W: PointEvaluator

    def Psi(self, z):
        z = np.asarray(z, dtype=complex)
        return evaluate(self.W, z) * np.exp(-self.S(z))


def similarity_parts(coeffs: CoefficientPair, W: PointEvaluator, domain: Domain,
                     zero_threshold: float | None = None,
                     exclusion_factor: float = 0.5) -> SimilarityParts:
    w = evaluate(W, domain.nodes)
    if zero_threshold is None:
        zero_threshold = 1e-12 * float(np.abs(w).max())
    a = evaluate(coeffs.a, domain.nodes)
    b = evaluate(coeffs.b, domain.nodes)
    d = GridFunction(domain, a + conj_ratio(w, zero_threshold) * b)
    S = TeodorescuEvaluator(domain, d, exclusion_factor)
    return SimilarityParts(d, GridFunction(domain, S(domain.nodes)), S, W)


def conj_ratio(W_values: np.ndarray, zero_threshold: float) -> np.ndarray:
    """``conj(W)/W`` where ``|W| >= zero_threshold``, else 0."""
    big = np.abs(W_values) >= zero_threshold
    return np.where(big, W_values.conj() / np.where(big, W_values, 1.0), 0.0)
