"""Sampled complex functions and the real Hilbert-space structure on them.

A point evaluator is any callable mapping a complex ndarray to a complex
ndarray of the same shape; constants may return a scalar.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainMismatchError, EmptyLatticeError, SampleError
from .geometry import Domain, lattice

PointEvaluator = Callable[[np.ndarray], np.ndarray]

# central-difference weights for the first derivative, offsets +-1, +-2
_STENCILS = {
    2: ((1, 0.5),),
    4: ((1, 2.0 / 3.0), (2, -1.0 / 12.0)),
}


def evaluate(f: PointEvaluator, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return np.broadcast_to(np.asarray(f(z), dtype=complex), z.shape)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex values at the quadrature nodes of ``domain``."""

    domain: Domain
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.domain.size,):
            raise DomainMismatchError(
                f"expected {self.domain.size} values, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise SampleError("grid function has non-finite values")
        object.__setattr__(self, "values", v)

    def _other(self, other):
        if isinstance(other, GridFunction):
            self.domain.check_same(other.domain)
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.domain, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.domain, self.values - self._other(other))

    def __mul__(self, other):
        return GridFunction(self.domain, self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.domain, -self.values)

    def conj(self) -> "GridFunction":
        return GridFunction(self.domain, self.values.conj())

    @classmethod
    def zeros(cls, domain: Domain) -> "GridFunction":
        return cls(domain, np.zeros(domain.size, dtype=complex))


@dataclass(frozen=True)
class CoefficientPair:
    """Vekua coefficients ``a``, ``b`` with ``M = sup(|a| + |b|)``.

    ``M_is_estimate`` is set when ``M`` came from sampling rather than a
    closed form.
    """

    a: PointEvaluator
    b: PointEvaluator
    M: float
    name: str = "custom"
    M_is_estimate: bool = False
    params: tuple = ()

    @property
    def is_zero(self) -> bool:
        return self.M == 0.0 and not self.M_is_estimate

    @classmethod
    def estimated(cls, a, b, domain: Domain, name="sampled", params=()):
        """Estimate ``M`` as the maximum over a 4x refined node sample."""
        fine = domain.refined(4.0).nodes
        m = float(np.max(np.abs(evaluate(a, fine)) + np.abs(evaluate(b, fine))))
        m = max(m, float(np.max(np.abs(evaluate(a, domain.nodes))
                                + np.abs(evaluate(b, domain.nodes)))))
        return cls(a, b, m, name=name, M_is_estimate=True, params=params)


def sample(evaluator: PointEvaluator, domain: Domain) -> GridFunction:
    try:
        values = evaluate(evaluator, domain.nodes)
    except Exception as exc:
        raise SampleError(f"evaluator failed on domain nodes: {exc}") from exc
    bad = ~np.isfinite(values)
    if bad.any():
        j = int(np.argmax(bad))
        node = complex(domain.nodes[j])
        raise SampleError(f"non-finite value at node {node!r}", node=node)
    return GridFunction(domain, values.copy())


def inner_product(W: GridFunction, V: GridFunction) -> float:
    """Real inner product ``Re sum_j w_j W_j conj(V_j)``."""
    W.domain.check_same(V.domain)
    w = W.domain.weights
    return float(np.sum(w * (W.values.real * V.values.real
                             + W.values.imag * V.values.imag)))


def norm(W: GridFunction) -> float:
    return float(np.sqrt(max(inner_product(W, W), 0.0)))


def wirtinger_dbar(W: PointEvaluator, points: np.ndarray, step: float,
                   stencil: int = 4) -> np.ndarray:
    """Central-difference approximation of ``(d/dx + i d/dy) W / 2``."""
    taps = _STENCILS[stencil]
    offsets = [s * k * step for k, _ in taps for s in (1, -1)]
    probe = np.concatenate(
        [points + o for o in offsets] + [points + 1j * o for o in offsets]
    )
    vals = evaluate(W, probe).reshape(2, len(offsets), points.size)
    dx = np.zeros(points.size, dtype=complex)
    dy = np.zeros(points.size, dtype=complex)
    for i, (_, c) in enumerate(taps):
        dx += c * (vals[0, 2 * i] - vals[0, 2 * i + 1])
        dy += c * (vals[1, 2 * i] - vals[1, 2 * i + 1])
    return 0.5 * (dx + 1j * dy) / step


def default_lattice_h(domain: Domain) -> float:
    return 1e-2 * domain.diameter


def residual_lattice(domain: Domain, lattice_h: float, stencil: int = 4) -> np.ndarray:
    reach = (stencil // 2) * lattice_h
    pts = lattice(domain, lattice_h, reach=reach)
    if pts.size == 0:
        raise EmptyLatticeError(
            f"no lattice points with spacing {lattice_h!r} inside the "
            f"margin-shrunk region (margin {domain.interior_margin!r})"
        )
    return pts


def dbar_residual(coeffs: CoefficientPair, W: PointEvaluator, domain: Domain,
                  lattice_h: float | None = None, stencil: int = 4,
                  return_argmax: bool = False):
    """Max of ``|dbar W - a W - b conj(W)|`` over the evaluation lattice.

    The derivative uses central differences of order ``stencil`` (2 or 4).
    With ``return_argmax`` the lattice point attaining the max is returned
    as well.
    """
    if lattice_h is None:
        lattice_h = default_lattice_h(domain)
    pts = residual_lattice(domain, lattice_h, stencil)
    dbar = wirtinger_dbar(W, pts, lattice_h, stencil)
    if coeffs.is_zero:
        res = np.abs(dbar)
    else:
        w0 = evaluate(W, pts)
        res = np.abs(dbar - evaluate(coeffs.a, pts) * w0
                     - evaluate(coeffs.b, pts) * w0.conj())
    j = int(np.argmax(res))
    if return_argmax:
        return float(res[j]), complex(pts[j])
    return float(res[j])


def observed_order(hs, errors) -> float:
    """Least-squares slope of ``log(error)`` against ``log(h)``."""
    hs, errors = np.asarray(hs, float), np.asarray(errors, float)
    return float(np.polyfit(np.log(hs), np.log(errors), 1)[0])
