"""The area operator ``(T phi)(z) = (1/pi) int phi(s) / (z - s) dA(s)``.

The integral is discretized with the domain's quadrature rule; nodes
closer to the target than ``exclusion_factor * domain.h`` are left out.
On a disk of that radius centred at the target the constant part of the
density integrates to zero, so dropping them costs O(h).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .gridfn import (
    GridFunction,
    PointEvaluator,
    default_lattice_h,
    evaluate,
    residual_lattice,
    sample,
    wirtinger_dbar,
)
from .geometry import Domain, as_point


def cauchy_apply(domain: Domain, densities: np.ndarray, targets,
                 exclusion_factor: float = 0.5) -> np.ndarray:
    """Apply T to one or several densities at arbitrary targets.

    ``densities`` has shape ``(n,)`` or ``(k, n)`` (node values); the result
    has shape ``targets.shape`` or ``(k,) + targets.shape``.
    """
    targets = np.asarray(targets, dtype=complex)
    dens = np.asarray(densities, dtype=complex)
    single = dens.ndim == 1
    q = np.atleast_2d(dens) * (domain.weights / np.pi)
    flat = targets.ravel()
    re, im = _backend.cauchy_sum(
        np.ascontiguousarray(flat.real), np.ascontiguousarray(flat.imag),
        np.ascontiguousarray(domain.nodes.real),
        np.ascontiguousarray(domain.nodes.imag),
        np.ascontiguousarray(q.real), np.ascontiguousarray(q.imag),
        float(exclusion_factor * domain.h),
    )
    out = (re + 1j * im).reshape((q.shape[0],) + targets.shape)
    return out[0] if single else out


@dataclass(frozen=True)
class TeodorescuEvaluator:
    """T applied to a fixed density; callable as a point evaluator."""

    domain: Domain
    density: GridFunction
    exclusion_factor: float = 0.5

    def __post_init__(self):
        self.domain.check_same(self.density.domain)
        if not 0 < self.exclusion_factor <= 2:
            raise ValueError(
                f"exclusion_factor must lie in (0, 2], got {self.exclusion_factor!r}"
            )

    def __call__(self, z):
        return cauchy_apply(self.domain, self.density.values, z,
                            self.exclusion_factor)


def apply_at(t: TeodorescuEvaluator, z) -> complex:
    return complex(t(np.array([as_point(z)]))[0])


def apply(t: TeodorescuEvaluator) -> GridFunction:
    return GridFunction(t.domain, t(t.domain.nodes))


def sup_bound_constant(domain: Domain) -> float:
    """``k1 = 2 sqrt(area / pi)``, so that ``|T phi| <= k1 sup|phi|``."""
    return 2.0 * np.sqrt(domain.area / np.pi)


def dbar_identity_error(t: TeodorescuEvaluator, density: PointEvaluator,
                        lattice_h: float | None = None, stencil: int = 4) -> float:
    """Max over the evaluation lattice of ``|dbar(T phi) - phi|``."""
    if lattice_h is None:
        lattice_h = default_lattice_h(t.domain)
    pts = residual_lattice(t.domain, lattice_h, stencil)
    err = wirtinger_dbar(t, pts, lattice_h, stencil) - evaluate(density, pts)
    return float(np.abs(err).max())


def exact_T_of_one(domain: Domain, z) -> np.ndarray:
    """Closed form of ``T 1`` for a disk: conj(z - c) inside, R^2/(z - c) outside."""
    if domain.kind != "disk":
        raise NotImplementedError("closed form only for disks")
    c, r = domain.params
    d = np.asarray(z, dtype=complex) - c
    inside = np.abs(d) <= r
    safe = np.where(inside, 1.0, d)
    return np.where(inside, d.conj(), r * r / safe)


DENSITY_PRESETS: dict[str, PointEvaluator] = {
    "one": lambda z: np.ones_like(z),
    "z": lambda z: z,
    "zbar": lambda z: np.conj(z),
    "z2": lambda z: z * z,
    "exp_x": lambda z: np.exp(z.real) + 0j,
    "mixed": lambda z: np.cos(z.imag) + 1j * z.real * z.imag,
}


def preset_evaluator(name: str, domain: Domain,
                     exclusion_factor: float = 0.5) -> TeodorescuEvaluator:
    return TeodorescuEvaluator(domain, sample(DENSITY_PRESETS[name], domain),
                               exclusion_factor)
