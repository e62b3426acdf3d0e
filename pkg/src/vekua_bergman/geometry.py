"""Bounded planar domains with product quadrature rules.

Two domain kinds are supported: disks (Gauss-Legendre in radius times the
periodic trapezoidal rule in angle) and axis-aligned rectangles (tensor
Gauss-Legendre).  Points are plain Python/numpy complex numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError, DomainMismatchError

MAX_ORDER = 4096
MARGIN_FRACTION = 0.2


def as_point(p) -> complex:
    """Coerce ``p`` (complex, real, or ``(re, im)`` pair) to a finite complex."""
    if isinstance(p, (tuple, list)) and len(p) == 2:
        p = complex(float(p[0]), float(p[1]))
    z = complex(p)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise DomainError(f"non-finite point {z!r}")
    return z


@dataclass(frozen=True, eq=False)
class Domain:
    """A bounded region together with a positive-weight quadrature rule.

    Attributes
    ----------
    kind : {"disk", "rectangle"}
    params : tuple
        ``(center, radius)`` for disks, ``(corner_lo, corner_hi)`` for
        rectangles.
    orders : tuple of int
        Quadrature orders used to build the rule.
    nodes, weights : ndarray
        Quadrature nodes (complex) and weights (area units).
    area : float
        Area of the analytic region.
    h : float
        Largest nearest-neighbour distance between nodes.
    interior_margin : float
        Distance from the boundary that defines the evaluation region.
    """

    kind: str
    params: tuple
    orders: tuple
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    area: float
    h: float
    interior_margin: float

    @property
    def key(self) -> tuple:
        return (self.kind, self.params, self.orders, self.interior_margin)

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def diameter(self) -> float:
        if self.kind == "disk":
            return 2.0 * self.params[1]
        lo, hi = self.params
        return abs(hi - lo)

    @property
    def center(self) -> complex:
        if self.kind == "disk":
            return self.params[0]
        lo, hi = self.params
        return 0.5 * (lo + hi)

    def same_as(self, other: "Domain") -> bool:
        return self is other or self.key == other.key

    def check_same(self, other: "Domain") -> None:
        if not self.same_as(other):
            raise DomainMismatchError(
                f"domain mismatch: {self.key!r} vs {other.key!r}"
            )

    def contains(self, z, margin: float = 0.0) -> np.ndarray:
        """Interior predicate; with ``margin > 0`` the closed shrunk region.

        ``margin=0`` tests the open region itself.
        """
        z = np.asarray(z, dtype=complex)
        if self.kind == "disk":
            c, r = self.params
            d = np.abs(z - c)
            return d <= r - margin if margin > 0 else d < r
        lo, hi = self.params
        if margin > 0:
            return ((z.real >= lo.real + margin) & (z.real <= hi.real - margin)
                    & (z.imag >= lo.imag + margin) & (z.imag <= hi.imag - margin))
        return ((z.real > lo.real) & (z.real < hi.real)
                & (z.imag > lo.imag) & (z.imag < hi.imag))

    def in_evaluation_region(self, z) -> np.ndarray:
        return self.contains(z, margin=self.interior_margin) & self.contains(z)

    def sup_modulus(self) -> float:
        """sup of |z| over the closure of the region."""
        if self.kind == "disk":
            c, r = self.params
            return abs(c) + r
        lo, hi = self.params
        return max(abs(complex(x, y)) for x in (lo.real, hi.real)
                   for y in (lo.imag, hi.imag))

    def refined(self, factor: float) -> "Domain":
        """Same region with every quadrature order multiplied by ``factor``."""
        orders = tuple(max(1, int(round(o * factor))) for o in self.orders)
        if self.kind == "disk":
            return build_disk(self.params[0], self.params[1], *orders,
                              interior_margin=self.interior_margin)
        return build_rectangle(self.params[0], self.params[1], *orders,
                               interior_margin=self.interior_margin)


def _check_order(name: str, value: int, minimum: int) -> int:
    if int(value) != value or not minimum <= value <= MAX_ORDER:
        raise DomainError(
            f"{name} must be an integer in [{minimum}, {MAX_ORDER}], got {value!r}"
        )
    return int(value)


def _max_nn_distance(nodes: np.ndarray) -> float:
    xy = np.column_stack([nodes.real, nodes.imag])
    dist, _ = cKDTree(xy).query(xy, k=2)
    return float(dist[:, 1].max())


def build_disk(center, radius: float, radial_order: int, angular_order: int,
               interior_margin: float | None = None) -> Domain:
    """Polar product rule on the disk ``|z - center| < radius``.

    Integrates polynomials in x, y exactly up to total degree
    ``min(2*radial_order - 1, angular_order - 1)``.
    """
    center = as_point(center)
    radius = float(radius)
    if not (np.isfinite(radius) and radius > 0):
        raise DomainError(f"radius must be positive, got {radius!r}")
    nr = _check_order("radial_order", radial_order, 4)
    nt = _check_order("angular_order", angular_order, 8)
    if interior_margin is None:
        interior_margin = MARGIN_FRACTION * radius
    if not 0 <= interior_margin < radius:
        raise DomainError(f"interior_margin must lie in [0, radius), got {interior_margin!r}")

    x, w = np.polynomial.legendre.leggauss(nr)
    r = 0.5 * radius * (x + 1.0)
    wr = 0.5 * radius * w * r
    theta = 2.0 * np.pi * np.arange(nt) / nt
    nodes = center + (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
    weights = np.repeat(wr * (2.0 * np.pi / nt), nt)
    return Domain(
        kind="disk",
        params=(center, radius),
        orders=(nr, nt),
        nodes=nodes,
        weights=weights,
        area=np.pi * radius ** 2,
        h=_max_nn_distance(nodes),
        interior_margin=float(interior_margin),
    )


def build_rectangle(corner_lo, corner_hi, order_x: int, order_y: int,
                    interior_margin: float | None = None) -> Domain:
    """Tensor Gauss-Legendre rule on an axis-aligned rectangle."""
    lo, hi = as_point(corner_lo), as_point(corner_hi)
    if not (hi.real > lo.real and hi.imag > lo.imag):
        raise DomainError(f"degenerate rectangle: {lo!r} .. {hi!r}")
    nx = _check_order("order_x", order_x, 1)
    ny = _check_order("order_y", order_y, 1)
    wx_, wy_ = hi.real - lo.real, hi.imag - lo.imag
    if interior_margin is None:
        interior_margin = MARGIN_FRACTION * min(wx_, wy_)
    if not 0 <= interior_margin < 0.5 * min(wx_, wy_):
        raise DomainError(f"interior_margin too large: {interior_margin!r}")

    gx, ax = np.polynomial.legendre.leggauss(nx)
    gy, ay = np.polynomial.legendre.leggauss(ny)
    xs = lo.real + 0.5 * wx_ * (gx + 1.0)
    ys = lo.imag + 0.5 * wy_ * (gy + 1.0)
    nodes = (xs[:, None] + 1j * ys[None, :]).ravel()
    weights = (0.25 * wx_ * wy_ * ax[:, None] * ay[None, :]).ravel()
    return Domain(
        kind="rectangle",
        params=(lo, hi),
        orders=(nx, ny),
        nodes=nodes,
        weights=weights,
        area=wx_ * wy_,
        h=_max_nn_distance(nodes),
        interior_margin=float(interior_margin),
    )


def integrate(domain: Domain, values) -> complex:
    """Quadrature sum ``sum_j w_j v_j`` of a GridFunction over its domain."""
    domain.check_same(values.domain)
    return complex(np.sum(domain.weights * values.values))


def lattice(domain: Domain, spacing: float, reach: float = 0.0) -> np.ndarray:
    """Uniform Cartesian lattice inside the margin-shrunk region.

    Points are aligned on the domain center.  Only points whose stencil
    (radius ``reach`` along both axes) stays inside the open domain are kept.
    """
    if not spacing > 0:
        raise DomainError(f"lattice spacing must be positive, got {spacing!r}")
    c = domain.center
    half = 0.5 * domain.diameter
    n = int(np.floor(half / spacing))
    k = np.arange(-n, n + 1) * spacing
    pts = (c.real + k[:, None] + 1j * (c.imag + k[None, :])).ravel()
    keep = domain.in_evaluation_region(pts)
    if reach > 0:
        for off in (reach, -reach, 1j * reach, -1j * reach):
            keep &= domain.contains(pts + off)
    return pts[keep]
