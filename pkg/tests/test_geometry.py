from fractions import Fraction
from math import pi

import numpy as np
import pytest

from vekua_bergman.errors import DomainError, DomainMismatchError
from vekua_bergman.geometry import build_disk, build_rectangle, integrate, lattice
from vekua_bergman.gridfn import GridFunction, sample


def disk_monomial_exact(p, q):
    """Integral of x^p y^q over the unit disk.

    Radial part 1/(p+q+2); angular part 2*pi*(p-1)!!(q-1)!!/(p+q)!!, built
    as a product of rationals.
    """
    if p % 2 or q % 2:
        return 0.0
    ang = Fraction(1)
    for k in range(1, p // 2 + 1):
        ang *= 2 * k - 1
    for k in range(1, q // 2 + 1):
        ang *= 2 * k - 1
    for k in range(1, (p + q) // 2 + 1):
        ang /= 2 * k
    return float(2 * ang / (p + q + 2)) * pi


def square_monomial_exact(p, q):
    return float(Fraction(1, p + 1) * Fraction(1, q + 1))


def test_disk_area_and_moments(unit_disk):
    assert abs(unit_disk.weights.sum() - pi) <= 1e-12 * pi
    z = GridFunction(unit_disk, unit_disk.nodes)
    assert abs(integrate(unit_disk, z)) <= 1e-12
    r2 = GridFunction(unit_disk, np.abs(unit_disk.nodes) ** 2)
    assert abs(integrate(unit_disk, r2) - pi / 2) <= 1e-12


def test_disk_monomial_exactness():
    d = build_disk(0j, 1.0, 8, 16)   # exact up to degree min(15, 15)
    x, y = d.nodes.real, d.nodes.imag
    for p in range(16):
        for q in range(16 - p):
            exact = disk_monomial_exact(p, q)
            got = np.sum(d.weights * x ** p * y ** q)
            assert abs(got - exact) <= 1e-12 * max(abs(exact), 1.0), (p, q)


def test_disk_wallis_spot_values():
    # int x^2 = pi/4, int x^2 y^2 = pi/24, int x^4 = pi/8 over the unit disk
    assert disk_monomial_exact(2, 0) == pytest.approx(pi / 4, rel=1e-15)
    assert disk_monomial_exact(2, 2) == pytest.approx(pi / 24, rel=1e-15)
    assert disk_monomial_exact(4, 0) == pytest.approx(pi / 8, rel=1e-15)


def test_rectangle_examples(unit_square):
    x, y = unit_square.nodes.real, unit_square.nodes.imag
    assert abs(np.sum(unit_square.weights * x * y) - 0.25) <= 1e-14
    assert abs(unit_square.weights.sum() - 1.0) <= 1e-14
    assert abs(np.sum(unit_square.weights * x ** 7 * y ** 7) - 1 / 64) <= 1e-13


def test_rectangle_monomial_exactness(unit_square):
    x, y = unit_square.nodes.real, unit_square.nodes.imag
    for p in range(16):
        for q in range(16):
            exact = square_monomial_exact(p, q)
            assert abs(np.sum(unit_square.weights * x ** p * y ** q) - exact) <= 1e-12 * exact


def test_integrate_examples(unit_disk):
    assert integrate(unit_disk, GridFunction.zeros(unit_disk)) == 0
    one = sample(lambda z: np.ones_like(z), unit_disk)
    assert abs(integrate(unit_disk, one) - pi) <= 1e-12
    zz = sample(lambda z: np.conj(z) * z, unit_disk)
    assert abs(integrate(unit_disk, zz) - pi / 2) <= 1e-12


def test_integrate_rejects_foreign_function(unit_disk, unit_square):
    with pytest.raises(DomainMismatchError):
        integrate(unit_disk, GridFunction.zeros(unit_square))


@pytest.mark.parametrize("build", [
    lambda n, m: build_disk(0.2 - 0.1j, 0.7, n, m),
    lambda n, m: build_rectangle(-1 + 0j, 0.5 + 1j, n, m),
])
def test_refinement_does_not_increase_error(build):
    ref = build(256, 256)
    exact = np.sum(ref.weights * np.exp(ref.nodes.real))
    prev = np.inf
    for n in (4, 8, 16, 32):
        d = build(n, 2 * n)
        err = abs(np.sum(d.weights * np.exp(d.nodes.real)) - exact)
        assert err <= prev + 1e-15
        prev = err
    assert prev <= 1e-13


def test_domain_invariants(unit_disk, unit_square):
    for d in (unit_disk, unit_square):
        assert np.all(d.weights > 0)
        assert d.nodes.size == d.weights.size
        assert np.all(d.contains(d.nodes))
        assert d.h > 0


@pytest.mark.parametrize("args", [
    (0j, 0.0, 8, 16), (0j, -1.0, 8, 16), (0j, 1.0, 3, 16), (0j, 1.0, 8, 7), (0j, 1.0, 5000, 16),
])
def test_build_disk_errors(args):
    with pytest.raises(DomainError):
        build_disk(*args)


def test_build_rectangle_errors():
    with pytest.raises(DomainError):
        build_rectangle(1 + 1j, 1 + 2j, 4, 4)
    with pytest.raises(DomainError):
        build_rectangle(0j, 1 + 1j, 0, 4)


def test_lattice_respects_margin(unit_disk):
    pts = lattice(unit_disk, 0.05, reach=0.1)
    assert pts.size > 0
    assert np.all(np.abs(pts) <= 1 - unit_disk.interior_margin + 1e-15)
