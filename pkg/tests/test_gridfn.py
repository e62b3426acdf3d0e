import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vekua_bergman.errors import DomainMismatchError, EmptyLatticeError, SampleError
from vekua_bergman.geometry import build_disk
from vekua_bergman.gridfn import (
    GridFunction,
    dbar_residual,
    inner_product,
    norm,
    observed_order,
    sample,
)
from vekua_bergman.vekua import coefficient_preset

SMALL = build_disk(0j, 1.0, 6, 12)
# magnitudes kept away from the underflow range of squared values
finite = st.one_of(st.just(0.0), st.floats(1e-6, 1e3), st.floats(-1e3, -1e-6))
vectors = arrays(np.float64, 2 * SMALL.size, elements=finite)


def gf(v):
    n = SMALL.size
    return GridFunction(SMALL, v[:n] + 1j * v[n:])


def test_sample_examples(unit_disk):
    assert np.all(sample(lambda z: 1.0, unit_disk).values == 1)
    assert np.array_equal(sample(lambda z: z, unit_disk).values, unit_disk.nodes)
    d = build_disk(0.5 + 0j, 0.25, 4, 8)
    v = sample(lambda z: np.exp(z.real), d).values
    assert np.allclose(v, np.exp(d.nodes.real))
    assert math.exp(0.5) == pytest.approx(1.6487212707001282)


def test_sample_reports_bad_node(unit_disk):
    with pytest.raises(SampleError) as info, np.errstate(divide="ignore", invalid="ignore"):
        sample(lambda z: 1.0 / (z - unit_disk.nodes[3]), unit_disk)
    assert info.value.node == unit_disk.nodes[3]


def test_inner_product_examples(unit_disk):
    one = sample(lambda z: 1.0, unit_disk)
    i = sample(lambda z: 1j, unit_disk)
    z = sample(lambda z: z, unit_disk)
    assert inner_product(one, i) == 0.0
    assert abs(inner_product(z, z) - math.pi / 2) <= 1e-12
    for n in range(5):
        for m in range(5):
            if n != m:
                zn = sample(lambda s: s ** n, unit_disk)
                zm = sample(lambda s: s ** m, unit_disk)
                assert abs(inner_product(zn, zm)) <= 1e-13


def test_norm_examples(unit_disk):
    assert norm(GridFunction.zeros(unit_disk)) == 0.0
    assert abs(norm(sample(lambda z: 1.0, unit_disk)) - math.sqrt(math.pi)) <= 1e-13
    assert abs(norm(sample(lambda z: (3 + 4j) / 5, unit_disk)) - math.sqrt(math.pi)) <= 1e-13


def test_domain_mismatch(unit_disk):
    with pytest.raises(DomainMismatchError):
        inner_product(GridFunction.zeros(unit_disk), GridFunction.zeros(SMALL))


@settings(max_examples=60, deadline=None)
@given(vectors, vectors)
def test_inner_product_symmetric_and_cauchy_schwarz(u, v):
    W, V = gf(u), gf(v)
    assert inner_product(W, V) == inner_product(V, W)
    assert abs(inner_product(W, V)) <= norm(W) * norm(V) * (1 + 1e-12) + 1e-12


@settings(max_examples=60, deadline=None)
@given(vectors, vectors, finite, finite)
def test_inner_product_real_bilinear(u, v, s, t):
    W, V, U = gf(u), gf(v), gf(v[::-1].copy())
    lhs = inner_product(s * W + t * U, V)
    rhs = s * inner_product(W, V) + t * inner_product(U, V)
    scale = (abs(s) * norm(W) + abs(t) * norm(U)) * norm(V) + 1.0
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(vectors)
def test_real_norm_equals_complex_norm(u):
    W = gf(u)
    complex_norm = math.sqrt(np.sum(SMALL.weights * np.abs(W.values) ** 2))
    assert abs(norm(W) - complex_norm) <= 1e-14 * max(complex_norm, 1e-300)
    assert norm(W) >= 0
    assert (norm(W) == 0) == (not np.any(W.values))


def test_dbar_residual_examples(unit_disk):
    zero = coefficient_preset("zero")
    assert dbar_residual(zero, lambda z: z * z, unit_disk) <= 1e-9
    assert dbar_residual(zero, lambda z: z * z, unit_disk, stencil=2) <= 1e-9
    r = dbar_residual(zero, np.conj, unit_disk)
    assert abs(r - 1.0) <= 1e-12


@pytest.mark.parametrize("stencil,min_order", [(2, 1.9), (4, 3.5)])
def test_dbar_residual_order_exp_x(unit_disk, stencil, min_order):
    coeffs = coefficient_preset("main_vekua", f="exp_x")
    hs = [1e-2, 5e-3, 2.5e-3]
    errs = [dbar_residual(coeffs, lambda z: np.exp(z.real) + 0j, unit_disk, h, stencil)
            for h in hs]
    assert observed_order(hs, errs) >= min_order
    # the five-point residual is roughly h^2/12 * max e^x at the lattice edge
    if stencil == 2:
        assert errs[0] == pytest.approx(1e-4 / 12 * math.exp(0.8), rel=0.05)


def test_dbar_residual_argmax(unit_disk):
    coeffs = coefficient_preset("main_vekua", f="exp_x")
    val, where = dbar_residual(coeffs, lambda z: np.exp(z.real) + 0j, unit_disk, 0.02,
                               return_argmax=True)
    assert val > 0
    # e^x error term grows with x: the worst point sits on the right edge
    assert where.real > 0.7


def test_empty_lattice():
    d = build_disk(0j, 1.0, 8, 16, interior_margin=0.99)
    with pytest.raises(EmptyLatticeError):
        dbar_residual(coefficient_preset("zero"), lambda z: z, d, lattice_h=0.5)
