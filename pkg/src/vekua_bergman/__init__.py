"""Bergman kernel and Bergman projection for the Vekua equation.

The package builds orthonormal systems of solutions of
``dbar W = a W + b conj(W)`` on disks and rectangles, assembles the
truncated reproducing kernels ``K``, ``L`` and ``B(alpha, zeta, z)``, and
applies the Bergman projection to sampled functions.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .bergman import (
    KernelAssembly,
    OrthonormalSystem,
    build_system,
    classical_disk_kernel,
    kernel_B,
    kernel_K,
    kernel_L,
    kernel_symmetry_report,
    orthonormalize,
    project,
    reproduce,
)
from .geometry import Domain, build_disk, build_rectangle, integrate
from .gridfn import CoefficientPair, GridFunction, dbar_residual, inner_product, norm, sample
from .teodorescu import TeodorescuEvaluator, apply, apply_at, sup_bound_constant
from .vekua import (
    analytic_basis,
    coefficient_preset,
    exact_family,
    formal_power_basis,
    similarity_parts,
    solve_fixed_point,
)
