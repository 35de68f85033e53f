"""Interpolation-regression approximation and cubature on the unit disk.

Functions sampled on scattered nodes of the unit disk are approximated by a
Zernike expansion that interpolates on a near-optimal subset of the nodes
(matched to a Bos array) and fits the remaining nodes in the least-squares
sense.
"""

from .approximant import ApproxModel, evaluate, fit_operator, interpolate_only, max_error, polar_eval_grid
from .clsq import (
    ConstrainedLSProblem,
    FitResult,
    assemble,
    norm_bound_constants,
    solve_elimination,
    solve_kkt,
)
from .cubature import CubatureRule, integrate_model, product_disk_rule, reference_integral
from .errors import (
    AdmissibilityError,
    CardinalityError,
    ConstructionError,
    DiskIRError,
    NumericalError,
    SingularityError,
    StateError,
    ValidationError,
    ZernikeIndexError,
)
from .mock_select import select_mock_nodes
from .nodesets import NodeSet, bos_array, chebyshev_zeros, cond_inf, gram_matrix, optimal_radii, polar_grid, spiral_set
from .zernike import DiskPoint, GradedZernikeBasis, ZernikeIndex, build_basis, radial_poly, radial_poly_jacobi

__version__ = "0.1.0"
