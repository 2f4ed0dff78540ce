"""Integer points in anisotropically expanded domains and the matching torus spectra.

For a subspace F of R^n, T_eps fixes F and stretches its orthogonal complement
by 1/eps.  The package builds the lattices attached to F, counts integer
points of T_eps(S) exactly, evaluates leading terms and predicted remainder
orders, and counts eigenvalues of the magnetic Laplacian on the torus.
"""

from .asymptotics import (FitError, FitResult, SweepRecord, fit_remainder, leading_term,
                          predicted_exponent, records_from_csv, records_to_csv, remainder_exponent,
                          sweep)
from .counting import (BudgetExceeded, CountResult, count_points, gauss_reference, t_eps_inverse,
                       t_eps_matrix)
from .domains import (Box, Ellipsoid, OracleDomain, ball, bounding_box, contains, slice_volume,
                      slice_volume_box, slice_volume_ellipsoid, slice_volume_mc, superellipsoid,
                      unit_ball_volume)
from .exact import FieldMismatchError, QuadScalar, parse_rational, parse_scalar, sign, to_float
from .kernels import HAVE_COMPILED
from .lattice import (DualLattice, IntegerLattice, SubspaceData, build_subspace, covolume_sq,
                      dual_basis, dual_coordinates, hermite_normal_form, integer_kernel, project_V)
from .spectral import (SpectralConfig, counting_function, eigenvalue, spectral_ball,
                       spectral_leading_term)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded", "Box", "CountResult", "DualLattice", "Ellipsoid", "FieldMismatchError",
    "FitError", "FitResult", "HAVE_COMPILED", "IntegerLattice", "OracleDomain", "QuadScalar",
    "SpectralConfig", "SubspaceData", "SweepRecord", "ball", "bounding_box", "build_subspace",
    "contains", "count_points", "counting_function", "covolume_sq", "dual_basis",
    "dual_coordinates", "eigenvalue", "fit_remainder", "gauss_reference", "hermite_normal_form",
    "integer_kernel", "leading_term", "parse_rational", "parse_scalar", "predicted_exponent",
    "project_V", "records_from_csv", "records_to_csv", "remainder_exponent", "sign",
    "slice_volume", "slice_volume_box", "slice_volume_ellipsoid", "slice_volume_mc",
    "spectral_ball", "spectral_leading_term", "superellipsoid", "sweep", "t_eps_inverse",
    "t_eps_matrix", "to_float", "unit_ball_volume",
]
