"""Solver and verifier for the covariance-kernel integral equation
R_Omega h = f via reduction to an exterior elliptic boundary-value
problem, with numerical audits of the underlying ellipticity hypotheses.
"""

from .assembly import (
    BvpSpec,
    DistributionalFilter,
    assemble_filter,
    pairing_direct,
    pairing_via_jump,
    reduce_to_bvp,
)
from .exterior import (
    BoundaryData,
    ExteriorSolution,
    eval_solution,
    normal_derivative_trace,
    project_boundary_data,
    solve_ball_spectral,
    solve_mfs,
)
from .fields import (
    Constant,
    ExpLinear,
    GaussianBump,
    Polynomial,
    RadialPlateau,
    ScaledSum,
)
from .forward import (
    ResidualReport,
    apply_filter,
    apply_surface,
    apply_volume,
    quadratic_form,
    residual_report,
)
from .geometry import (
    Domain,
    SurfaceQuadrature,
    VolumeQuadrature,
    build_ball,
    build_star_surface,
    surface_quadrature,
    volume_quadrature,
)
from .kernels import KernelParams, kernel_value, singularity_profile
from .sobolev import GridField, hs_norm_grid, isomorphism_ratio, rasterize_filter
from .symbols import (
    BoundarySymbol,
    EllipticityReport,
    OrderInfo,
    SymbolPoly,
    check_md_ellipticity,
    derive_orders,
    lopatinskii_check,
    upper_half_roots,
)

__version__ = "0.1.0"
