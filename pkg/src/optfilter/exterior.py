"""Exterior Dirichlet problem (-Laplace + a^2) u = 0 outside the domain.

Two solution representations:

* Spectral (balls): u = sum c_lm (k_l(a r)/k_l(a R)) Y_lm, matching the
  boundary data exactly at r = R; decay at infinity is structural because
  every radial factor decays exponentially.
* MFS (star surfaces): fundamental-solution point sources placed inside
  the domain on a shrunk copy of the boundary, fitted by least squares at
  the surface quadrature nodes.
"""

import warnings

import numpy as np
from scipy.linalg import qr, solve_triangular

from .exceptions import (
    IllConditionedWarning,
    PointInsideDomainError,
    ResidualTooLargeError,
)
from .geometry import surface_quadrature
from .kernels import FOUR_PI
from .radial import decay_ratio, log_derivative
from .sphharm import (
    RealCoeffs,
    angles_of,
    fibonacci_sphere,
    sph_project,
    sph_sum,
)


class BoundaryData:
    """Dirichlet trace, as spherical coefficients or node values."""

    def __init__(self, coeffs=None, node_values=None):
        if (coeffs is None) == (node_values is None):
            raise ValueError("provide exactly one of coeffs / node_values")
        self.coeffs = coeffs
        self.node_values = node_values

    @classmethod
    def from_coeffs(cls, coeffs):
        return cls(coeffs=coeffs)

    @classmethod
    def from_nodes(cls, values):
        return cls(node_values=np.asarray(values, dtype=float))


class ExteriorSolution:
    """Evaluable exterior field with decay at infinity built in."""

    def __init__(self, a, domain):
        self.a = float(a)
        self.domain = domain

    def evaluate(self, points):
        raise NotImplementedError

    def boundary_values(self, surf):
        """Trace on the boundary nodes (smooth limit from outside)."""
        raise NotImplementedError

    def normal_derivative(self, surf):
        raise NotImplementedError


class SpectralSolution(ExteriorSolution):
    """u = sum c_lm k_l(a r)/k_l(a R) Y_lm about the ball center."""

    def __init__(self, a, domain, coeffs):
        super().__init__(a, domain)
        self.radius = float(domain.radius)
        self.coeffs = coeffs

    def _angles_radii(self, points):
        rel = np.atleast_2d(points) - self.domain.center
        r = np.linalg.norm(rel, axis=1)
        theta, phi = angles_of(rel)
        return r, theta, phi

    def evaluate(self, points):
        r, theta, phi = self._angles_radii(points)
        radial = decay_ratio(self.coeffs.lmax, self.a, r, self.radius)
        out = sph_sum(self.coeffs, theta, phi, radial=radial)
        return out if out.size > 1 else float(out[0])

    def boundary_values(self, surf):
        return sph_sum(self.coeffs, surf.theta, surf.phi)

    def normal_derivative(self, surf):
        # du/dn at r = R is sum c_lm a k_l'(aR)/k_l(aR) Y_lm
        lmax = self.coeffs.lmax
        logd = self.a * log_derivative(lmax, np.array(self.a * self.radius))
        radial = np.broadcast_to(logd.reshape(-1, 1),
                                 (lmax + 1, surf.theta.size))
        return sph_sum(self.coeffs, surf.theta, surf.phi, radial=radial)


class MfsSolution(ExteriorSolution):
    """Sum of decaying point sources at interior locations."""

    def __init__(self, a, domain, sources, strengths, conditioning,
                 boundary_residual, ill_conditioned=False):
        super().__init__(a, domain)
        self.sources = sources
        self.strengths = strengths
        self.conditioning = float(conditioning)
        self.boundary_residual = float(boundary_residual)
        self.ill_conditioned = bool(ill_conditioned)

    def _basis(self, points):
        d = np.atleast_2d(points)[:, None, :] - self.sources[None, :, :]
        r = np.linalg.norm(d, axis=-1)
        return np.exp(-self.a * r) / (FOUR_PI * r)

    def evaluate(self, points):
        out = self._basis(points) @ self.strengths
        return out if out.size > 1 else float(out[0])

    def boundary_values(self, surf):
        return self._basis(surf.nodes) @ self.strengths

    def normal_derivative(self, surf):
        d = surf.nodes[:, None, :] - self.sources[None, :, :]
        r = np.linalg.norm(d, axis=-1)
        g = -np.exp(-self.a * r) / (FOUR_PI * r) * (self.a + 1.0 / r)
        proj = np.sum(d * surf.normals[:, None, :], axis=-1) / r
        return (g * proj) @ self.strengths


def solve_ball_spectral(a, radius_or_domain, data):
    """Exterior solution on a ball from spherical boundary coefficients."""
    from .geometry import build_ball  # local to avoid cycle at import time

    if a <= 0:
        raise ValueError("a must be positive")
    if hasattr(radius_or_domain, "kind"):
        domain = radius_or_domain
        if domain.kind != "ball":
            raise ValueError("spectral solver requires a ball domain")
    else:
        if radius_or_domain <= 0:
            raise ValueError("radius must be positive")
        domain = build_ball((0.0, 0.0, 0.0), float(radius_or_domain))
    if data.coeffs is None:
        raise ValueError("spectral solver needs coefficient boundary data")
    coeffs = data.coeffs if isinstance(data.coeffs, RealCoeffs) \
        else RealCoeffs.from_dict(data.coeffs)
    return SpectralSolution(a, domain, coeffs)


def project_boundary_data(field, domain, lmax):
    """Spherical coefficients of f restricted to a ball boundary.

    Coefficients below 1e-15 of the largest are clipped: they are pure
    projection-quadrature noise and would only slow later evaluation.
    """
    from .sphharm import projection_grid

    theta, phi, w = projection_grid(lmax)
    pts = domain.surface_points(theta, phi)
    values = field.value(pts)
    return BoundaryData.from_coeffs(
        sph_project(values, theta, phi, w, lmax, clip_below=1e-15))


def collocation_surface(domain, n_sources, order=None):
    """Deterministic collocation grid for MFS data sampling."""
    if order is None:
        # grids carry 2*order^2 nodes; keep >= 2x oversampling of sources
        order = max(16, int(np.ceil(np.sqrt(n_sources))))
    return surface_quadrature(domain, order)


def solve_mfs(domain, a, data, n_sources, beta, tol=None, field=None,
              collocation_order=None, cond_threshold=1e14):
    """Fit decaying point sources to node boundary data by least squares.

    Sources sit at center + beta * (x_j - center) for quasi-uniform
    boundary points x_j. Conditioning is estimated from the pivoted-QR
    triangular factor diagonal; above `cond_threshold` the solution is
    returned with a warning flag. The sup residual is measured on a
    held-out (finer) node set when the analytic `field` is given,
    otherwise at the collocation nodes, and checked against `tol`.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie strictly between 0 and 1")
    if data.node_values is None:
        raise ValueError("MFS needs node boundary data")
    surf = collocation_surface(domain, n_sources, collocation_order)
    values = np.asarray(data.node_values, dtype=float)
    if values.size != surf.n_nodes:
        raise ValueError(
            f"boundary data has {values.size} values, expected "
            f"{surf.n_nodes} (collocation order {surf.order})")
    if n_sources > surf.n_nodes:
        raise ValueError("n_sources exceeds collocation node count")

    dirs = fibonacci_sphere(n_sources)
    theta, phi = angles_of(dirs)
    bpoints = domain.surface_points(theta, phi)
    sources = domain.center + beta * (bpoints - domain.center)

    d = surf.nodes[:, None, :] - sources[None, :, :]
    r = np.linalg.norm(d, axis=-1)
    A = np.exp(-a * r) / (FOUR_PI * r)

    Q, R, perm = qr(A, mode="economic", pivoting=True)
    rdiag = np.abs(np.diag(R))
    conditioning = float(rdiag[0] / rdiag[-1]) if rdiag[-1] > 0 else np.inf
    ill = conditioning > cond_threshold
    if ill:
        warnings.warn(
            f"MFS collocation condition estimate {conditioning:.3e} "
            f"exceeds {cond_threshold:.1e}", IllConditionedWarning)
    # drop the numerically rank-deficient tail for a stable solve
    keep = max(1, int(np.sum(rdiag > rdiag[0] * 1e-15)))
    z = Q.T @ values
    c_perm = np.zeros(A.shape[1])
    c_perm[:keep] = solve_triangular(R[:keep, :keep], z[:keep])
    strengths = np.zeros(A.shape[1])
    strengths[perm] = c_perm

    sol = MfsSolution(a, domain, sources, strengths, conditioning,
                      boundary_residual=np.nan, ill_conditioned=ill)
    if field is not None:
        held_out = surface_quadrature(domain, surf.order + 5)
        residual = np.max(np.abs(sol.boundary_values(held_out)
                                 - field.value(held_out.nodes)))
    else:
        residual = np.max(np.abs(sol.boundary_values(surf) - values))
    sol.boundary_residual = float(residual)
    if tol is not None and residual > tol:
        raise ResidualTooLargeError(
            f"boundary residual {residual:.3e} exceeds tolerance {tol:.1e}")
    return sol


def eval_solution(sol, x):
    """Value of u at a strictly exterior point."""
    x = np.asarray(x, dtype=float)
    pts = np.atleast_2d(x)
    inside = sol.domain.contains(pts, margin=-1e-10 * sol.domain.length_scale)
    if np.any(inside):
        raise PointInsideDomainError(
            f"point {pts[np.argmax(inside)]} is not strictly exterior")
    return sol.evaluate(x)


def normal_derivative_trace(sol, surf):
    """Outward normal derivative of u at the surface quadrature nodes."""
    if sol.domain is not surf.domain:
        # allow equal-by-value domains (e.g. rebuilt from config)
        if sol.domain.kind != surf.domain.kind or not np.allclose(
                sol.domain.center, surf.domain.center):
            raise ValueError("solution and quadrature domains differ")
    return sol.normal_derivative(surf)
