"""Reduction of the covariance integral equation and filter assembly.

For the executable operator pair (P = I, Q = -Laplace + a^2, a = 1) the
integral equation over the domain reduces to the exterior Dirichlet
problem for Q with trace data f, and the solution is the distribution

    h = (-Laplace + a^2) f  +  (df/dn - du/dn) delta_boundary,

an interior density plus a single delta layer. Two independent pairings
of h against smooth test functions (one through the jump formula, one by
integrating by parts back onto f and u) provide the identity check.
"""

import numpy as np
from scipy.special import roots_legendre

from .exceptions import TraceMismatchError, TruncationTooSmallError, UnsupportedMuError
from .sphharm import gauss_sphere_grid


class BvpSpec:
    """Boundary-value problem implied by the reduction.

    dirichlet_count = a normal-derivative traces are prescribed; mu/2
    extra conditions would be needed for mu > 0 (not constructed here).
    solver_available is False when a > 1: the trace data are well defined
    but no exterior solver for higher-order operators is provided.
    """

    def __init__(self, kernel_params, dirichlet_count, extra_condition_count,
                 traces, solver_available):
        self.kernel_params = kernel_params
        self.dirichlet_count = dirichlet_count
        self.extra_condition_count = extra_condition_count
        self.traces = traces
        self.solver_available = solver_available


class DistributionalFilter:
    """Interior density plus surface delta-layer density."""

    def __init__(self, volume_density, surface_density, params, domain, surf,
                 source=None):
        self.volume_density = volume_density
        self.surface_density = np.asarray(surface_density, dtype=float)
        self.params = params
        self.domain = domain
        self.surf = surf
        self.source = source
        if not np.all(np.isfinite(self.surface_density)):
            raise ValueError("surface density contains non-finite values")

    def layer_mass(self):
        return float(np.dot(self.surf.weights, self.surface_density))


def reduce_to_bvp(kernel_or_orders, f, domain):
    """Translate the integral equation into its exterior BVP data.

    Accepts KernelParams (executable pair) or a bare OrderInfo for the
    order bookkeeping of unsupported pairs. Raises UnsupportedMuError for
    mu > 0, reporting the mu/2 extra boundary conditions the reduction
    would require.
    """
    order_info = getattr(kernel_or_orders, "order_info", None)
    if order_info is None:
        order_info, kernel = kernel_or_orders, None
    else:
        kernel = kernel_or_orders
    if order_info.mu > 0:
        raise UnsupportedMuError(order_info.mu, order_info.mu // 2)
    a_count = order_info.a
    traces = [f] if a_count == 1 else [f] + [None] * (a_count - 1)
    return BvpSpec(
        kernel_params=kernel,
        dirichlet_count=a_count,
        extra_condition_count=0,
        traces=traces,
        solver_available=(a_count == 1 and kernel is not None),
    )


def assemble_filter(f, sol, surf, params, trace_tol=1e-6):
    """Build the distributional filter from f and the exterior solution.

    The exterior solution must match f on the boundary: the sup mismatch
    over the quadrature nodes is checked against trace_tol (a solution
    with the wrong trace would produce a spurious double layer).
    """
    boundary_f = f.value(surf.nodes)
    boundary_u = sol.boundary_values(surf)
    mismatch = float(np.max(np.abs(boundary_u - boundary_f)))
    if mismatch > trace_tol:
        raise TraceMismatchError(
            f"boundary trace mismatch {mismatch:.3e} exceeds {trace_tol:.1e}")
    flux_f = np.sum(surf.normals * f.gradient(surf.nodes), axis=1)
    flux_u = sol.normal_derivative(surf)
    a = params.a
    return DistributionalFilter(
        volume_density=lambda pts: f.qf(pts, a),
        surface_density=flux_f - flux_u,
        params=params,
        domain=sol.domain,
        surf=surf,
        source=f,
    )


def pairing_via_jump(h, f, test_fn, vol_quad, surf):
    """<h-image, phi> computed from the jump-formula form of h:
    integral of (Qf) phi over the domain plus the weighted layer."""
    a = h.params.a
    vol_term = vol_quad.integrate(f.qf(vol_quad.nodes, a)
                                  * test_fn.value(vol_quad.nodes))
    surf_term = surf.integrate(h.surface_density * test_fn.value(surf.nodes))
    return vol_term + surf_term


def pairing_direct(f, sol, test_fn, vol_quad, truncation_radius,
                   exterior_orders=(48, 40)):
    """<Q F, phi> = <F, Q phi> computed on the F side: f against Q phi
    inside, u against Q phi outside up to the truncation sphere.

    The test function must be supported inside the truncation ball
    centered at the domain center; Q phi is formed analytically.
    """
    domain = sol.domain
    a = sol.a
    center_offset = np.linalg.norm(
        np.asarray(test_fn.center) - domain.center)
    if center_offset + test_fn.support_radius > truncation_radius:
        raise TruncationTooSmallError(
            f"support reaches {center_offset + test_fn.support_radius:.4g} "
            f"> truncation radius {truncation_radius:.4g}")

    inner = vol_quad.integrate(f.value(vol_quad.nodes)
                               * test_fn.q_apply(vol_quad.nodes, a))

    n_rad, ang_order = exterior_orders
    theta, phi, w_ang = gauss_sphere_grid(ang_order, 2 * ang_order)
    rho = domain.rho(theta, phi)
    g, wg = roots_legendre(n_rad)
    s = 0.5 * (g + 1.0)
    ws = 0.5 * wg
    span = truncation_radius - rho
    r = rho[:, None] + span[:, None] * s[None, :]
    w = w_ang[:, None] * ws[None, :] * span[:, None] * r**2
    dirs = np.stack([np.sin(theta) * np.cos(phi),
                     np.sin(theta) * np.sin(phi),
                     np.cos(theta)], axis=-1)
    pts = domain.center + r[..., None] * dirs[:, None, :]
    pts = pts.reshape(-1, 3)
    u_vals = np.asarray(sol.evaluate(pts))
    q_phi = test_fn.q_apply(pts, a)
    outer = float(np.dot(w.ravel(), u_vals * q_phi))
    return inner + outer
