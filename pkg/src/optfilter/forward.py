"""Application of the restricted covariance operator to a filter.

The volume term integrates the 1/r kernel in target-centered spherical
coordinates, where the r^2 Jacobian cancels the singularity exactly: for
every direction the radial integral runs from the target to the boundary
exit distance, so the integrand is smooth and the product rule converges
spectrally for any interior target, however close to the boundary.

The layer term is evaluated by the plain surface rule away from the
boundary; for ball domains a spectral route (modified-Bessel expansion of
the kernel) takes over near it, where an angular rule cannot resolve the
kernel peak.
"""

import warnings

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import roots_legendre, spherical_in

from .exceptions import NearBoundaryWarning, OnSurfaceError
from .kernels import FOUR_PI
from .radial import k_lower
from .sphharm import angles_of, sph_project, sph_sum


class ResidualReport:
    """Pointwise and aggregate errors of the operator image against f."""

    def __init__(self, points, values, target, quad_order):
        self.points = np.asarray(points, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.target = np.asarray(target, dtype=float)
        self.quad_order = int(quad_order)
        err = np.abs(self.values - self.target)
        self.sup_error = float(np.max(err)) if err.size else 0.0
        self.l2_error = float(np.sqrt(np.mean(err**2))) if err.size else 0.0

    def rows(self):
        for i, (p, v, t) in enumerate(zip(self.points, self.values,
                                          self.target)):
            yield i, p, v, t, abs(v - t)

    def summary_dict(self):
        return {"sup_error": self.sup_error, "l2_error": self.l2_error,
                "order": self.quad_order}


def _orthonormal_frame(axis):
    """Right-handed frame (e1, e2, axis) for a unit vector axis."""
    helper = np.array([0.0, 0.0, 1.0])
    if abs(axis @ helper) > 0.9:
        helper = np.array([1.0, 0.0, 0.0])
    e1 = np.cross(helper, axis)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    return e1, e2


def _exit_distance_ball(x_rel, dirs, radius):
    b = dirs @ x_rel
    disc = radius * radius - x_rel @ x_rel + b * b
    return -b + np.sqrt(np.maximum(disc, 0.0))


def _exit_distance_star(domain, x, dirs, rtol=1e-13):
    """First boundary crossing along each ray by vectorized bisection."""
    x_rel = x - domain.center
    t_lo = np.zeros(dirs.shape[0])
    t_hi = np.full(dirs.shape[0],
                   np.linalg.norm(x_rel) + domain.rho_max + 0.1)

    def gap(t):
        pts = x_rel + t[:, None] * dirs
        r = np.linalg.norm(pts, axis=1)
        theta, phi = angles_of(pts)
        return r - domain.rho(theta, phi)

    n_iter = int(np.ceil(np.log2(np.max(t_hi) / (rtol * domain.rho_min)))) + 2
    for _ in range(n_iter):
        mid = 0.5 * (t_lo + t_hi)
        high = gap(mid) > 0.0
        t_hi = np.where(high, mid, t_hi)
        t_lo = np.where(high, t_lo, mid)
    return 0.5 * (t_lo + t_hi)


def apply_volume(params, domain, density, x, order):
    """integral over the domain of R(x, y) density(y) dy for interior x.

    Target-centered polar coordinates with the polar axis along the
    center-to-target direction; the radial Gauss rule runs to the
    per-direction boundary exit distance.
    """
    x = np.asarray(x, dtype=float)
    a = params.a
    scale = domain.length_scale
    dist = float(domain.boundary_distance(x)[0])
    if dist < 1e-3 * scale:
        warnings.warn(
            f"target within {dist:.2e} of the boundary; volume quadrature "
            "accuracy degrades", NearBoundaryWarning)

    x_rel = x - domain.center
    r_x = np.linalg.norm(x_rel)
    axis = x_rel / r_x if r_x > 1e-12 * scale else np.array([0.0, 0.0, 1.0])
    e1, e2 = _orthonormal_frame(axis)

    n_theta, n_phi, n_rad = 2 * order, 2 * order, order
    u, wu = roots_legendre(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    wphi = 2.0 * np.pi / n_phi
    st = np.sqrt(1.0 - u * u)
    U, P = np.meshgrid(u, phi, indexing="ij")
    ST = np.sqrt(1.0 - U * U)
    dirs = (ST[..., None] * np.cos(P)[..., None] * e1
            + ST[..., None] * np.sin(P)[..., None] * e2
            + U[..., None] * axis)
    dirs = dirs.reshape(-1, 3)
    w_ang = np.repeat(wu * wphi, n_phi)

    if domain.kind == "ball":
        t_star = _exit_distance_ball(x_rel, dirs, domain.radius)
    else:
        t_star = _exit_distance_star(domain, x, dirs)

    g, wg = roots_legendre(n_rad)
    s = 0.5 * (g + 1.0)
    ws = 0.5 * wg
    r = t_star[:, None] * s[None, :]
    pts = x + r[..., None] * dirs[:, None, :]
    dens = np.asarray(density(pts.reshape(-1, 3))).reshape(r.shape)
    # kernel * r^2 Jacobian = r exp(-a r) / (4 pi)
    integrand = r * np.exp(-a * r) * dens / FOUR_PI
    radial = integrand @ ws * t_star
    return float(np.dot(w_ang, radial))


def _layer_direct(params, surf, density, x):
    d = surf.nodes - x
    r = np.linalg.norm(d, axis=1)
    kern = np.exp(-params.a * r) / (FOUR_PI * r)
    return float(np.dot(surf.weights, kern * density))


class _SpectralLayer:
    """Ball-surface single layer diagonalized in spherical harmonics.

    S sigma (x) = a R^2 sum_lm s_lm i_l(a r_<) k_l(a r_>) Y_lm(xhat)
    with r_< = min(|x|, R), r_> = max(|x|, R); exact for band-limited
    densities, so it stays accurate arbitrarily close to the surface.
    """

    def __init__(self, params, surf, density):
        self.params = params
        self.surf = surf
        self.radius = surf.domain.radius
        self.center = surf.domain.center
        lmax = max(0, surf.order - 2)
        w_angle = surf.weights / self.radius**2  # back to solid angle
        self.coeffs = sph_project(density, surf.theta, surf.phi, w_angle,
                                  lmax)
        self.lmax = lmax

    def evaluate(self, x):
        a = self.params.a
        rel = np.asarray(x, dtype=float) - self.center
        r = np.linalg.norm(rel)
        theta, phi = angles_of(rel[None, :])
        r_lt, r_gt = min(r, self.radius), max(r, self.radius)
        ells = np.arange(self.lmax + 1)
        radial = (a * self.radius**2
                  * spherical_in(ells, a * r_lt)
                  * k_lower(self.lmax, np.array(a * r_gt)))
        out = sph_sum(self.coeffs, theta, phi,
                      radial=radial.reshape(-1, 1))
        return float(out[0])


def apply_surface(params, surf, density, x, _spectral_cache=None):
    """Single-layer potential of the node-sampled density at x.

    Off-surface targets only; the direct rule is used when the target is
    far enough from the surface for the rule's resolution, the spectral
    route (balls) otherwise.
    """
    x = np.asarray(x, dtype=float)
    density = np.asarray(density, dtype=float)
    scale = surf.domain.length_scale
    dist = float(surf.domain.boundary_distance(x)[0])
    if dist < 1e-6 * scale:
        raise OnSurfaceError(
            f"target within {dist:.2e} of the surface")
    if surf.domain.kind == "ball" and dist * surf.order < 12.0 * scale:
        layer = _spectral_cache
        if layer is None:
            layer = _SpectralLayer(params, surf, density)
        return layer.evaluate(x)
    return _layer_direct(params, surf, density, x)


def apply_filter(params, h, x, order):
    """R_Omega h at x: volume part plus layer part."""
    vol = apply_volume(params, h.domain, h.volume_density, x, order)
    lay = apply_surface(params, h.surf, h.surface_density, x)
    return vol + lay


def residual_report(params, h, f, points, order):
    """Evaluate R_Omega h against f at interior points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    cache = None
    if h.surf.domain.kind == "ball":
        cache = _SpectralLayer(params, h.surf, h.surface_density)
    values = []
    for x in points:
        vol = apply_volume(params, h.domain, h.volume_density, x, order)
        lay = apply_surface(params, h.surf, h.surface_density, x,
                            _spectral_cache=cache)
        values.append(vol + lay)
    return ResidualReport(points, values, f.value(points), order)


def quadratic_form(params, vol_quad, density_samples):
    """Discrete (R d, d) over the volume rule with a regularized diagonal.

    The i = j singularity is replaced by the closed-form kernel integral
    over the ball of the node's own volume share (first-order accurate).
    The reduction sums in ascending value order, so the result is
    deterministic and invariant under node relabeling.
    """
    d = np.asarray(density_samples, dtype=float)
    nodes = vol_quad.nodes
    w = vol_quad.weights
    a = params.a
    r = cdist(nodes, nodes)
    np.fill_diagonal(r, 1.0)
    kern = np.exp(-a * r) / (FOUR_PI * r)
    rho_i = (3.0 * w / FOUR_PI) ** (1.0 / 3.0)
    self_term = (1.0 - np.exp(-a * rho_i) * (1.0 + a * rho_i)) / a**2
    np.fill_diagonal(kern, self_term / w)
    terms = (w * d)[:, None] * kern * (w * d)[None, :]
    flat = np.sort(terms.ravel(), kind="stable")
    return float(np.sum(flat))
