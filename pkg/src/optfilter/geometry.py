"""Bounded domains (ball or star-shaped) with spectral quadrature rules.

Surfaces are parametrized over spherical angles about the domain center;
star-shaped radial functions are real spherical-harmonic expansions, so
tangents, normals and Jacobians are available analytically and the
product Gauss-Legendre x trapezoid rules converge spectrally.
"""

import numpy as np
from scipy.special import roots_legendre

from .exceptions import NonPositiveRadialError, NonPositiveRadiusError
from .sphharm import RealCoeffs, angles_of, real_sph_harm, sph_sum

_VALIDATION_GRID = (64, 128)


class Domain:
    """Bounded region star-shaped about `center`, boundary at radius rho(theta, phi).

    kind is "ball" (rho constant) or "star" (rho a spherical-harmonic
    expansion). The outward normal follows from the parametrization and
    points into the exterior.
    """

    def __init__(self, kind, center, radius=None, radial_coeffs=None):
        self.kind = kind
        self.center = np.asarray(center, dtype=float)
        self.radius = radius
        self.radial_coeffs = radial_coeffs
        if kind == "ball":
            self._rho_max = float(radius)
            self._rho_min = float(radius)
        else:
            th = np.linspace(0.0, np.pi, _VALIDATION_GRID[0] + 2)[1:-1]
            ph = np.linspace(0.0, 2.0 * np.pi, _VALIDATION_GRID[1], endpoint=False)
            T, P = np.meshgrid(th, ph, indexing="ij")
            rho = self.rho(T.ravel(), P.ravel())
            i_min = int(np.argmin(rho))
            if rho[i_min] <= 0.0:
                raise NonPositiveRadialError(
                    T.ravel()[i_min], P.ravel()[i_min], rho[i_min]
                )
            self._rho_min = float(rho[i_min])
            self._rho_max = float(np.max(rho))
        # include poles in the positivity sweep
        if kind == "star":
            for th_pole in (0.0, np.pi):
                v = float(self.rho(np.array([th_pole]), np.array([0.0]))[0])
                if v <= 0.0:
                    raise NonPositiveRadialError(th_pole, 0.0, v)
                self._rho_min = min(self._rho_min, v)
                self._rho_max = max(self._rho_max, v)

    @property
    def rho_max(self):
        return self._rho_max

    @property
    def rho_min(self):
        return self._rho_min

    @property
    def length_scale(self):
        """Characteristic radius used for relative tolerances."""
        return self._rho_max

    def rho(self, theta, phi):
        """Boundary radius in direction (theta, phi)."""
        if self.kind == "ball":
            return np.full(np.shape(theta), float(self.radius))
        return sph_sum(self.radial_coeffs, theta, phi)

    def rho_grad(self, theta, phi):
        """(rho, d rho/d theta, d rho/d phi); analytic for both kinds."""
        if self.kind == "ball":
            z = np.zeros(np.shape(theta))
            return self.rho(theta, phi), z, z.copy()
        rho = np.zeros(np.shape(theta))
        drt = np.zeros(np.shape(theta))
        drp = np.zeros(np.shape(theta))
        for l, m, c in self.radial_coeffs.nonzero_items():
            y, dyt, dyp = real_sph_harm(l, m, theta, phi, grad=True)
            rho += c * y
            drt += c * dyt
            drp += c * dyp
        return rho, drt, drp

    def surface_points(self, theta, phi):
        rho = self.rho(theta, phi)
        return self.center + rho[..., None] * _unit(theta, phi)

    def contains(self, points, margin=0.0):
        """True for points with radial coordinate <= rho - margin."""
        rel = np.atleast_2d(points) - self.center
        r = np.linalg.norm(rel, axis=1)
        theta, phi = angles_of(rel)
        return r <= self.rho(theta, phi) - margin

    def boundary_distance(self, points):
        """Distance to the boundary; exact for balls, radial gap otherwise."""
        rel = np.atleast_2d(points) - self.center
        r = np.linalg.norm(rel, axis=1)
        if self.kind == "ball":
            return np.abs(self.radius - r)
        theta, phi = angles_of(rel)
        return np.abs(self.rho(theta, phi) - r)

    def to_json_dict(self):
        if self.kind == "ball":
            return {"kind": "ball", "center": list(self.center),
                    "radius": self.radius}
        return {
            "kind": "star",
            "center": list(self.center),
            "radial": {"lm_coeffs": [
                {"l": l, "m": m, "coeff": c}
                for l, m, c in self.radial_coeffs.nonzero_items()
            ]},
        }


class SurfaceQuadrature:
    """Nodes, surface-measure weights and outward unit normals on the boundary."""

    def __init__(self, domain, order, nodes, weights, normals, theta, phi,
                 solid_angle_weights):
        self.domain = domain
        self.order = order
        self.nodes = nodes
        self.weights = weights
        self.normals = normals
        self.theta = theta
        self.phi = phi
        self.solid_angle_weights = solid_angle_weights

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    def area(self):
        return float(np.sum(self.weights))

    def integrate(self, values):
        return float(np.dot(self.weights, values))


class VolumeQuadrature:
    """Interior nodes and weights; radial Gauss rule under the surface grid."""

    def __init__(self, domain, order, nodes, weights):
        self.domain = domain
        self.order = order
        self.nodes = nodes
        self.weights = weights

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    def volume(self):
        return float(np.sum(self.weights))

    def integrate(self, values):
        return float(np.dot(self.weights, values))


def _unit(theta, phi):
    st, ct = np.sin(theta), np.cos(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), ct], axis=-1)


def build_ball(center, radius):
    """Ball domain of positive radius."""
    if radius <= 0:
        raise NonPositiveRadiusError(f"radius must be positive, got {radius}")
    return Domain("ball", center, radius=radius)


def build_star_surface(center, radial_coeffs):
    """Star-shaped domain from real spherical-harmonic radial coefficients.

    radial_coeffs may be a RealCoeffs table, a {(l, m): value} dict or an
    iterable of (l, m, value). Positivity of the reconstructed radius is
    validated on a 64x128 angular grid plus the poles.
    """
    if not isinstance(radial_coeffs, RealCoeffs):
        radial_coeffs = RealCoeffs.from_dict(radial_coeffs)
    return Domain("star", center, radial_coeffs=radial_coeffs)


def surface_quadrature(domain, order):
    """Product rule on the boundary: order Gauss-Legendre nodes in
    cos(theta) times 2*order uniform azimuthal nodes, mapped through the
    parametrization with the exact Jacobian.

    The weights carry the surface measure dS; `solid_angle_weights` carry
    the underlying dOmega rule for projections onto spherical harmonics.
    """
    if order < 4:
        raise ValueError("surface quadrature order must be >= 4")
    n_theta, n_phi = order, 2 * order
    u, wu = roots_legendre(n_theta)
    theta = np.arccos(u)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    wphi = 2.0 * np.pi / n_phi
    T, P = np.meshgrid(theta, phi, indexing="ij")
    T, P = T.ravel(), P.ravel()
    W_angle = np.repeat(wu * wphi, n_phi)

    rho, drt, drp = domain.rho_grad(T, P)
    st = np.sin(T)
    rhat = _unit(T, P)
    theta_hat = np.stack([np.cos(T) * np.cos(P), np.cos(T) * np.sin(P),
                          -st], axis=-1)
    phi_hat = np.stack([-np.sin(P), np.cos(P), np.zeros_like(P)], axis=-1)

    # unnormalized outward normal rho*sin(theta)*(rho rhat - rho_t that
    # - rho_p/sin phat); the sin factor is absorbed by the cos(theta)
    # substitution in the weights
    n_vec = (rho[:, None] * rhat - drt[:, None] * theta_hat
             - (drp / st)[:, None] * phi_hat)
    n_norm = np.linalg.norm(n_vec, axis=1)
    normals = n_vec / n_norm[:, None]
    jac = rho * n_norm  # |x_t x x_p| / sin(theta)
    weights = W_angle * jac
    nodes = domain.center + rho[:, None] * rhat
    return SurfaceQuadrature(domain, order, nodes, weights, normals, T, P,
                             W_angle)


def volume_quadrature(domain, order, radial_order=None):
    """Radial Gauss-Legendre rule on [0, rho(theta, phi)] with the r^2
    Jacobian under the angular surface grid.

    radial_order (default: order) can be raised independently when the
    integrand varies much faster radially than angularly.
    """
    if order < 4:
        raise ValueError("volume quadrature order must be >= 4")
    surf = surface_quadrature(domain, order)
    g, wg = roots_legendre(radial_order or order)
    s = 0.5 * (g + 1.0)      # map to [0, 1]
    ws = 0.5 * wg
    rho = np.linalg.norm(surf.nodes - domain.center, axis=1)
    r = rho[:, None] * s[None, :]                        # (n_ang, order)
    w = (surf.solid_angle_weights[:, None] * ws[None, :]
         * r**2 * rho[:, None])
    dirs = (surf.nodes - domain.center) / rho[:, None]
    nodes = domain.center + r[..., None] * dirs[:, None, :]
    return VolumeQuadrature(domain, order, nodes.reshape(-1, 3), w.ravel())


def domain_from_json_dict(d):
    if d["kind"] == "ball":
        return build_ball(d["center"], d["radius"])
    if d["kind"] == "star":
        entries = [(e["l"], e["m"], e["coeff"])
                   for e in d["radial"]["lm_coeffs"]]
        return build_star_surface(d["center"], entries)
    raise ValueError(f"unknown domain kind {d['kind']!r}")
