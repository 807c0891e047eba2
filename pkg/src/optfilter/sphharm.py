"""Real spherical harmonics: evaluation, projection, sphere grids.

Conventions
-----------
Real orthonormal harmonics on the unit sphere,

    Y_{l,0}          = Pbar_l^0(cos theta)
    Y_{l,m}  (m > 0) = sqrt(2) Pbar_l^m(cos theta) cos(m phi)
    Y_{l,-m} (m > 0) = sqrt(2) Pbar_l^m(cos theta) sin(m phi)

with Pbar the fully normalized associated Legendre functions (no
Condon-Shortley phase), so that Y_{1,1} = sqrt(3/4pi) x/r etc. and
int_{S^2} Y_{lm} Y_{l'm'} dOmega = delta. Coefficients are stored in a
dense (lmax+1, 2*lmax+1) array indexed [l, m + lmax].
"""

import numpy as np
from scipy.special import roots_legendre, sph_harm_y

SQRT2 = np.sqrt(2.0)


class RealCoeffs:
    """Dense real spherical-harmonic coefficient table."""

    def __init__(self, lmax):
        self.lmax = int(lmax)
        self.table = np.zeros((self.lmax + 1, 2 * self.lmax + 1))

    def __getitem__(self, lm):
        l, m = lm
        return self.table[l, m + self.lmax]

    def __setitem__(self, lm, value):
        l, m = lm
        if abs(m) > l or l > self.lmax:
            raise IndexError(f"invalid (l, m) = ({l}, {m}) for lmax = {self.lmax}")
        self.table[l, m + self.lmax] = value

    def copy(self):
        out = RealCoeffs(self.lmax)
        out.table = self.table.copy()
        return out

    @classmethod
    def from_dict(cls, entries, lmax=None):
        """Build from {(l, m): value} or iterable of (l, m, value)."""
        if isinstance(entries, dict):
            items = [(l, m, v) for (l, m), v in entries.items()]
        else:
            items = [tuple(e) for e in entries]
        if lmax is None:
            lmax = max((l for l, _, _ in items), default=0)
        out = cls(lmax)
        for l, m, v in items:
            out[l, m] = v
        return out

    def nonzero_items(self):
        ls, ms = np.nonzero(self.table)
        return [(int(l), int(m) - self.lmax, float(self.table[l, m]))
                for l, m in zip(ls, ms)]


def _legendre_seed(costheta):
    return np.full(np.shape(costheta), np.sqrt(1.0 / (4.0 * np.pi)))


def _iter_plm(lmax, costheta, sintheta):
    """Yield (m, l, Pbar_l^m) over m-major order via stable recurrences."""
    pmm = _legendre_seed(costheta)
    for m in range(lmax + 1):
        if m > 0:
            pmm = pmm * sintheta * np.sqrt((2.0 * m + 1.0) / (2.0 * m))
        p_prev = pmm
        yield m, m, p_prev
        if m + 1 <= lmax:
            p_curr = costheta * np.sqrt(2.0 * m + 3.0) * pmm
            yield m, m + 1, p_curr
            for l in range(m + 2, lmax + 1):
                a = np.sqrt((2.0 * l - 1.0) * (2.0 * l + 1.0)
                            / ((l - m) * (l + m)))
                b = np.sqrt((2.0 * l + 1.0) * (l + m - 1.0) * (l - m - 1.0)
                            / ((l - m) * (l + m) * (2.0 * l - 3.0)))
                p_next = a * costheta * p_curr - b * p_prev
                p_prev, p_curr = p_curr, p_next
                yield m, l, p_curr


def sph_sum(coeffs, theta, phi, radial=None):
    """Evaluate sum_{lm} c_lm [radial_l] Y_lm at the given angles.

    Parameters
    ----------
    coeffs : RealCoeffs
    theta, phi : arrays of polar / azimuthal angles (broadcastable)
    radial : optional (lmax+1, ...) array of per-degree radial factors,
        broadcastable against theta.

    Returns
    -------
    array of the accumulated sum, shaped like theta.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    ct, st = np.cos(theta), np.sin(theta)
    out = np.zeros(np.broadcast(theta, phi).shape)
    lmax = coeffs.lmax
    cos_cache = {}
    sin_cache = {}
    for m, l, p in _iter_plm(lmax, ct, st):
        fac = 1.0 if radial is None else radial[l]
        if m == 0:
            c = coeffs[l, 0]
            if c != 0.0:
                out += c * p * fac
        else:
            cp = coeffs[l, m]
            cm = coeffs[l, -m]
            if cp == 0.0 and cm == 0.0:
                continue
            if m not in cos_cache:
                cos_cache[m] = np.cos(m * phi)
                sin_cache[m] = np.sin(m * phi)
            ang = cp * cos_cache[m] + cm * sin_cache[m]
            out += SQRT2 * p * ang * fac
    return out


def sph_project(values, theta, phi, weights, lmax, clip_below=None):
    """Project sampled values onto Y_lm up to lmax.

    `weights` must be solid-angle quadrature weights for the (theta, phi)
    nodes; exact for band-limited integrands within the rule's degree.
    Coefficients below clip_below (relative to the largest) are zeroed,
    which keeps later sums from iterating over pure quadrature noise.
    """
    theta = np.ravel(np.asarray(theta, dtype=float))
    phi = np.ravel(np.asarray(phi, dtype=float))
    wf = np.ravel(weights) * np.ravel(values)
    ct, st = np.cos(theta), np.sin(theta)
    out = RealCoeffs(lmax)
    cos_cache = {}
    sin_cache = {}
    for m, l, p in _iter_plm(lmax, ct, st):
        if m == 0:
            out[l, 0] = np.dot(wf, p)
        else:
            if m not in cos_cache:
                cos_cache[m] = np.cos(m * phi)
                sin_cache[m] = np.sin(m * phi)
            out[l, m] = SQRT2 * np.dot(wf, p * cos_cache[m])
            out[l, -m] = SQRT2 * np.dot(wf, p * sin_cache[m])
    if clip_below is not None:
        top = np.max(np.abs(out.table))
        if top > 0.0:
            out.table[np.abs(out.table) < clip_below * top] = 0.0
    return out


def real_sph_harm(l, m, theta, phi, grad=False):
    """Single real harmonic via scipy, optionally with angular gradient.

    Returns Y (and dY/dtheta, dY/dphi when grad=True). Intended for small
    coefficient sets (surface parametrizations); large sums should use
    sph_sum.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    ma = abs(m)
    sign = (-1.0) ** ma  # undo the Condon-Shortley phase scipy includes
    if grad:
        y, dy = sph_harm_y(l, ma, theta, phi, diff_n=1)
        parts = (y, dy[..., 0], dy[..., 1])
    else:
        parts = (sph_harm_y(l, ma, theta, phi),)
    if m == 0:
        vals = tuple(np.real(p) for p in parts)
    elif m > 0:
        vals = tuple(SQRT2 * sign * np.real(p) for p in parts)
    else:
        vals = tuple(SQRT2 * sign * np.imag(p) for p in parts)
    return vals if grad else vals[0]


def gauss_sphere_grid(n_theta, n_phi):
    """Solid-angle product rule: Gauss-Legendre in cos(theta) x trapezoid.

    Returns (theta, phi, weights) as flat arrays; sum(weights) = 4 pi.
    """
    u, wu = roots_legendre(n_theta)
    theta = np.arccos(u)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    wphi = 2.0 * np.pi / n_phi
    T, P = np.meshgrid(theta, phi, indexing="ij")
    W = np.broadcast_to((wu * wphi)[:, None], T.shape)
    return T.ravel(), P.ravel(), W.ravel().copy()


def projection_grid(lmax):
    """Grid adequate for exact projection of degree-lmax data."""
    return gauss_sphere_grid(lmax + 2, 2 * lmax + 4)


def fibonacci_sphere(n):
    """n quasi-uniform unit vectors (Fibonacci lattice)."""
    i = np.arange(n)
    golden = (1.0 + np.sqrt(5.0)) / 2.0
    z = 1.0 - (2.0 * i + 1.0) / n
    phi = 2.0 * np.pi * i / golden
    s = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.column_stack([s * np.cos(phi), s * np.sin(phi), z])


def angles_of(points):
    """(theta, phi) of cartesian points relative to the origin."""
    pts = np.atleast_2d(points)
    r = np.linalg.norm(pts, axis=1)
    theta = np.arccos(np.clip(pts[:, 2] / np.where(r > 0, r, 1.0), -1.0, 1.0))
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    return theta, phi
