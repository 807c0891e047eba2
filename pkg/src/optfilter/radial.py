"""Decaying radial factors for the exterior modified Helmholtz equation.

The exterior basis uses the exponentially decaying modified spherical
Bessel functions normalized so that

    k_0(z) = exp(-z)/z,
    k_1(z) = exp(-z) (1/z + 1/z^2),
    k_{l+1}(z) = k_{l-1}(z) + (2l+1)/z * k_l(z),

i.e. without the conventional pi/2 prefactor. Only the ratios
k_l(a r)/k_l(a R) and the logarithmic derivative k_l'/k_l enter results,
so the normalization cancels; it is fixed here once to keep cross-checks
against closed forms unambiguous. All public helpers work on the scaled
values khat_l(z) = exp(z) k_l(z) (rational in 1/z), which keeps every
intermediate finite for arbitrarily large a*r.
"""

import numpy as np


def khat(lmax, z):
    """Table of scaled functions khat_l(z) = exp(z) k_l(z), l = 0..lmax.

    z may be a scalar or array; returns shape (lmax+1,) + z.shape.
    Upward recurrence, which is stable for the decaying family.
    """
    z = np.asarray(z, dtype=float)
    out = np.empty((lmax + 1,) + z.shape)
    out[0] = 1.0 / z
    if lmax >= 1:
        out[1] = 1.0 / z + 1.0 / z**2
    for l in range(1, lmax):
        out[l + 1] = out[l - 1] + (2.0 * l + 1.0) / z * out[l]
    return out


def khat_consecutive_ratio(lmax, z):
    """rho_l = khat_l(z)/khat_{l-1}(z) for l = 1..lmax, overflow-free."""
    z = np.asarray(z, dtype=float)
    rho = np.empty((lmax + 1,) + z.shape)
    rho[0] = np.nan  # undefined slot, keeps indexing aligned with l
    if lmax >= 1:
        rho[1] = 1.0 + 1.0 / z
    for l in range(2, lmax + 1):
        rho[l] = 1.0 / rho[l - 1] + (2.0 * l - 1.0) / z
    return rho


def decay_ratio(lmax, a, r, r_ref):
    """Table of k_l(a r) / k_l(a r_ref) for l = 0..lmax.

    Stable for any positive arguments: the exponential is factored out and
    the degree dependence is accumulated as a product of bounded ratios.
    """
    r = np.asarray(r, dtype=float)
    zr = a * r
    zR = float(a * r_ref)
    out = np.empty((lmax + 1,) + r.shape)
    out[0] = np.exp(-(zr - zR)) * (zR / zr)
    if lmax >= 1:
        rho_r = khat_consecutive_ratio(lmax, zr)
        rho_R = khat_consecutive_ratio(lmax, zR)
        for l in range(1, lmax + 1):
            out[l] = out[l - 1] * (rho_r[l] / rho_R[l])
    return out


def log_derivative(lmax, z):
    """Table of k_l'(z)/k_l(z), from k_l' = -k_{l-1} - (l+1)/z k_l."""
    z = np.asarray(z, dtype=float)
    out = np.empty((lmax + 1,) + z.shape)
    out[0] = -(1.0 + 1.0 / z)
    if lmax >= 1:
        rho = khat_consecutive_ratio(lmax, z)
        for l in range(1, lmax + 1):
            out[l] = -1.0 / rho[l] - (l + 1.0) / z
    return out


def k_lower(lmax, z):
    """Unscaled k_l(z) for moderate z (used by cross-checks and layers)."""
    return khat(lmax, z) * np.exp(-np.asarray(z, dtype=float))
