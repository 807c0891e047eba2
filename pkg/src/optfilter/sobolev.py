"""FFT grid estimators of H^s norms on a periodic box.

Used only for bounded-ratio checks of the filter-to-data norm
correspondence: the layer part of the filter is a surface delta whose
grid representation converges slowly, so pointwise targets are never
asserted, only stability and boundedness of ratios at pinned resolutions.
"""

import numpy as np

from .exceptions import BoxTooSmallError, DegenerateNormError
from .fields import RadialPlateau


class GridField:
    """Uniform N^3 sample grid on the cube [-L, L]^3 (cell centers)."""

    def __init__(self, box_half_width, resolution, samples):
        n = int(resolution)
        if n < 32 or n > 256 or (n & (n - 1)) != 0:
            raise ValueError("resolution must be a power of two in [32, 256]")
        self.box_half_width = float(box_half_width)
        self.resolution = n
        self.samples = np.asarray(samples, dtype=float)
        if self.samples.shape != (n, n, n):
            raise ValueError("samples shape does not match resolution")

    @property
    def cell_size(self):
        return 2.0 * self.box_half_width / self.resolution

    @property
    def cell_volume(self):
        return self.cell_size**3

    def axis_centers(self):
        L, n = self.box_half_width, self.resolution
        return -L + (np.arange(n) + 0.5) * (2.0 * L / n)

    def integral(self):
        return float(np.sum(self.samples) * self.cell_volume)


def _check_box(domain, box_half_width):
    margin = 0.5 * domain.length_scale
    reach = np.max(np.abs(domain.center)) + domain.rho_max
    if box_half_width < reach + margin:
        raise BoxTooSmallError(
            f"box half-width {box_half_width} < {reach + margin:.4g} "
            "(domain plus half-radius margin)")


def rasterize_field(func, box_half_width, resolution, mask=None):
    """Sample a callable on the grid; zero outside the optional mask."""
    grid = GridField(box_half_width, resolution,
                     np.zeros((resolution,) * 3))
    c = grid.axis_centers()
    X, Y, Z = np.meshgrid(c, c, c, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])
    vals = np.asarray(func(pts), dtype=float)
    if mask is not None:
        vals = np.where(mask(pts), vals, 0.0)
    grid.samples = vals.reshape(grid.samples.shape)
    return grid


def rasterize_filter(h, surf, box, vol_quad=None):
    """Grid representation of the filter distribution.

    The interior density is sampled at cell centers inside the domain;
    every surface node deposits its density times quadrature weight,
    divided by the cell volume, into the cell containing it, so the layer
    mass is conserved exactly. `vol_quad` is unused (cell-center sampling
    is exact for the analytic densities) and kept for interface parity.
    """
    box_half_width, resolution = box
    domain = h.domain
    _check_box(domain, box_half_width)
    grid = rasterize_field(
        lambda pts: h.volume_density(pts), box_half_width, resolution,
        mask=lambda pts: domain.contains(pts))
    idx = np.floor((surf.nodes + box_half_width)
                   / grid.cell_size).astype(int)
    idx = np.clip(idx, 0, resolution - 1)
    deposit = surf.weights * h.surface_density / grid.cell_volume
    np.add.at(grid.samples, (idx[:, 0], idx[:, 1], idx[:, 2]), deposit)
    return grid


def hs_norm_grid(grid, s):
    """Discrete ||(1 + |xi|^2)^{s/2} F g||_L2 with xi = pi m / L."""
    if not -2.0 <= s <= 2.0:
        raise ValueError("s must lie in [-2, 2]")
    n = grid.resolution
    ghat = np.fft.fftn(grid.samples)
    freq = 2.0 * np.pi * np.fft.fftfreq(n, d=grid.cell_size)
    k2 = (freq[:, None, None] ** 2 + freq[None, :, None] ** 2
          + freq[None, None, :] ** 2)
    weight = (1.0 + k2) ** s
    total = np.sum(weight * np.abs(ghat) ** 2) * grid.cell_volume / n**3
    return float(np.sqrt(total))


def restriction_cutoff(domain, box_half_width):
    """Fixed smooth cutoff equal to 1 on the closed domain, supported in
    the box: plateau to rho_max, decays over 90% of the remaining margin.

    This approximates the restriction norm from above by one explicit
    extension (the true norm is an infimum over extensions).
    """
    r_in = domain.rho_max
    r_out = r_in + 0.9 * (box_half_width
                          - np.max(np.abs(domain.center)) - r_in)
    return RadialPlateau(domain.center, r_in, r_out)


def isomorphism_ratio(f, h, domain, box):
    """||h||_{H^-1} / ||f||_{H^1} on the grid, with f extended by the
    fixed smooth cutoff."""
    box_half_width, resolution = box
    _check_box(domain, box_half_width)
    surf = h.surf
    num = hs_norm_grid(rasterize_filter(h, surf, box), -1.0)
    cutoff = restriction_cutoff(domain, box_half_width)
    fgrid = rasterize_field(
        lambda pts: f.value(pts) * cutoff.value(pts),
        box_half_width, resolution)
    den = hs_norm_grid(fgrid, 1.0)
    if den < 1e-12:
        raise DegenerateNormError(f"H^1 norm {den:.3e} is numerically zero")
    return num / den
