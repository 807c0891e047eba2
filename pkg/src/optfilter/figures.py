"""Matplotlib renderers for CLI reports (PNG alongside the CSV output)."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {
    "figure.figsize": (5.0, 3.4),
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 150,
}


def _save(fig, path):
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def render_residuals(report, path):
    """Absolute residual per verification point, log scale."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        err = np.abs(report.values - report.target)
        dist = np.linalg.norm(report.points, axis=1)
        ax.semilogy(dist, np.maximum(err, 1e-18), "o", ms=3)
        ax.axhline(report.sup_error, color="C3", lw=0.8,
                   label=f"sup = {report.sup_error:.2e}")
        ax.set_xlabel("|x|")
        ax.set_ylabel("|R_Omega h - f|")
        ax.legend(loc="best")
        _save(fig, path)


def render_convergence(levels, sup_errors, l2_errors, path, xlabel="level"):
    """Residual decay against the sweep parameter, log scale."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.semilogy(levels, sup_errors, "o-", label="sup")
        ax.semilogy(levels, l2_errors, "s--", label="l2")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("residual")
        ax.legend(loc="best")
        _save(fig, path)


def render_surface_density(surf, density, path):
    """Layer density over the (theta, phi) parameter grid."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        n_theta, n_phi = surf.order, 2 * surf.order
        grid = np.asarray(density).reshape(n_theta, n_phi)
        theta = surf.theta.reshape(n_theta, n_phi)[:, 0]
        phi = surf.phi.reshape(n_theta, n_phi)[0]
        order_idx = np.argsort(theta)
        mesh = ax.pcolormesh(phi, theta[order_idx], grid[order_idx],
                             shading="nearest")
        fig.colorbar(mesh, ax=ax, label="layer density")
        ax.set_xlabel("phi")
        ax.set_ylabel("theta")
        _save(fig, path)
