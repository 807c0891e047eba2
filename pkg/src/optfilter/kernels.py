"""Covariance kernel of the inverse modified Helmholtz operator."""

import numpy as np

from .exceptions import CoincidentPointsError
from .symbols import OrderInfo

FOUR_PI = 4.0 * np.pi


class KernelParams:
    """Modified Helmholtz covariance kernel exp(-a r) / (4 pi r) in 3D.

    Arises from the operator pair P = I, Q = -Laplace + a^2, i.e. orders
    (mu, nu) = (0, 2) in dimension 3 with singularity exponent gamma = 1.
    """

    FAMILY = "modified_helmholtz_3d"

    def __init__(self, a, order_info=None):
        if a <= 0:
            raise ValueError(f"kernel constant a must be positive, got {a}")
        self.a = float(a)
        if order_info is None:
            order_info = OrderInfo(mu=0, nu=2, a=1, gamma=1,
                                   log_singular=False, dimension=3)
        if (order_info.mu, order_info.nu, order_info.dimension) != (0, 2, 3):
            raise ValueError(
                "modified_helmholtz_3d requires (mu, nu, n) = (0, 2, 3)")
        self.order_info = order_info

    def to_json_dict(self):
        return {"family": self.FAMILY, "a": self.a}

    @classmethod
    def from_json_dict(cls, d):
        if d.get("family") != cls.FAMILY:
            raise ValueError(f"unknown kernel family {d.get('family')!r}")
        return cls(d["a"])


def kernel_value(params, x, y):
    """R(x, y) = exp(-a |x-y|) / (4 pi |x-y|) for x != y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = np.linalg.norm(x - y)
    if r < 1e-14 * (1.0 + np.linalg.norm(x)):
        raise CoincidentPointsError(f"|x - y| = {r:.3e} too small")
    return float(np.exp(-params.a * r) / (FOUR_PI * r))


def kernel_matrix(params, targets, sources):
    """Pairwise kernel values, (n_targets, n_sources); no coincidence guard."""
    d = np.asarray(targets)[:, None, :] - np.asarray(sources)[None, :, :]
    r = np.linalg.norm(d, axis=-1)
    return np.exp(-params.a * r) / (FOUR_PI * r)


def singularity_profile(order_info):
    """Kernel singularity class for quadrature-strategy selection."""
    return {
        "gamma": order_info.gamma,
        "logFlag": order_info.log_singular,
        "continuous": order_info.gamma < 0,
    }
