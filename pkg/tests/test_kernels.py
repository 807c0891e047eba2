import numpy as np
import pytest

from optfilter.exceptions import CoincidentPointsError
from optfilter.kernels import KernelParams, kernel_value, singularity_profile
from optfilter.symbols import OrderInfo

FOUR_PI = 4.0 * np.pi


def info(mu, nu, n):
    return OrderInfo(mu=mu, nu=nu, a=(nu - mu) // 2, gamma=n + mu - nu,
                     log_singular=(n % 2 == 0 and nu > n), dimension=n)


def test_unit_separation_value():
    k = KernelParams(1.0)
    v = kernel_value(k, (0, 0, 0), (1, 0, 0))
    assert v == pytest.approx(np.exp(-1.0) / FOUR_PI, rel=1e-12)
    assert v == pytest.approx(0.02927459, abs=1e-8)


def test_newtonian_limit():
    k = KernelParams(1e-8)
    v = kernel_value(k, (0, 0, 0), (0, 0, 1))
    assert v == pytest.approx(1.0 / FOUR_PI, abs=1e-7)


def test_symmetry_exact():
    k = KernelParams(0.7)
    rng = np.random.default_rng(9)
    for _ in range(100):
        x, y = rng.uniform(-2, 2, size=(2, 3))
        assert kernel_value(k, x, y) == kernel_value(k, y, x)


def test_coincident_points():
    k = KernelParams(1.0)
    with pytest.raises(CoincidentPointsError):
        kernel_value(k, (1.0, 0, 0), (1.0, 0, 0))


def test_positive_a_required():
    with pytest.raises(ValueError):
        KernelParams(0.0)


def test_singularity_strength():
    # r * R -> 1/(4 pi) as r -> 0
    k = KernelParams(2.0)
    for r in (1e-2, 1e-4, 1e-6):
        v = r * kernel_value(k, (0, 0, 0), (r, 0, 0))
        assert abs(v - 1.0 / FOUR_PI) / (1.0 / FOUR_PI) <= 2.0 * k.a * r


def test_annihilated_by_operator():
    # (-Laplace_x + a^2) R(x, y) = 0 away from the diagonal, checked by
    # second-order central differences
    k = KernelParams(1.3)
    rng = np.random.default_rng(4)
    h = 1e-4
    for _ in range(20):
        x = rng.uniform(-1, 1, size=3)
        y = x + rng.uniform(0.5, 1.5) * _unit(rng)
        lap = 0.0
        for axis in range(3):
            e = np.zeros(3)
            e[axis] = h
            lap += (kernel_value(k, x + e, y) - 2 * kernel_value(k, x, y)
                    + kernel_value(k, x - e, y)) / h**2
        residual = -lap + k.a**2 * kernel_value(k, x, y)
        assert abs(residual) <= 1e-4 * abs(kernel_value(k, x, y)) \
            / np.linalg.norm(x - y) ** 2 + 1e-4 * abs(kernel_value(k, x, y))


def _unit(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def test_monotone_decay():
    k = KernelParams(0.9)
    radii = np.linspace(0.1, 5.0, 40)
    vals = [kernel_value(k, (0, 0, 0), (r, 0, 0)) for r in radii]
    assert np.all(np.diff(vals) < 0)


class TestSingularityProfile:
    def test_model_case(self):
        p = singularity_profile(info(0, 2, 3))
        assert p == {"gamma": 1, "logFlag": False, "continuous": False}

    def test_continuous_kernel(self):
        p = singularity_profile(info(0, 4, 3))
        assert p["gamma"] == -1
        assert p["continuous"]

    def test_even_dimension_boundary_case(self):
        p = singularity_profile(info(0, 4, 4))
        assert p["gamma"] == 0
        assert p["logFlag"] is False


def test_kernel_family_consistency():
    with pytest.raises(ValueError):
        KernelParams(1.0, order_info=info(0, 4, 3))


def test_json_roundtrip():
    k = KernelParams(2.5)
    back = KernelParams.from_json_dict(k.to_json_dict())
    assert back.a == k.a
