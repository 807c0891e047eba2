import numpy as np
import pytest
from numpy.polynomial import polynomial as npoly

from optfilter.exceptions import (
    NotSmallerError,
    OrderParityError,
    RealRootError,
    ZeroOnGridError,
)
from optfilter.symbols import (
    BoundarySymbol,
    SymbolPoly,
    check_md_ellipticity,
    derive_orders,
    lopatinskii_check,
    upper_half_roots,
)


def helmholtz(n=3):
    return SymbolPoly.helmholtz(n)


def laplacian(n=3):
    coeffs = {}
    for k in range(n):
        alpha = [0] * n
        alpha[k] = 2
        coeffs[tuple(alpha)] = 1.0
    return SymbolPoly(coeffs, 2, n)


def bilaplacian_shifted(n=3):
    """(|xi|^2 + 1)^2 expanded."""
    coeffs = {tuple([0] * n): 1.0}
    for i in range(n):
        a = [0] * n
        a[i] = 2
        coeffs[tuple(a)] = 2.0
        a = [0] * n
        a[i] = 4
        coeffs[tuple(a)] = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            a = [0] * n
            a[i] = 2
            a[j] = 2
            coeffs[tuple(a)] = 2.0
    return SymbolPoly(coeffs, 4, n)


def identity_symbol(n=3):
    return SymbolPoly({tuple([0] * n): 1.0}, 0, n)


class TestOrders:
    def test_model_pair(self):
        info = derive_orders(identity_symbol(), helmholtz(), 3)
        assert (info.mu, info.nu, info.a, info.gamma) == (0, 2, 1, 1)
        assert info.log_singular is False

    def test_fourth_order_continuous_kernel(self):
        info = derive_orders(identity_symbol(), bilaplacian_shifted(), 3)
        assert info.a == 2
        assert info.gamma == -1

    def test_dimension_two_boundary_case(self):
        info = derive_orders(identity_symbol(2), helmholtz(2), 2)
        assert info.gamma == 0
        assert info.log_singular is False  # nu = n, not nu > n

    def test_gamma_plus_nu_identity(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            n = int(rng.integers(2, 6))
            mu = 2 * int(rng.integers(0, 3))
            nu = mu + 2 * int(rng.integers(1, 4))
            p = SymbolPoly({tuple([mu] + [0] * (n - 1)): 1.0}, mu, n)
            q = SymbolPoly({tuple([nu] + [0] * (n - 1)): 1.0,
                            tuple([0] * n): 1.0}, nu, n)
            info = derive_orders(p, q, n)
            assert info.gamma + info.nu == n + info.mu

    def test_not_smaller(self):
        with pytest.raises(NotSmallerError):
            derive_orders(helmholtz(), helmholtz(), 3)

    def test_odd_order_rejected_at_construction(self):
        with pytest.raises(OrderParityError):
            SymbolPoly({(1, 0, 0): 1.0}, 1, 3)


class TestMdEllipticity:
    def test_shifted_laplacian_passes(self):
        report = check_md_ellipticity(helmholtz())
        assert report.md_elliptic
        assert np.isfinite(report.worst_ratio)

    def test_laplacian_fails_near_origin(self):
        report = check_md_ellipticity(laplacian())
        assert not report.md_elliptic

    def test_squared_symbol_ratio(self):
        report = check_md_ellipticity(bilaplacian_shifted())
        assert report.md_elliptic
        assert report.worst_ratio <= 1.0 + 1e-12

    def test_zero_on_grid(self):
        # xi_3^2 vanishes exactly on the equatorial sample of an odd
        # Fibonacci lattice
        q = SymbolPoly({(0, 0, 2): 1.0}, 2, 3)
        with pytest.raises(ZeroOnGridError):
            check_md_ellipticity(q, directions=65)

    def test_radii_validation(self):
        with pytest.raises(ValueError):
            check_md_ellipticity(helmholtz(), radii=(1.0, 1.0, 1e3))
        with pytest.raises(ValueError):
            check_md_ellipticity(helmholtz(), radii=(1.0, 10.0))


class TestUpperRoots:
    def test_off_axis_sample(self):
        roots = upper_half_roots(helmholtz(), (1.0, 0.0))
        assert len(roots) == 1
        assert roots[0] == pytest.approx(1j * np.sqrt(2.0), abs=1e-12)

    def test_origin_sample(self):
        roots = upper_half_roots(helmholtz(), (0.0, 0.0))
        assert roots[0] == pytest.approx(1j, abs=1e-12)

    def test_laplacian_double_real_root(self):
        with pytest.raises(RealRootError):
            upper_half_roots(laplacian(), (0.0, 0.0))

    def test_conjugate_symmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            shift = float(rng.uniform(0.5, 4.0))
            q = SymbolPoly.helmholtz(3, shift=shift)
            xi_prime = rng.uniform(-3, 3, size=2)
            coeffs = q.z_poly(xi_prime)
            roots = np.roots(coeffs[::-1])
            upper = np.sum(roots.imag > 0)
            lower = np.sum(roots.imag < 0)
            assert upper == lower == q.order // 2
            # conjugation pairs the two half-planes
            up = sorted(z for z in roots if z.imag > 0)
            low = sorted(np.conj(z) for z in roots if z.imag < 0)
            assert np.allclose(up, low)


class TestLopatinskii:
    SAMPLES = [(0.0, 0.0), (1.0, 0.0), (0.3, -2.0), (10.0, 5.0)]

    def test_dirichlet_determinant_is_one(self):
        lo, hi = lopatinskii_check(helmholtz(),
                                   [BoundarySymbol.dirichlet(0)],
                                   self.SAMPLES)
        assert lo == pytest.approx(1.0, abs=1e-10)
        assert hi == pytest.approx(1.0, abs=1e-10)

    def test_factor_of_qplus_degenerates(self):
        # b = z - i chi^{-1} tau_1 is q+ itself, so its residue vanishes
        bad = BoundarySymbol(
            rho=1,
            z_terms={1: 1.0,
                     0: lambda xi: -1j * np.sqrt(1.0 + np.dot(xi, xi))})
        lo, _ = lopatinskii_check(helmholtz(), [bad], self.SAMPLES)
        assert lo == pytest.approx(0.0, abs=1e-12)

    def test_double_root_dirichlet_pair(self):
        ops = [BoundarySymbol.dirichlet(0), BoundarySymbol.dirichlet(1)]
        lo, hi = lopatinskii_check(bilaplacian_shifted(), ops,
                                   [(0.0, 0.0)])
        assert lo == pytest.approx(1.0, abs=1e-12)
        assert hi == pytest.approx(1.0, abs=1e-12)

    def test_wrong_operator_count(self):
        with pytest.raises(ValueError):
            lopatinskii_check(bilaplacian_shifted(),
                              [BoundarySymbol.dirichlet(0)], self.SAMPLES)

    def test_determinant_scales_linearly(self):
        rng = np.random.default_rng(5)
        base = BoundarySymbol(rho=0, z_terms={0: 1.0, 1: 0.3})
        lo1, hi1 = lopatinskii_check(helmholtz(), [base], self.SAMPLES)
        for _ in range(5):
            c = float(rng.uniform(0.1, 9.0))
            scaled = BoundarySymbol(rho=0, z_terms={0: c, 1: 0.3 * c})
            lo2, hi2 = lopatinskii_check(helmholtz(), [scaled], self.SAMPLES)
            assert lo2 == pytest.approx(c * lo1, rel=1e-12)
            assert hi2 == pytest.approx(c * hi1, rel=1e-12)

    def test_polynomial_division_reconstructs(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            xi_prime = rng.uniform(-2, 2, size=2)
            q = bilaplacian_shifted()
            taus = upper_half_roots(q, xi_prime)
            chi = np.sqrt(1.0 + xi_prime @ xi_prime)
            q_plus = npoly.polyfromroots([t / chi for t in taus])
            b = rng.uniform(-1, 1, size=4) + 0j
            quot, rem = npoly.polydiv(b, q_plus)
            for z in rng.uniform(-3, 3, size=20) + 1j * rng.uniform(-3, 3, 20):
                lhs = npoly.polyval(z, b)
                rhs = (npoly.polyval(z, quot) * npoly.polyval(z, q_plus)
                       + npoly.polyval(z, rem))
                assert abs(lhs - rhs) <= 1e-12 * (1.0 + abs(lhs))


def test_symbol_json_roundtrip():
    q = helmholtz()
    q2 = SymbolPoly.from_json_dict(q.to_json_dict())
    assert q2.coefficients == q.coefficients
    assert (q2.order, q2.dimension) == (q.order, q.dimension)
