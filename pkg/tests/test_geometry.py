import numpy as np
import pytest

from optfilter.exceptions import NonPositiveRadialError, NonPositiveRadiusError
from optfilter.geometry import (
    build_ball,
    build_star_surface,
    domain_from_json_dict,
    surface_quadrature,
    volume_quadrature,
)

SQRT4PI = np.sqrt(4.0 * np.pi)


@pytest.fixture(scope="module")
def unit_ball():
    return build_ball((0.0, 0.0, 0.0), 1.0)


@pytest.fixture(scope="module")
def star():
    # rho = 1 + 0.1 Y20
    return build_star_surface((0, 0, 0), {(0, 0): SQRT4PI, (2, 0): 0.1})


class TestBall:
    def test_rejects_nonpositive_radius(self):
        with pytest.raises(NonPositiveRadiusError):
            build_ball((0, 0, 0), 0.0)

    def test_area_scales(self):
        surf = surface_quadrature(build_ball((0, 0, 0), 2.0), 16)
        assert surf.area() == pytest.approx(16 * np.pi, rel=1e-10)

    def test_normals_radial(self):
        ball = build_ball((1.0, 0.0, 0.0), 0.5)
        surf = surface_quadrature(ball, 8)
        expected = (surf.nodes - ball.center) / 0.5
        assert np.max(np.abs(surf.normals - expected)) < 1e-12

    def test_unit_area_and_volume(self, unit_ball):
        surf = surface_quadrature(unit_ball, 16)
        vol = volume_quadrature(unit_ball, 16)
        assert surf.area() == pytest.approx(4 * np.pi, rel=1e-10)
        assert vol.volume() == pytest.approx(4 * np.pi / 3, rel=1e-10)

    def test_volume_scaling(self):
        vol = volume_quadrature(build_ball((0, 0, 0), 2.0), 16)
        assert vol.volume() == pytest.approx(32 * np.pi / 3, rel=1e-10)

    def test_second_moment(self, unit_ball):
        vol = volume_quadrature(unit_ball, 16)
        r2 = np.sum(vol.nodes**2, axis=1)
        assert vol.integrate(r2) == pytest.approx(4 * np.pi / 5, rel=1e-10)

    def test_harmonic_orthonormality(self, unit_ball):
        from optfilter.sphharm import real_sph_harm

        surf = surface_quadrature(unit_ball, 16)
        y20 = real_sph_harm(2, 0, surf.theta, surf.phi)
        assert surf.integrate(y20 * y20) == pytest.approx(1.0, abs=1e-10)


class TestStar:
    def test_constant_coefficient_matches_ball(self, unit_ball):
        trivial = build_star_surface((0, 0, 0), {(0, 0): SQRT4PI})
        s1 = surface_quadrature(trivial, 16)
        s2 = surface_quadrature(unit_ball, 16)
        assert s1.area() == pytest.approx(s2.area(), rel=1e-10)
        assert volume_quadrature(trivial, 16).volume() == pytest.approx(
            volume_quadrature(unit_ball, 16).volume(), rel=1e-10)

    def test_area_exceeds_sphere_and_matches_riemann(self, star):
        surf = surface_quadrature(star, 32)
        assert surf.area() > 4 * np.pi
        # dense midpoint Riemann oracle on a 512x1024 angular grid
        th = (np.arange(512) + 0.5) * np.pi / 512
        ph = np.arange(1024) * 2 * np.pi / 1024
        T, P = np.meshgrid(th, ph, indexing="ij")
        rho, drt, drp = star.rho_grad(T.ravel(), P.ravel())
        st = np.sin(T.ravel())
        jac = rho * np.sqrt(rho**2 + drt**2 + (drp / st) ** 2) * st
        riemann = np.sum(jac) * (np.pi / 512) * (2 * np.pi / 1024)
        assert surf.area() == pytest.approx(riemann, rel=1e-4)

    def test_spectral_self_convergence(self, star):
        a16 = surface_quadrature(star, 16).area()
        a32 = surface_quadrature(star, 32).area()
        assert abs(a16 - a32) <= 1e-8

    def test_negative_radial_rejected(self):
        with pytest.raises(NonPositiveRadialError):
            build_star_surface((0, 0, 0), {(0, 0): 0.5 * SQRT4PI,
                                           (2, 0): -4.0})

    def test_normals_point_outward(self, star):
        surf = surface_quadrature(star, 16)
        radial = surf.nodes - star.center
        radial /= np.linalg.norm(radial, axis=1, keepdims=True)
        assert np.min(np.sum(surf.normals * radial, axis=1)) > 0.0


class TestInvariants:
    @pytest.mark.parametrize("shape", ["ball", "star"])
    def test_divergence_theorem(self, shape, unit_ball, star):
        domain = unit_ball if shape == "ball" else star
        surf = surface_quadrature(domain, 16)
        vol = volume_quadrature(domain, 16)
        lhs = 3.0 * vol.volume()
        rhs = surf.integrate(np.sum(surf.nodes * surf.normals, axis=1))
        assert lhs == pytest.approx(rhs, abs=1e-8)

    @pytest.mark.parametrize("order", [4, 8, 16, 24])
    def test_weights_positive(self, order, star):
        assert np.all(surface_quadrature(star, order).weights > 0)
        assert np.all(volume_quadrature(star, order).weights > 0)

    def test_normal_unit_length(self, star):
        surf = surface_quadrature(star, 16)
        assert np.max(np.abs(np.linalg.norm(surf.normals, axis=1) - 1.0)) \
            < 1e-12

    def test_normal_field_continuity(self, star):
        for order in (8, 16, 32):
            surf = surface_quadrature(star, order)
            n_theta, n_phi = order, 2 * order
            grid = surf.normals.reshape(n_theta, n_phi, 3)
            dphi = np.linalg.norm(np.diff(grid, axis=1), axis=2)
            dtheta = np.linalg.norm(np.diff(grid, axis=0), axis=2)
            gap = max(dphi.max(), dtheta.max())
            assert gap <= 10.0 / order


def test_domain_json_roundtrip(unit_ball, star):
    for dom in (unit_ball, star):
        back = domain_from_json_dict(dom.to_json_dict())
        assert back.kind == dom.kind
        theta = np.array([0.3, 1.2, 2.4])
        phi = np.array([0.1, 3.3, 5.0])
        assert np.allclose(back.rho(theta, phi), dom.rho(theta, phi))
