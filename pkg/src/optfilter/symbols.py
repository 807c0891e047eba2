"""Constant-coefficient operator symbols and ellipticity audits.

Symbols are real polynomials p(xi) over R^n stored as sparse multi-index
tables. The audits sample three hypotheses on the operator pair:
invertibility with <xi>^{-order} inverse decay, upper half-plane root
counts of q(xi', z), and the boundedness away from zero of the boundary
residue determinant (Shapiro-Lopatinskii).
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .exceptions import (
    NotSmallerError,
    OrderParityError,
    RealRootError,
    WrongCountError,
    ZeroOnGridError,
)
from .sphharm import fibonacci_sphere

DEFAULT_EPS0 = 1e-8
# small radii included so symbols vanishing at xi = 0 (e.g. |xi|^2) are
# caught: with constant coefficients "large |x| + |xi|" covers every xi
DEFAULT_RADII = (1e-6, 1e-4, 1e-2, 1.0, 10.0, 100.0, 1000.0)


class SymbolPoly:
    """Polynomial symbol sum_alpha c_alpha xi^alpha of even order."""

    def __init__(self, coefficients, order, dimension):
        if dimension < 2:
            raise ValueError("dimension must be >= 2")
        if order < 0 or order % 2 != 0:
            raise OrderParityError(
                f"symbol order must be even and nonnegative, got {order}")
        coeffs = {}
        for alpha, c in dict(coefficients).items():
            alpha = tuple(int(k) for k in alpha)
            if len(alpha) != dimension:
                raise ValueError(f"multi-index {alpha} has wrong length")
            if any(k < 0 for k in alpha):
                raise ValueError(f"negative entry in multi-index {alpha}")
            if sum(alpha) > order:
                raise ValueError(f"|{alpha}| exceeds declared order {order}")
            if c != 0.0:
                coeffs[alpha] = float(c)
        if order > 0 or coeffs:
            top = [a for a in coeffs if sum(a) == order]
            if not top:
                raise ValueError(
                    "no nonzero coefficient at the declared order")
        self.coefficients = coeffs
        self.order = int(order)
        self.dimension = int(dimension)

    def __call__(self, xi):
        """Evaluate at one point or an (N, n) array of points."""
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        out = np.zeros(xi.shape[0])
        for alpha, c in self.coefficients.items():
            term = np.full(xi.shape[0], c)
            for k, power in enumerate(alpha):
                if power:
                    term *= xi[:, k] ** power
            out += term
        return out if out.size > 1 else float(out[0])

    def z_poly(self, xi_prime):
        """Coefficients of z -> p(xi', z) in ascending powers of z."""
        xi_prime = np.asarray(xi_prime, dtype=float)
        out = np.zeros(self.order + 1)
        for alpha, c in self.coefficients.items():
            term = c
            for k in range(self.dimension - 1):
                if alpha[k]:
                    term *= xi_prime[k] ** alpha[k]
            out[alpha[-1]] += term
        return out

    def to_json_dict(self):
        return {
            "dimension": self.dimension,
            "order": self.order,
            "terms": [{"alpha": list(a), "coeff": c}
                      for a, c in sorted(self.coefficients.items())],
        }

    @classmethod
    def from_json_dict(cls, d):
        coeffs = {tuple(t["alpha"]): t["coeff"] for t in d["terms"]}
        return cls(coeffs, d["order"], d["dimension"])

    @classmethod
    def helmholtz(cls, dimension, shift=1.0):
        """|xi|^2 + shift (the md-elliptic model symbol for shift > 0)."""
        coeffs = {tuple(0 for _ in range(dimension)): shift}
        for k in range(dimension):
            alpha = [0] * dimension
            alpha[k] = 2
            coeffs[tuple(alpha)] = 1.0
        return cls(coeffs, 2, dimension)


@dataclass(frozen=True)
class OrderInfo:
    """Order arithmetic of the pair (P, Q): a = (nu-mu)/2, gamma = n+mu-nu."""

    mu: int
    nu: int
    a: int
    gamma: int
    log_singular: bool
    dimension: int


class _TangentPoly:
    """Plain polynomial in the tangential covariables (no parity gate)."""

    def __init__(self, coeffs):
        self.coeffs = {tuple(int(k) for k in a): float(c)
                       for a, c in coeffs.items() if c != 0.0}

    def __call__(self, xi_prime):
        xi_prime = np.asarray(xi_prime, dtype=float)
        out = 0.0
        for alpha, c in self.coeffs.items():
            term = c
            for k, power in enumerate(alpha):
                if power:
                    term *= xi_prime[k] ** power
            out += term
        return out


@dataclass
class BoundarySymbol:
    """Boundary operator symbol b(xi', z) = sum_j b_j(xi') z^j of order rho.

    z_terms maps the z-power j to the principal symbol of the coefficient
    operator: a plain number for constants, or any callable of xi'.
    """

    rho: int
    z_terms: dict

    def scaled_coefficients(self, xi_prime, chi):
        """b_j(xi') chi^{j - rho} for each z-power j present."""
        out = {}
        for j, sym in self.z_terms.items():
            val = sym(xi_prime) if callable(sym) else complex(sym)
            out[j] = val * chi ** (j - self.rho)
        return out

    @classmethod
    def dirichlet(cls, j):
        """The trace symbol z^j (normal derivative of order j)."""
        return cls(rho=j, z_terms={j: 1.0})

    @classmethod
    def from_json_dict(cls, d):
        z_terms = {}
        for t in d["z_terms"]:
            terms = t.get("terms")
            if terms is None:
                z_terms[int(t["power"])] = float(t["coeff"])
            else:
                coeffs = {tuple(e["alpha"]): e["coeff"] for e in terms}
                z_terms[int(t["power"])] = _TangentPoly(coeffs)
        return cls(rho=int(d["rho"]), z_terms=z_terms)


@dataclass
class EllipticityReport:
    md_elliptic: bool = False
    worst_ratio: float = np.inf
    upper_root_counts: dict = field(default_factory=dict)
    sl_min_det: float = np.nan
    sl_max_det: float = np.nan

    def to_json_dict(self):
        return {
            "mdElliptic": bool(self.md_elliptic),
            "worstRatio": float(self.worst_ratio),
            "upperRootCounts": {k: int(v)
                                for k, v in self.upper_root_counts.items()},
            "slMinDet": float(self.sl_min_det),
            "slMaxDet": float(self.sl_max_det),
        }


def derive_orders(p, q, n):
    """Order bookkeeping for the pair (P, Q) in dimension n."""
    if p.dimension != n or q.dimension != n:
        raise ValueError("symbol dimensions do not match n")
    mu, nu = p.order, q.order
    if mu >= nu:
        raise NotSmallerError(f"require mu < nu, got mu={mu}, nu={nu}")
    if (nu - mu) % 2 != 0:
        raise OrderParityError(f"nu - mu = {nu - mu} is odd")
    a = (nu - mu) // 2
    gamma = n + mu - nu
    log_singular = (n % 2 == 0) and (nu > n)
    return OrderInfo(mu=mu, nu=nu, a=a, gamma=gamma,
                     log_singular=log_singular, dimension=n)


def _sphere_directions(n_dim, count):
    if n_dim == 2:
        ang = np.pi * (2.0 * np.arange(count) + 1.0) / count
        return np.column_stack([np.cos(ang), np.sin(ang)])
    if n_dim == 3:
        return fibonacci_sphere(count)
    rng = np.random.default_rng(20240 + n_dim)
    v = rng.standard_normal((count, n_dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def check_md_ellipticity(q, radii=DEFAULT_RADII, directions=64,
                         eps0=DEFAULT_EPS0):
    """Sample |q(xi)| <xi>^{-nu} >= eps0 over shells of |xi|.

    Returns a partial EllipticityReport with md_elliptic and worst_ratio
    (the largest observed <xi>^nu / |q(xi)|).
    """
    radii = tuple(float(r) for r in radii)
    if any(r2 <= r1 for r1, r2 in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    if max(radii) < 1e3:
        raise ValueError("largest sample radius must be >= 1e3")
    if directions < 50:
        raise ValueError("need at least 50 sphere directions")
    dirs = _sphere_directions(q.dimension, directions)
    worst = 0.0
    ok = True
    for r in radii:
        xi = r * dirs
        qv = np.abs(q(xi))
        if np.any(qv == 0.0):
            raise ZeroOnGridError(xi[np.argmin(qv)])
        bracket = (1.0 + r * r) ** (q.order / 2.0)
        ratio = np.max(bracket / qv)
        worst = max(worst, ratio)
        if np.min(qv / bracket) < eps0:
            ok = False
    return EllipticityReport(md_elliptic=ok, worst_ratio=worst)


def upper_half_roots(q, xi_prime):
    """Roots of z -> q(xi', z) with positive imaginary part.

    Raises RealRootError when a root is numerically real and
    WrongCountError when the upper count differs from order/2.
    """
    coeffs = q.z_poly(np.asarray(xi_prime, dtype=float))
    if coeffs[-1] == 0.0:
        raise ValueError("leading z-coefficient vanishes; symbol not "
                         "normal with respect to the boundary")
    roots = np.roots(coeffs[::-1])
    for z in roots:
        if abs(z.imag) < 1e-10 * (1.0 + abs(z)):
            raise RealRootError(f"real root z = {z:.6g} at xi' = "
                                f"{tuple(np.ravel(xi_prime))}")
    upper = sorted((z for z in roots if z.imag > 0),
                   key=lambda z: (z.real, z.imag))
    if 2 * len(upper) != q.order:
        raise WrongCountError(
            f"{len(upper)} upper roots, expected {q.order // 2}")
    return upper


def _residue_matrix(q, boundary_ops, xi_prime):
    nu_half = q.order // 2
    taus = upper_half_roots(q, xi_prime)
    chi = float(np.sqrt(1.0 + np.dot(xi_prime, xi_prime)))
    q_plus = npoly.polyfromroots([t / chi for t in taus])
    rows = np.zeros((nu_half, nu_half), dtype=complex)
    for m, bop in enumerate(boundary_ops):
        scaled = bop.scaled_coefficients(xi_prime, chi)
        b_coeffs = np.zeros(max(scaled) + 1, dtype=complex)
        for j, c in scaled.items():
            b_coeffs[j] = c
        b_coeffs = npoly.polytrim(b_coeffs, tol=0.0)
        if len(b_coeffs) >= len(q_plus):
            _, rem = npoly.polydiv(b_coeffs, q_plus)
        else:
            rem = b_coeffs
        rows[m, :len(rem)] = rem[:nu_half]
    return rows


def lopatinskii_check(q, boundary_ops, xi_prime_samples):
    """(min, max) over samples of |det (r_mj)|, the residue coefficients
    of the chi-scaled boundary symbols modulo q+(z)."""
    if 2 * len(boundary_ops) != q.order:
        raise ValueError(
            f"need exactly {q.order // 2} boundary operators, "
            f"got {len(boundary_ops)}")
    dets = []
    for xi_prime in xi_prime_samples:
        xi_prime = np.asarray(xi_prime, dtype=float)
        rows = _residue_matrix(q, boundary_ops, xi_prime)
        dets.append(abs(np.linalg.det(rows)))
    return float(np.min(dets)), float(np.max(dets))


def full_report(q, boundary_ops, radii=DEFAULT_RADII, directions=64,
                xi_prime_samples=None, eps0=DEFAULT_EPS0):
    """All three audits combined into one EllipticityReport."""
    report = check_md_ellipticity(q, radii=radii, directions=directions,
                                  eps0=eps0)
    if xi_prime_samples is None:
        dirs = _sphere_directions(q.dimension - 1, max(16, directions // 4))
        xi_prime_samples = [r * d for r in (1.0, 3.0, 10.0, 100.0)
                            for d in dirs[:8]]
    counts = {}
    for xi_prime in xi_prime_samples:
        xi_prime = np.asarray(xi_prime, dtype=float)
        key = "(" + ",".join(f"{v:.6g}" for v in xi_prime) + ")"
        counts[key] = len(upper_half_roots(q, xi_prime))
    report.upper_root_counts = counts
    report.sl_min_det, report.sl_max_det = lopatinskii_check(
        q, boundary_ops, xi_prime_samples)
    return report
