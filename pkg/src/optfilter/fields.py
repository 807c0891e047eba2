"""Analytic source fields f and smooth compactly supported test functions.

Every field carries value / gradient / (-Laplace + a^2) callbacks in
closed form, since the assembled filter consumes the interior density
(-Laplace + a^2) f and the flux df/dn; numerical differentiation would
contaminate the verification path.
"""

import numpy as np


def _pts(x):
    return np.atleast_2d(np.asarray(x, dtype=float))


class SourceField:
    """Base class; subclasses implement value / gradient / laplacian."""

    family = None

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def laplacian(self, x):
        raise NotImplementedError

    def qf(self, x, a):
        """(-Laplace + a^2) f at x."""
        return -self.laplacian(x) + a * a * self.value(x)

    def to_json_dict(self):
        raise NotImplementedError


class Constant(SourceField):
    family = "constant"

    def __init__(self, value=1.0):
        self.c = float(value)

    def value(self, x):
        return np.full(_pts(x).shape[0], self.c)

    def gradient(self, x):
        return np.zeros_like(_pts(x))

    def laplacian(self, x):
        return np.zeros(_pts(x).shape[0])

    def to_json_dict(self):
        return {"family": "constant", "value": self.c}


class ExpLinear(SourceField):
    """f = exp(b . x) with |b| = a, so that (-Laplace + a^2) f = 0."""

    family = "exp_linear"

    def __init__(self, direction, a):
        d = np.asarray(direction, dtype=float)
        norm = np.linalg.norm(d)
        if norm == 0:
            raise ValueError("direction must be nonzero")
        self.direction = d / norm
        self.a = float(a)
        self.b = self.a * self.direction

    def value(self, x):
        return np.exp(_pts(x) @ self.b)

    def gradient(self, x):
        return self.value(x)[:, None] * self.b

    def laplacian(self, x):
        return float(self.b @ self.b) * self.value(x)

    def qf(self, x, a):
        # a^2 - |b|^2 vanishes identically when a matches the field's own
        if a == self.a and np.linalg.norm(self.direction) == 1.0:
            return np.zeros(_pts(x).shape[0])
        return super().qf(x, a)

    def to_json_dict(self):
        return {"family": "exp_linear", "direction": list(self.direction)}


class GaussianBump(SourceField):
    family = "gaussian"

    def __init__(self, center, width):
        self.center = np.asarray(center, dtype=float)
        self.width = float(width)

    def value(self, x):
        d = _pts(x) - self.center
        return np.exp(-np.sum(d * d, axis=1) / (2.0 * self.width**2))

    def gradient(self, x):
        d = _pts(x) - self.center
        return -(d / self.width**2) * self.value(x)[:, None]

    def laplacian(self, x):
        d = _pts(x) - self.center
        r2 = np.sum(d * d, axis=1)
        w2 = self.width**2
        return (r2 / w2**2 - 3.0 / w2) * self.value(x)

    def to_json_dict(self):
        return {"family": "gaussian", "center": list(self.center),
                "width": self.width}


class Polynomial(SourceField):
    """sum_alpha c_alpha x^alpha over 3D multi-indices."""

    family = "polynomial"

    def __init__(self, coeffs):
        self.coeffs = {tuple(int(k) for k in a): float(c)
                       for a, c in dict(coeffs).items() if c != 0.0}

    @staticmethod
    def _mono(pts, alpha):
        out = np.ones(pts.shape[0])
        for k, p in enumerate(alpha):
            if p:
                out = out * pts[:, k] ** p
        return out

    def value(self, x):
        pts = _pts(x)
        out = np.zeros(pts.shape[0])
        for alpha, c in self.coeffs.items():
            out += c * self._mono(pts, alpha)
        return out

    def gradient(self, x):
        pts = _pts(x)
        out = np.zeros_like(pts)
        for alpha, c in self.coeffs.items():
            for k in range(3):
                if alpha[k]:
                    da = list(alpha)
                    da[k] -= 1
                    out[:, k] += c * alpha[k] * self._mono(pts, da)
        return out

    def laplacian(self, x):
        pts = _pts(x)
        out = np.zeros(pts.shape[0])
        for alpha, c in self.coeffs.items():
            for k in range(3):
                if alpha[k] >= 2:
                    da = list(alpha)
                    da[k] -= 2
                    out += c * alpha[k] * (alpha[k] - 1) * self._mono(pts, da)
        return out

    def to_json_dict(self):
        return {"family": "polynomial",
                "coeffs": [{"alpha": list(a), "coeff": c}
                           for a, c in sorted(self.coeffs.items())]}


class ScaledSum(SourceField):
    """alpha*f1 + beta*f2 (linearity checks and composite sources)."""

    family = "scaled_sum"

    def __init__(self, parts):
        self.parts = [(float(s), f) for s, f in parts]

    def value(self, x):
        return sum(s * f.value(x) for s, f in self.parts)

    def gradient(self, x):
        return sum(s * f.gradient(x) for s, f in self.parts)

    def laplacian(self, x):
        return sum(s * f.laplacian(x) for s, f in self.parts)


def source_from_json_dict(d, a):
    """Instantiate a field from its JSON form; `a` binds exp_linear."""
    family = d["family"]
    if family == "constant":
        return Constant(d["value"])
    if family == "exp_linear":
        return ExpLinear(d["direction"], a)
    if family == "gaussian":
        return GaussianBump(d["center"], d["width"])
    if family == "polynomial":
        return Polynomial({tuple(t["alpha"]): t["coeff"]
                           for t in d["coeffs"]})
    raise ValueError(f"unknown source family {family!r}")


# --- smooth compactly supported test functions -------------------------

def _bridge(s):
    """C-infinity step: 0 for s <= 0, 1 for s >= 1."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    out[s >= 1.0] = 1.0
    mid = (s > 0.0) & (s < 1.0)
    sm = np.clip(s[mid], 1e-8, 1.0 - 1e-8)
    u = 1.0 / sm - 1.0 / (1.0 - sm)
    with np.errstate(over="ignore"):
        out[mid] = 1.0 / (1.0 + np.exp(u))
    return out


def _bridge_d1_d2(s):
    """First and second derivative of the bridge (zero outside (0, 1))."""
    s = np.asarray(s, dtype=float)
    d1 = np.zeros_like(s)
    d2 = np.zeros_like(s)
    mid = (s > 0.0) & (s < 1.0)
    sm = np.clip(s[mid], 1e-8, 1.0 - 1e-8)
    u = 1.0 / sm - 1.0 / (1.0 - sm)
    up = -1.0 / sm**2 - 1.0 / (1.0 - sm) ** 2
    upp = 2.0 / sm**3 - 2.0 / (1.0 - sm) ** 3
    with np.errstate(over="ignore"):
        sig = 1.0 / (1.0 + np.exp(u))
    w = sig * (1.0 - sig)
    d1[mid] = -w * up
    d2[mid] = w * (1.0 - 2.0 * sig) * up**2 - w * upp
    return d1, d2


class RadialPlateau:
    """phi(x) = 1 for |x-c| <= r_inner, 0 for |x-c| >= r_outer, smooth bridge.

    Provides analytic value, gradient and Laplacian; support is the closed
    ball of radius r_outer about the center.
    """

    def __init__(self, center, r_inner, r_outer):
        if not 0.0 < r_inner < r_outer:
            raise ValueError("need 0 < r_inner < r_outer")
        self.center = np.asarray(center, dtype=float)
        self.r_inner = float(r_inner)
        self.r_outer = float(r_outer)
        self._w = self.r_outer - self.r_inner

    @property
    def support_radius(self):
        return self.r_outer

    def _s(self, t):
        return (self.r_outer - t) / self._w

    def value(self, x):
        t = np.linalg.norm(_pts(x) - self.center, axis=1)
        return _bridge(self._s(t))

    def _profile_d1_d2(self, t):
        d1, d2 = _bridge_d1_d2(self._s(t))
        return -d1 / self._w, d2 / self._w**2

    def gradient(self, x):
        d = _pts(x) - self.center
        t = np.linalg.norm(d, axis=1)
        p1, _ = self._profile_d1_d2(t)
        safe = np.where(t > 0, t, 1.0)
        return (p1 / safe)[:, None] * d

    def laplacian(self, x):
        d = _pts(x) - self.center
        t = np.linalg.norm(d, axis=1)
        p1, p2 = self._profile_d1_d2(t)
        safe = np.where(t > 0, t, 1.0)
        return p2 + 2.0 * p1 / safe

    def q_apply(self, x, a):
        """(-Laplace + a^2) phi."""
        return -self.laplacian(x) + a * a * self.value(x)
