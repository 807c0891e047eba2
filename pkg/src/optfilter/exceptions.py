"""Exception and warning types shared across the package."""


class OptFilterError(Exception):
    """Base class for all package errors."""


# --- symbol calculus ---

class OrderParityError(OptFilterError):
    """Operator order is odd (ellipticity requires even orders)."""


class NotSmallerError(OptFilterError):
    """Numerator order must be strictly smaller than denominator order."""


class ZeroOnGridError(OptFilterError):
    """Symbol vanishes exactly at a sample point."""

    def __init__(self, xi, message=None):
        self.xi = xi
        super().__init__(message or f"symbol vanishes at xi = {tuple(xi)}")


class RealRootError(OptFilterError):
    """Characteristic polynomial has a (numerically) real root."""


class WrongCountError(OptFilterError):
    """Upper half-plane root count differs from half the operator order."""


# --- geometry ---

class NonPositiveRadiusError(OptFilterError):
    """Ball radius must be positive."""


class NonPositiveRadialError(OptFilterError):
    """Star-shaped radial function is nonpositive somewhere."""

    def __init__(self, theta, phi, value):
        self.theta = theta
        self.phi = phi
        self.value = value
        super().__init__(
            f"radial function {value:.6g} <= 0 at theta={theta:.6g}, phi={phi:.6g}"
        )


# --- kernels ---

class CoincidentPointsError(OptFilterError):
    """Kernel evaluation at coincident points requested."""


# --- exterior solver ---

class ResidualTooLargeError(OptFilterError):
    """Boundary collocation residual exceeds the configured tolerance."""


class PointInsideDomainError(OptFilterError):
    """Exterior solution evaluated at a point inside the domain."""


class IllConditionedWarning(UserWarning):
    """Collocation system condition estimate above threshold."""


# --- filter assembly ---

class UnsupportedMuError(OptFilterError):
    """Reduction requested for mu > 0; extra boundary conditions required."""

    def __init__(self, mu, extra_condition_count):
        self.mu = mu
        self.extra_condition_count = extra_condition_count
        super().__init__(
            f"mu = {mu} > 0 requires {extra_condition_count} extra boundary "
            "condition(s); only mu = 0 is executable"
        )


class TraceMismatchError(OptFilterError):
    """Exterior solution does not match the boundary trace of the data."""


class TruncationTooSmallError(OptFilterError):
    """Test function support exceeds the exterior truncation ball."""


# --- forward operator ---

class OnSurfaceError(OptFilterError):
    """Layer potential evaluated too close to the surface."""


class NearBoundaryWarning(UserWarning):
    """Evaluation point close to the boundary; quadrature accuracy degrades."""


# --- Sobolev norms ---

class BoxTooSmallError(OptFilterError):
    """Rasterization box does not contain the domain with enough margin."""


class DegenerateNormError(OptFilterError):
    """Norm ratio denominator is numerically zero."""
