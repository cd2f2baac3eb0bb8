"""Exception types shared across the toolkit."""


class TorusDynError(Exception):
    """Base class for every error raised by this package."""


class GeometryError(TorusDynError, ValueError):
    """Geometric precondition violated (bad radius, empty request, probe placement)."""


class OrientationError(TorusDynError, ValueError):
    """Jacobian with non-positive determinant where orientation preservation is required."""


class DegenerateMatrixError(TorusDynError, ValueError):
    """Matrix too close to singular for a dilatation ratio to be meaningful."""


class BoundaryError(TorusDynError, ValueError):
    """Disk value at or beyond the unit circle."""


class InversionError(TorusDynError, RuntimeError):
    """Map inversion did not produce a valid preimage."""


class FamilyError(TorusDynError, ValueError):
    """Domain family is structurally unusable for the requested operation."""


class FitError(TorusDynError, ValueError):
    """Regression input is degenerate (zero counts, too few samples)."""


class ConfigError(TorusDynError, ValueError):
    """Run configuration could not be parsed or validated."""
