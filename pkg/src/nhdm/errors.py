"""Exception hierarchy for nhdm.

Every error raised on purpose by the library derives from :class:`NHDMError`,
so callers (and the CLI) can separate numerical failures from programming
errors.
"""


class NHDMError(Exception):
    """Base class for all library errors."""


class DimensionError(NHDMError, ValueError):
    """Non-square input or incompatible operand shapes."""


class SingularMatrix(NHDMError):
    """Matrix is not invertible within tolerance."""

    def __init__(self, det, message=None):
        self.det = float(abs(det))
        super().__init__(message or f"matrix is singular (|det| = {self.det:.3e})")


class DefectiveMatrix(NHDMError):
    """Matrix is not diagonalizable within tolerance."""


class DomainError(NHDMError, ValueError):
    """A scalar function or parameter is outside its domain."""

    def __init__(self, message, value=None):
        self.value = value
        super().__init__(message)


class NotPSD(NHDMError):
    def __init__(self, min_eig):
        self.min_eig = float(min_eig)
        super().__init__(f"matrix is not positive semidefinite (min eigenvalue {self.min_eig:.3e})")


class TraceNotOne(NHDMError):
    def __init__(self, trace):
        self.trace = complex(trace)
        super().__init__(f"trace must be 1, got {self.trace:.12g}")


class PropertyPIError(NHDMError):
    """R^dagger R is not invertible."""


class IntertwiningViolation(NHDMError):
    def __init__(self, residual):
        self.residual = float(residual)
        super().__init__(f"intertwining relation violated (residual {self.residual:.3e})")


class SpanError(NHDMError):
    def __init__(self, residual):
        self.residual = float(residual)
        super().__init__(f"vector lies outside the span of the family (residual {self.residual:.3e})")


class RMismatch(NHDMError):
    """Convex combination of deformed states built on different R."""


class ExceptionalPoint(NHDMError):
    def __init__(self, eigenvalue, message=None):
        self.eigenvalue = complex(eigenvalue)
        super().__init__(message or f"exceptional point: eigenvalues coalesce at {self.eigenvalue:.12g}")


class OutOfRegion(NHDMError, ValueError):
    """Parameter outside the region where a construction is defined."""


class ComplexSpectrum(NHDMError, ValueError):
    """A real spectrum was required but complex eigenvalues were given."""


class BrokenRegion(NHDMError, ValueError):
    """Closed form requires the unbroken region (1 + 2 a1 a2 >= 0)."""


class NoSolution(NHDMError, ValueError):
    """No parameter value satisfies the requested condition."""
