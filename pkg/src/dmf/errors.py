"""Exception hierarchy shared by every module of the package."""


class DMFError(Exception):
    """Base class for all package errors."""


class InvalidInputError(DMFError, ValueError):
    """Input is malformed: wrong shape, non-finite entries, bad index."""


class SingularMatrixError(DMFError, ArithmeticError):
    """Matrix is numerically singular; ``det`` carries the determinant estimate."""

    def __init__(self, det, message=None):
        self.det = float(det)
        super().__init__(message or f"matrix is singular (det={self.det:.3e})")


class WindowTooShortError(DMFError, IndexError):
    """A stencil needs lattice indices that the data does not cover."""

    def __init__(self, required, available, what="series"):
        self.required = tuple(required)
        self.available = tuple(available)
        super().__init__(
            f"{what} covers n in [{available[0]}, {available[1]}] but "
            f"n in [{required[0]}, {required[1]}] is required"
        )


class AdmissibilityError(DMFError, ValueError):
    """The data leaves the domain on which the moving frame is defined."""

    def __init__(self, n, reason):
        self.n = int(n)
        super().__init__(f"inadmissible window at n={self.n}: {reason}")


class ParameterError(DMFError, ValueError):
    """Closed-form parameters violate their stated domain."""


class BranchError(DMFError, ArithmeticError):
    """A recurrence left the half-space branch (e.g. kappa <= 1 for scaling)."""

    def __init__(self, n, reason):
        self.n = int(n)
        super().__init__(f"branch violation at n={self.n}: {reason}")


class InconsistentConstantsError(DMFError, ValueError):
    """Conservation constants disagree with the supplied invariants."""


class ConsistencyError(DMFError, ValueError):
    """State is inconsistent with the constants it is paired with."""


class StepFailureError(DMFError, RuntimeError):
    """The elastica Newton step did not converge.

    ``partial`` is filled in by :func:`dmf.solvers.elastica_run` with the
    output produced before the failure.
    """

    def __init__(self, n, residual, message=None):
        self.n = int(n)
        self.residual = float(residual)
        self.partial = None
        super().__init__(message or f"step to n={self.n} failed (residual {self.residual:.3e})")


class IntegrationFailureError(DMFError, RuntimeError):
    """Adaptive integration could not proceed (step size underflow)."""

    def __init__(self, s, h):
        self.s = float(s)
        self.h = float(h)
        super().__init__(f"step size underflow at s={self.s:.6g} (h={self.h:.3e})")


class ComparisonError(DMFError, ValueError):
    """Two curves cannot be compared (e.g. no overlapping arc length)."""


class ConfigError(DMFError, ValueError):
    """Invalid command line or configuration file."""
