"""Exception and warning types shared across the package."""


class JostspecError(Exception):
    """Base class for all package errors."""


class ValidationError(JostspecError):
    """Malformed input: bad shapes, ranges, or configuration keys."""


class CoefficientError(JostspecError):
    """A coefficient evaluation produced an inadmissible value (a_n <= 0)."""


class SingularCoefficientError(JostspecError):
    """Division by a vanishing off-diagonal coefficient."""


class BandEdgeError(JostspecError):
    """Real energy sits on a band edge (|discriminant| = 2)."""


class DegenerateBranchError(JostspecError):
    """Floquet branch cannot be selected (discriminant derivative vanishes,
    or the two eigenvalue moduli coincide off the real axis)."""


class EigenvectorDegeneracyError(JostspecError):
    """Monodromy corner entry C vanishes; the boundary eigenvector degenerates."""


class DiagonalizationError(JostspecError):
    """A renormalized transfer block has no usable eigenbasis at this energy."""

    def __init__(self, message, n=None, zeta=None):
        super().__init__(message)
        self.n = n
        self.zeta = zeta


class ZeroJostError(JostspecError):
    """Jost boundary value u_0 vanished; signals numerical failure off the axis."""


class OracleConvergenceError(JostspecError):
    """Periodic-tail resolvent fixed point could not be certified."""


class NoAdmissibleIntervalError(JostspecError):
    """Margin exclusions left no admissible subinterval."""


class DensityDomainError(JostspecError):
    """Log-density integrand hit a nonpositive value at a quadrature node."""


class RootCountWarning(UserWarning):
    """Band-edge scan found an unexpected number of |discriminant| = 2 roots
    (closed gaps produce double roots invisible to a sign scan)."""
