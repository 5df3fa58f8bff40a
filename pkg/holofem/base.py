"""
Exceptions and shared containers used across :mod:`holofem`.

Everything raised on purpose by the library extends
:class:`HolofemException`. Input problems raise :class:`InvalidArgument`
(also a :class:`ValueError`); failures of the numerics extend
:class:`NumericalError`, which the command line maps to exit status 2.
"""
from typing import Optional

from addict import Dict as AttrDict


class HolofemException(Exception):
    """Base class for all exceptions in this package"""


class InvalidArgument(HolofemException, ValueError):
    """Raised when an argument is out of range or inconsistent."""


class ImproperConfiguration(HolofemException):
    """Raised when a configuration file or option value is invalid."""


class MeshError(HolofemException):
    """Base class for mesh input errors."""


class MeshParseError(MeshError):
    """Raised when a mesh file cannot be parsed.

    Args:
        message: Description of the problem.
        lineno: 1-based line number in the file.
    """

    def __init__(self, message: str, lineno: Optional[int] = None):
        self.lineno = lineno
        if lineno is not None:
            message = "line %d: %s" % (lineno, message)
        super().__init__(message)


class MeshValidationError(MeshError):
    """Raised when mesh data is inconsistent (counts, indices, areas)."""


class DegenerateElement(HolofemException):
    """Raised when a triangle has zero area."""

    def __init__(self, message: str, element: Optional[int] = None):
        self.element = element
        super().__init__(message)


class EmptySystem(HolofemException):
    """Raised when a mesh has no interior degrees of freedom."""


class NumericalError(HolofemException):
    """Base class for failures of the numerical methods."""


class NearSingularError(NumericalError):
    """Raised when a factorization meets a pivot below the threshold.

    Args:
        message: Description of the problem.
        pivot: Position of the pivot in elimination order, if known.
        dof: Original row/column index of that pivot, if known.
    """

    def __init__(
        self, message: str, pivot: Optional[int] = None, dof: Optional[int] = None
    ):
        self.pivot = pivot
        self.dof = dof
        super().__init__(message)


class EigenvalueProximityError(NumericalError):
    """Raised when a shift is numerically an eigenvalue of the pencil."""

    def __init__(self, z: complex):
        self.z = z
        super().__init__("shift %r is too close to an eigenvalue" % (z,))


class ContourCollisionError(NumericalError):
    """Raised when a quadrature node of a contour hits an eigenvalue."""

    def __init__(self, z: complex, center: complex, radius: float):
        self.z = z
        self.center = center
        self.radius = radius
        super().__init__(
            "contour node %r (center %r, radius %g) hits an eigenvalue"
            % (z, center, radius)
        )


class AmbiguousTargetError(NumericalError):
    """Raised when a study window does not isolate exactly one eigenvalue."""

    def __init__(self, n: int, count: int):
        self.n = n
        self.count = count
        super().__init__(
            "search window for n=%d holds %d eigenvalue estimates, expected 1"
            % (n, count)
        )


class UnresolvedClusterError(NumericalError):
    """Raised when a search reports boxes it could not resolve."""


class HolofemDict(AttrDict):
    """A subclass of :class:`addict.Dict` that can convert itself to a
    regular dictionary."""

    def as_dict(self):
        """Copy attributes from self as a dictionary, and recursively convert
        instances of :class:`HolofemDict`."""
        copy = {}
        for k, v in self.items():
            if isinstance(v, HolofemDict):
                copy[k] = v.as_dict()
            else:
                copy[k] = v
        return copy

    def __repr__(self):
        """Print a dict-like :meth:`repr`, without including 'addict.Dict'."""
        return "HolofemDict(%s)" % super(AttrDict, self).__repr__()
