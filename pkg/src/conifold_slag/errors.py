"""Exception hierarchy shared by every module of the package."""


class ConifoldError(Exception):
    """Base class for all package errors."""


class OriginError(ConifoldError):
    """The cone vertex has no unique lift to the resolved conifold."""


class NotOnQuadric(ConifoldError):
    """A point violates XY - UV = 0 beyond tolerance."""


class PatchBoundary(ConifoldError):
    """The requested inhomogeneous coordinate is undefined at this point."""


class NotOrthogonal(ConifoldError):
    """A matrix is not an element of SO(4)."""


class DomainError(ConifoldError):
    """Input outside the domain of a radial function (r^2 <= 0 on the cone)."""


class BoltError(ConifoldError):
    """Operation is undefined on the zero section."""


class BasePointMismatch(ConifoldError):
    """Tangent vectors are based at different points."""


class NoConvergence(ConifoldError):
    """A Newton-type iteration failed to converge."""


class SingularJacobian(ConifoldError):
    """The Jacobian of a leaf system lost rank."""


class ContinuationStall(ConifoldError):
    """Path following could not make progress."""


class DegenerateOrbit(ConifoldError):
    """The orbit through the requested point collapses (cone vertex)."""


class RankDeficient(ConifoldError):
    """A tangent frame does not span a 3-plane."""


class ZeroVolumeForm(ConifoldError):
    """The holomorphic volume form vanishes on a frame."""
