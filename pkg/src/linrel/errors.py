"""Exception types raised by the linrel package.

Every precondition failure raises a subclass of :class:`LinRelError`, so
callers can catch one type at an API boundary.  ``InternalInconsistencyError``
is special: it signals that a mathematical identity the library guarantees
failed numerically, which means a bug (usually in rank decisions), not bad
user input.
"""


class LinRelError(Exception):
    """Base class for all errors raised by linrel."""


class DimensionMismatchError(LinRelError):
    """Operands live in incompatible spaces."""


class FormatError(LinRelError):
    """Malformed serialized input (bad JSON structure, shapes, or values)."""


class NotHermitianError(LinRelError):
    """Matrix expected to be Hermitian is not, beyond tolerance."""


class NotPsdError(LinRelError):
    """Matrix has an eigenvalue below the allowed negative tolerance."""

    def __init__(self, message: str, witness: float | None = None):
        super().__init__(message)
        self.witness = witness


class UnsolvableError(LinRelError):
    """Right-hand side leaves the column span of the coefficient matrix."""


class NotSelfAdjointError(LinRelError):
    """Relation does not equal its adjoint within tolerance."""


class NotNonnegativeError(LinRelError):
    """Selfadjoint relation has a negative form eigenvalue.

    ``witness`` carries the offending eigenvalue.
    """

    def __init__(self, message: str, witness: float | None = None):
        super().__init__(message)
        self.witness = witness


class NotSymmetricError(LinRelError):
    """Relation is not contained in its adjoint."""


class OrderViolatedError(LinRelError):
    """Requested an order-dependent construction for an unordered pair."""


class InvarianceViolatedError(LinRelError):
    """Subspace fails to decompose along the given orthogonal projection.

    ``witness`` carries a vector whose projection leaves the subspace.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class ComponentMismatchError(LinRelError):
    """Block entries do not map between the required component subspaces."""


class ConditionViolatedError(LinRelError):
    """A domain condition required for an equivalence fails."""


class SpecInvalidError(LinRelError):
    """InstanceSpec parameters are inconsistent, e.g. dimensions out of bounds."""


class InternalInconsistencyError(LinRelError):
    """A guaranteed identity failed numerically; indicates a library bug."""
