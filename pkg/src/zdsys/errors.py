"""Exception types shared across the package."""


class ZdsysError(Exception):
    """Base class for all package errors."""


class MixedSystems(ZdsysError):
    """Two values over different system specs were combined."""


class InvalidPoint(ZdsysError):
    """A point description is not valid for the family."""


class MaxStepsExceeded(ZdsysError):
    """A first-return search did not terminate within the step bound.

    Signals a point of the base whose forward orbit does not come back
    within the bound (for example, a base missing the minimal set of its
    fiber).
    """

    def __init__(self, message, remainder=None):
        super().__init__(message)
        self.remainder = remainder


class NotSubordinate(ZdsysError):
    """A base straddles two elements of the subordinating partition."""


class SaturationFailure(ZdsysError):
    """The tower levels of the constructed system do not partition X."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InvalidSystem(ZdsysError):
    """A return system failed validation where a valid one is required."""


class BaseMismatch(ZdsysError):
    """Two systems do not have the same union of bases."""


class ConstructionFailed(ZdsysError):
    """An adapted-pair construction violated one of its postconditions."""

    def __init__(self, message, postcondition=None):
        super().__init__(message)
        self.postcondition = postcondition


class IncompatiblePair(ZdsysError):
    """The second system's bases are not the images of the first towers."""


class InvalidFiberPoint(ZdsysError):
    """The requested point is not in the quotient base space."""


class NotMeasurable(ZdsysError):
    """A clopen set is not a union of partition elements."""


class NotInvariant(ZdsysError):
    """A clopen set is not invariant under the dynamics."""


class NotFiner(ZdsysError):
    """A partition does not refine another where required."""


class NeedsRefinement(ZdsysError):
    """The induced map is not square at this level; a finer level is attached."""

    def __init__(self, message, finer_level=None, inclusion=None, alpha=None):
        super().__init__(message)
        self.finer_level = finer_level
        self.inclusion = inclusion
        self.alpha = alpha


class NotCompactlySupported(ZdsysError):
    """A coefficient of the element is not supported on a finite point set."""


class NotUnitary(ZdsysError):
    """A matrix expected to be unitary is not, within tolerance."""


class DegenerateEigenbasis(ZdsysError):
    """The numeric eigendecomposition failed to certify its output."""


class NoConvergence(ZdsysError):
    """An iterative numeric routine hit its iteration cap."""


class PartitionFailure(ZdsysError):
    """A projection family does not sum to the identity."""
