"""Exception types shared across the package."""


class GluingCycle(ValueError):
    """The pushout quotient would violate antisymmetry."""


class NonConvexCocone(ValueError):
    """A pushout cocone map fails to be a causal embedding.

    Raised both for non-convex cocone images and for broken order
    reflection; the message names the actual cause.
    """


class NotFibrant(ValueError):
    """No companion exists for the requested vertical morphism."""


class FragmentCapExceeded(RuntimeError):
    """Fragment generation hit a configured size cap."""


class InvalidComposite(ValueError):
    """A composed bordism or two-cell failed validation."""


class NotFiltered(ValueError):
    """A colimit was requested over a non-filtered index category."""


class TimeSliceRequired(ValueError):
    """The translation needs invertible images, i.e. a time-slice model."""


class AdditivityRequired(ValueError):
    """The translation's additivity precondition fails."""


class NoLaterSurface(RuntimeError):
    """Exhausted the search for a valid later-surface decoration."""
