"""Exception hierarchy shared by every gptlab module."""


class GptlabError(Exception):
    """Base class for all library errors."""


class UsageError(GptlabError, ValueError):
    """A precondition of an operation was violated by the caller."""


class TooLarge(GptlabError):
    """Input exceeds a documented enumeration limit."""

    def __init__(self, what: str, size: int, limit: int):
        super().__init__(f"{what}: {size} exceeds the limit of {limit}")
        self.what = what
        self.size = size
        self.limit = limit


class NoFacets(GptlabError):
    """Raised for 0-dimensional polytopes, which have no facets."""


class ApproximationCollapse(GptlabError):
    """Rational approximation of a polygon lost vertices or dimension."""


class NotAnAssociatedFace(UsageError):
    """The face is not the face associated with any pure effect."""


class LoadError(GptlabError):
    """A model file failed validation; the message names the invariant."""


class InternalInconsistency(GptlabError):
    """Independent computations disagreed. This is always a bug."""

    def __init__(self, message: str, dump: dict | None = None):
        super().__init__(message)
        self.dump = dump or {}
