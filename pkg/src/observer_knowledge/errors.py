"""Exception types raised by the toolkit.

All of them derive from :class:`ValueError` so callers that only care about
"bad input" can catch one thing.
"""


class KnowledgeError(ValueError):
    """Base class for every error raised by this package."""


class DomainError(KnowledgeError):
    """A value lies outside the range an operation accepts."""


class ShapeError(KnowledgeError):
    """Matrix or vector dimensions are inconsistent."""


class NormalizationError(KnowledgeError):
    """Probabilities do not sum to one within tolerance."""


class DegeneratePosteriorError(KnowledgeError):
    """The prior vanishes wherever the likelihood is supported."""


class UsageError(KnowledgeError):
    """Arguments are individually valid but combined incorrectly."""
