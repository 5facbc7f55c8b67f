"""Package exception types."""

from __future__ import annotations


class RevprefError(Exception):
    """Base class for all package errors."""


class MalformedInput(RevprefError):
    """An input document does not follow the wire format."""


class DimensionMismatch(RevprefError):
    """A price or quantity vector does not match the session item count."""


class DuplicateRound(RevprefError):
    """Two observations carry the same round id."""


class NegativeValue(RevprefError):
    """A price or quantity is negative."""


class StaleRound(RevprefError):
    """A candidate bid's round id does not exceed every committed round id."""


class UnknownRound(RevprefError):
    """A referenced round id is not present in the session."""


class UnknownSession(RevprefError):
    """A referenced session id does not exist."""
