"""Exception types shared across the package."""


class FramePaverError(Exception):
    """Base class for all framepaver errors."""


class InvalidExponent(FramePaverError):
    """A decay exponent was <= 1; every bound in the library needs s > 1."""


class IndexBeyondTruncation(FramePaverError):
    """An entry outside the stored truncation was requested and no envelope covers it."""


class MissingEnvelope(FramePaverError):
    """A bound over indices beyond the truncation was requested without a tail model."""


class IndexOutOfRange(FramePaverError):
    """A class referenced indices outside the stored truncation."""


class Infeasible(FramePaverError):
    """No partition can reach the requested margin threshold."""


class WindowTooLong(FramePaverError):
    """A translation window longer than the cyclic period was supplied."""


class DimensionMismatch(FramePaverError):
    """Frame vectors and functionals do not share a common dimension."""


class InvalidGramData(FramePaverError):
    """A serialized payload failed schema or invariant validation."""


class PavingCoverageError(FramePaverError):
    """A paving does not exactly cover the declared index range."""

    def __init__(self, missing=(), extra=(), duplicated=()):
        self.missing = tuple(sorted(missing))
        self.extra = tuple(sorted(extra))
        self.duplicated = tuple(sorted(duplicated))
        parts = []
        if self.missing:
            parts.append(f"missing indices {list(self.missing)}")
        if self.extra:
            parts.append(f"indices outside the range {list(self.extra)}")
        if self.duplicated:
            parts.append(f"duplicated indices {list(self.duplicated)}")
        super().__init__("paving does not cover the range: " + "; ".join(parts))
