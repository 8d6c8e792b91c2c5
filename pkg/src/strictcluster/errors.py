"""Exception hierarchy shared by all strictcluster modules."""

from __future__ import annotations


class ClusteringError(Exception):
    """Base class for every error raised by this package.

    ``line_number`` is filled in by the ingestion layer when the error was
    triggered by a specific input line; it stays ``None`` otherwise.
    """

    line_number: int | None = None


class StrictnessOutOfRange(ClusteringError):
    """Strictness must be a real number in (0, 100]."""


class BadDimensionality(ClusteringError):
    """Feature count must be a positive integer."""


class DimensionMismatch(ClusteringError):
    """A point's feature vector does not match the configured width."""


class NegativeFeature(ClusteringError):
    """Feature values must be >= 0."""


class NonFiniteFeature(ClusteringError):
    """Feature values must be finite (no NaN or infinity)."""


class ParseError(ClusteringError):
    """A line of input text could not be parsed into a feature vector."""

    def __init__(self, message: str, column: int | None = None):
        super().__init__(message)
        self.column = column


class InvariantViolation(ClusteringError):
    """Internal consistency check failed (engine state or loaded snapshot)."""


class SnapshotError(ClusteringError):
    """Base class for snapshot save/load failures."""


class SnapshotFormatError(SnapshotError):
    """Snapshot file is structurally unreadable."""


class ChecksumMismatch(SnapshotError):
    """Snapshot payload does not hash to the recorded checksum."""


class VersionUnsupported(SnapshotError):
    """Snapshot was written with a format version this build cannot read."""
