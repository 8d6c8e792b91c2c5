"""Domain types and validation for the streaming clustering engine.

All types here are immutable values; the engine is the only component
that mutates anything, and it does so on its own private buffers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    BadDimensionality,
    DimensionMismatch,
    InvariantViolation,
    NegativeFeature,
    NonFiniteFeature,
    StrictnessOutOfRange,
)


@dataclass(frozen=True, slots=True)
class Config:
    """Run-wide settings: strictness percentage and feature-vector width."""

    strictness: float  # in (0, 100]
    n_features: int  # >= 1

    def __post_init__(self):
        s = self.strictness
        if not isinstance(s, (int, float)) or isinstance(s, bool):
            raise StrictnessOutOfRange(f"strictness must be a real number, got {s!r}")
        if not (0.0 < float(s) <= 100.0):  # NaN fails both comparisons
            raise StrictnessOutOfRange(f"strictness must be in (0, 100], got {s!r}")
        n = self.n_features
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise BadDimensionality(f"n_features must be a positive integer, got {n!r}")
        object.__setattr__(self, "strictness", float(s))


def validate_config(strictness: float, n_features: int) -> Config:
    """Build a Config, rejecting out-of-range strictness or dimensionality."""
    return Config(strictness, n_features)


@dataclass(frozen=True, slots=True)
class DataPoint:
    """One arrival in the stream: a 0-based sequence id and its features."""

    seq: int
    features: tuple[float, ...]
    label: str | None = None  # optional caller-supplied id, carried through outputs


def validate_point(
    features: Sequence[float],
    config: Config,
    seq: int = 0,
    label: str | None = None,
) -> DataPoint:
    """Check a feature vector against the config and wrap it as a DataPoint.

    Values must match the configured width and be finite and nonnegative.
    """
    vals = tuple(float(v) for v in features)
    if len(vals) != config.n_features:
        raise DimensionMismatch(
            f"expected {config.n_features} features, got {len(vals)}"
        )
    for j, v in enumerate(vals):
        if not math.isfinite(v):
            raise NonFiniteFeature(f"feature {j + 1} is not finite: {v!r}")
        if v < 0.0:
            raise NegativeFeature(f"feature {j + 1} is negative: {v!r}")
    return DataPoint(seq=seq, features=vals, label=label)


@dataclass(frozen=True, slots=True)
class Cluster:
    """A cluster: running feature sums plus the members that produced them.

    The centroid is always derived as sums/count rather than stored, so the
    incremental mean never drifts from the exact member average.
    """

    id: int  # 1-based creation order
    member_count: int
    feature_sums: tuple[float, ...]
    member_seqs: tuple[int, ...]

    def centroid(self) -> tuple[float, ...]:
        return tuple(s / self.member_count for s in self.feature_sums)


@dataclass(frozen=True, slots=True)
class ClusterState:
    """Full engine state: config, clusters in creation order, points seen."""

    config: Config
    clusters: tuple[Cluster, ...]
    points_seen: int


class DecisionPath(enum.Enum):
    """Which branch of the assignment dispatch placed a point."""

    EMPTY_LIST_NEW_CLUSTER = "EMPTY_LIST_NEW_CLUSTER"
    SINGLE_QUALIFIED = "SINGLE_QUALIFIED"
    MAX_MATCHED = "MAX_MATCHED"
    AVG_TIEBREAK = "AVG_TIEBREAK"


@dataclass(frozen=True, slots=True)
class MatchProfile:
    """Per-(point, cluster) evaluation: matched-feature count and the mean
    of the scaled qualifying similarities (None when nothing matched)."""

    cluster_id: int
    matched_count: int
    qualifying_avg: float | None


@dataclass(frozen=True, slots=True)
class AssignmentOutcome:
    """Result of assigning one point.

    ``profiles`` holds one MatchProfile per pre-existing cluster in id order
    when profile recording is enabled, and None when it was skipped for
    throughput. ``winner_profile`` is always present for joins (it reflects
    the receiving cluster as it stood before the point joined) and None when
    a new cluster was created.
    """

    point_seq: int
    assigned_cluster_id: int
    created_new: bool
    decision_path: DecisionPath
    profiles: tuple[MatchProfile, ...] | None = field(default=None)
    winner_profile: MatchProfile | None = field(default=None)


def verify_state(
    state: ClusterState,
    points: Iterable[Sequence[float]] | None = None,
    rel_tol: float = 1e-9,
) -> None:
    """Audit every structural invariant of a ClusterState; raise on failure.

    With ``points`` given (the original stream, in arrival order), also
    replays each cluster's members and checks the stored feature sums
    against the recomputed ones within ``rel_tol`` relative error.
    """
    n = state.config.n_features
    seen: set[int] = set()
    total = 0
    for pos, cluster in enumerate(state.clusters, start=1):
        if cluster.id != pos:
            raise InvariantViolation(
                f"cluster ids must be contiguous from 1; found {cluster.id} at position {pos}"
            )
        if cluster.member_count < 1:
            raise InvariantViolation(f"cluster {cluster.id} has no members")
        if cluster.member_count != len(cluster.member_seqs):
            raise InvariantViolation(
                f"cluster {cluster.id}: member_count {cluster.member_count} "
                f"!= {len(cluster.member_seqs)} recorded members"
            )
        if len(cluster.feature_sums) != n:
            raise InvariantViolation(
                f"cluster {cluster.id}: feature_sums has width {len(cluster.feature_sums)}, expected {n}"
            )
        for s in cluster.feature_sums:
            if not math.isfinite(s) or s < 0.0:
                raise InvariantViolation(
                    f"cluster {cluster.id}: feature sum {s!r} is not a finite nonnegative value"
                )
        for seq in cluster.member_seqs:
            if seq in seen:
                raise InvariantViolation(f"point seq {seq} appears in more than one cluster")
            seen.add(seq)
        total += cluster.member_count
    if total != state.points_seen:
        raise InvariantViolation(
            f"member counts sum to {total} but points_seen is {state.points_seen}"
        )
    if seen and (min(seen) < 0 or max(seen) >= state.points_seen or len(seen) != state.points_seen):
        raise InvariantViolation("member seqs do not partition 0..points_seen-1")

    if points is None:
        return
    stream = [tuple(float(v) for v in p) for p in points]
    for cluster in state.clusters:
        replayed = [0.0] * n
        for seq in cluster.member_seqs:
            feats = stream[seq]
            for j in range(n):
                replayed[j] += feats[j]
        for j in range(n):
            got, want = cluster.feature_sums[j], replayed[j]
            if not math.isclose(got, want, rel_tol=rel_tol, abs_tol=1e-12):
                raise InvariantViolation(
                    f"cluster {cluster.id}: feature sum {j + 1} is {got}, replay gives {want}"
                )
