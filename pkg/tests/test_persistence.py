"""Snapshot save/load: exact round trips and corruption handling."""

import dataclasses
import json
import random

import pytest

from strictcluster import (
    ChecksumMismatch,
    Cluster,
    ClusteringEngine,
    ClusterState,
    Config,
    InvariantViolation,
    SNAPSHOT_FORMAT,
    SNAPSHOT_VERSION,
    SnapshotFormatError,
    VersionUnsupported,
    load_snapshot,
    run_stream,
    save_snapshot,
)

from generators import random_case
from golden import GOLDEN_N_FEATURES, GOLDEN_POINTS, GOLDEN_STRICTNESS


@pytest.fixture
def golden_state():
    state, _ = run_stream(Config(GOLDEN_STRICTNESS, GOLDEN_N_FEATURES), GOLDEN_POINTS)
    return state


def test_file_layout(golden_state, tmp_path):
    path = tmp_path / "state.snap"
    save_snapshot(golden_state, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    header = json.loads(lines[0])
    assert header["format"] == SNAPSHOT_FORMAT
    assert header["format_version"] == SNAPSHOT_VERSION
    assert len(header["payload_sha256"]) == 64
    payload = json.loads(lines[1])
    assert payload["points_seen"] == 6
    assert len(payload["clusters"]) == 3


def test_round_trip_equality(golden_state, tmp_path):
    path = tmp_path / "state.snap"
    save_snapshot(golden_state, path)
    assert load_snapshot(path) == golden_state
    assert load_snapshot(str(path)) == golden_state


def test_round_trip_is_bit_exact_on_awkward_floats(tmp_path):
    # 0.1 and 1/3 have no finite decimal form; repr round-tripping must
    # reproduce the identical doubles anyway
    state = ClusterState(
        config=Config(100.0 / 3.0, 2),
        clusters=(
            Cluster(id=1, member_count=3, feature_sums=(0.30000000000000004, 1.0 / 3.0), member_seqs=(0, 1, 2)),
        ),
        points_seen=3,
    )
    path = tmp_path / "state.snap"
    save_snapshot(state, path)
    loaded = load_snapshot(path)
    assert repr(loaded.config.strictness) == repr(state.config.strictness)
    assert repr(loaded.clusters[0].feature_sums) == repr(state.clusters[0].feature_sums)


def test_random_states_round_trip_bitwise(tmp_path):
    rng = random.Random(11)
    path = tmp_path / "state.snap"
    for i in range(200):
        strictness, n, points = random_case(rng, rng.randint(1, 50))
        state, _ = run_stream(Config(strictness, n), points)
        save_snapshot(state, path)
        loaded = load_snapshot(path)
        assert loaded == state
        for a, b in zip(loaded.clusters, state.clusters):
            assert repr(a.feature_sums) == repr(b.feature_sums)


def test_resume_through_snapshot_continues_bit_exactly(tmp_path):
    rng = random.Random(12)
    for _ in range(10):
        strictness, n, points = random_case(rng, 40)
        cut = rng.randint(0, len(points))
        full, _ = run_stream(Config(strictness, n), points)

        head, _ = run_stream(Config(strictness, n), points[:cut])
        path = tmp_path / "head.snap"
        save_snapshot(head, path)
        eng = ClusteringEngine.from_state(load_snapshot(path))
        for p in points[cut:]:
            eng.assign(p)
        assert eng.state() == full


def test_save_replaces_existing_file_and_leaves_no_leftovers(golden_state, tmp_path):
    path = tmp_path / "state.snap"
    save_snapshot(golden_state, path)
    first = path.read_bytes()
    save_snapshot(golden_state, path)
    assert path.read_bytes() == first  # same state serializes identically
    assert [p.name for p in tmp_path.iterdir()] == ["state.snap"]


def test_save_into_missing_directory_raises_oserror(golden_state, tmp_path):
    with pytest.raises(OSError):
        save_snapshot(golden_state, tmp_path / "nope" / "state.snap")


def test_load_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        load_snapshot(tmp_path / "absent.snap")


class TestCorruption:
    def write(self, tmp_path, state):
        path = tmp_path / "state.snap"
        save_snapshot(state, path)
        return path

    def test_missing_payload_line(self, golden_state, tmp_path):
        path = self.write(tmp_path, golden_state)
        path.write_text(path.read_text().splitlines()[0])  # drop the newline too
        with pytest.raises(SnapshotFormatError):
            load_snapshot(path)

    def test_header_not_json(self, golden_state, tmp_path):
        path = self.write(tmp_path, golden_state)
        path.write_text("not json\n{}\n")
        with pytest.raises(SnapshotFormatError):
            load_snapshot(path)

    def test_wrong_format_name(self, golden_state, tmp_path):
        path = self.write(tmp_path, golden_state)
        header, payload = path.read_text().splitlines()
        doc = json.loads(header)
        doc["format"] = "something-else"
        path.write_text(json.dumps(doc) + "\n" + payload + "\n")
        with pytest.raises(SnapshotFormatError):
            load_snapshot(path)

    def test_unsupported_version_wins_over_bad_checksum(self, golden_state, tmp_path):
        # version is checked before the checksum, so a version bump with a
        # now-stale checksum must still report VersionUnsupported
        path = self.write(tmp_path, golden_state)
        header, payload = path.read_text().splitlines()
        doc = json.loads(header)
        doc["format_version"] = 999
        path.write_text(json.dumps(doc) + "\n" + payload + "x\n")
        with pytest.raises(VersionUnsupported):
            load_snapshot(path)

    def test_tampered_payload_fails_the_checksum(self, golden_state, tmp_path):
        path = self.write(tmp_path, golden_state)
        header, payload = path.read_text().splitlines()
        tampered = payload.replace('"points_seen":6', '"points_seen":7', 1)
        assert tampered != payload
        path.write_text(header + "\n" + tampered + "\n")
        with pytest.raises(ChecksumMismatch):
            load_snapshot(path)

    def rewrite_payload(self, path, mutate):
        """Apply ``mutate`` to the payload document and fix the checksum."""
        import hashlib

        header, payload = path.read_text().splitlines()
        doc = json.loads(payload)
        mutate(doc)
        new_payload = json.dumps(doc, separators=(",", ":"))
        head = json.loads(header)
        head["payload_sha256"] = hashlib.sha256(new_payload.encode()).hexdigest()
        path.write_text(
            json.dumps(head, separators=(",", ":")) + "\n" + new_payload + "\n"
        )

    def test_consistent_checksum_but_inconsistent_state(self, golden_state, tmp_path):
        path = self.write(tmp_path, golden_state)

        def break_counts(doc):
            doc["clusters"][0]["member_count"] = 5

        self.rewrite_payload(path, break_counts)
        with pytest.raises(InvariantViolation):
            load_snapshot(path)

    def test_out_of_range_config_in_payload(self, golden_state, tmp_path):
        path = self.write(tmp_path, golden_state)

        def break_config(doc):
            doc["config"]["strictness"] = 150.0

        self.rewrite_payload(path, break_config)
        with pytest.raises(InvariantViolation):
            load_snapshot(path)

    def test_missing_keys_in_payload(self, golden_state, tmp_path):
        path = self.write(tmp_path, golden_state)

        def drop_key(doc):
            del doc["clusters"][0]["feature_sums"]

        self.rewrite_payload(path, drop_key)
        with pytest.raises(InvariantViolation):
            load_snapshot(path)

    def test_unparseable_payload_with_matching_checksum(self, golden_state, tmp_path):
        import hashlib

        path = self.write(tmp_path, golden_state)
        header = json.loads(path.read_text().splitlines()[0])
        garbage = "{broken"
        header["payload_sha256"] = hashlib.sha256(garbage.encode()).hexdigest()
        path.write_text(json.dumps(header) + "\n" + garbage + "\n")
        with pytest.raises(InvariantViolation):
            load_snapshot(path)
