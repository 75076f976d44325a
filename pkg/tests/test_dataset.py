import json
from datetime import timedelta, timezone

import numpy as np
import pytest

from artcolony.dataset import (
    Dataset,
    IngestError,
    InteractionEvent,
    export,
    format_timestamp,
    ingest,
    parse_timestamp,
    validate_dataset,
    window_bounds,
    window_count,
    window_index,
)

from conftest import EPOCH, make_dataset, ts, unit_vec

E1 = [1.0, 0.0, 0.0, 0.0]
E2 = [0.0, 1.0, 0.0, 0.0]


class TestTimestamps:
    def test_round_trip(self):
        t = ts(12345)
        assert parse_timestamp(format_timestamp(t)) == t

    def test_z_suffix(self):
        t = parse_timestamp("2026-01-01T00:00:00Z")
        assert t == EPOCH
        assert t.tzinfo is not None

    def test_naive_rejected(self):
        with pytest.raises(ValueError):
            parse_timestamp("2026-01-01T00:00:00")

    def test_garbage_rejected(self):
        with pytest.raises(ValueError):
            parse_timestamp("not a time")


class TestWindows:
    def test_index_boundaries(self):
        assert window_index(EPOCH, EPOCH) == 0
        assert window_index(EPOCH + timedelta(days=3) - timedelta(seconds=1), EPOCH) == 0
        assert window_index(EPOCH + timedelta(days=3), EPOCH) == 1

    def test_custom_width(self):
        assert window_index(EPOCH + timedelta(days=5), EPOCH, window_days=5) == 1

    def test_bounds_cover_index(self):
        lo, hi = window_bounds(2, EPOCH)
        assert window_index(lo, EPOCH) == 2
        assert window_index(hi - timedelta(seconds=1), EPOCH) == 2

    def test_window_count(self):
        d = make_dataset(["a"], [("p1", "a", 0, E1), ("p2", "a", 4 * 1440, E2)])
        assert window_count(d) == 2


class TestEpochInference:
    def test_explicit_epoch_preserved(self):
        d = make_dataset(["a"], [("p1", "a", 500, E1)])
        assert d.dataset_epoch == EPOCH

    def test_epoch_defaults_to_earliest_timestamp(self):
        d = make_dataset(["a"], [("p1", "a", 500, E1)])
        d2 = Dataset(agents=d.agents, posts=d.posts, replies=d.replies,
                     interactions=d.interactions, embedding_dim=d.embedding_dim)
        assert d2.dataset_epoch == EPOCH  # agent creation at EPOCH is earliest


def _round_trip(d, tmp_path):
    out = tmp_path / "data"
    paths = export(d, out)
    return paths, ingest(out)


class TestExportIngest:
    def test_writes_exactly_five_files(self, tmp_path):
        d = make_dataset(["a", "b"], [("p1", "a", 0, E1)])
        paths, _ = _round_trip(d, tmp_path)
        names = sorted(p.name for p in paths)
        assert names == [
            "agents.jsonl", "interactions.jsonl", "meta.json",
            "posts.jsonl", "replies.jsonl",
        ]

    def test_round_trip_preserves_content(self, tmp_path):
        d = make_dataset(
            [("a", {"b"}, set()), ("b", set(), {"a"})],
            [("p1", "a", 0, E1, 2, 1)],
            replies=[("r1", "p1", "b", 5, "nice one", E2)],
            interactions=[("b", "a", "like", 3, "p1")],
        )
        _, back = _round_trip(d, tmp_path)
        assert set(back.agents) == {"a", "b"}
        assert back.agents["a"].follower_ids == {"b"}
        assert back.posts["p1"].like_count == 2
        assert back.posts["p1"].created_at == ts(0)
        np.testing.assert_allclose(
            back.posts["p1"].image_embedding, unit_vec(E1), atol=1e-12)
        assert back.replies["r1"].text == "nice one"
        assert back.replies["r1"].image_embedding is not None
        assert len(back.interactions) == 1
        assert back.interactions[0].kind == "like"
        assert back.embedding_dim == 4
        assert back.dataset_epoch == EPOCH

    def test_reexport_byte_identical(self, tmp_path):
        d = make_dataset(
            ["a", "b"],
            [("p1", "a", 0, E1), ("p2", "b", 9, E2)],
            replies=[("r1", "p1", "b", 5, "hello", None)],
            interactions=[("b", "a", "follow", 1, None),
                          ("a", "b", "like", 1, "p2")],
        )
        out1 = tmp_path / "one"
        out2 = tmp_path / "two"
        export(d, out1)
        export(ingest(out1), out2)
        for name in ("agents.jsonl", "posts.jsonl", "replies.jsonl",
                     "interactions.jsonl", "meta.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name

    def test_interactions_sorted_deterministically(self, tmp_path):
        d = make_dataset(
            ["a", "b"],
            [("p1", "a", 0, E1)],
            interactions=[("b", "a", "like", 7, "p1"),
                          ("b", "a", "follow", 2, None),
                          ("a", "b", "follow", 2, None)],
        )
        out = tmp_path / "data"
        export(d, out)
        lines = [json.loads(l) for l in
                 (out / "interactions.jsonl").read_text().splitlines()]
        keys = [(l["created_at"], l["kind"], l["source"]) for l in lines]
        assert keys == sorted(keys)

    def test_empty_dataset_round_trips(self, tmp_path):
        d = Dataset()
        out = tmp_path / "data"
        export(d, out)
        back = ingest(out)
        assert not back.agents and not back.posts and not back.replies
        assert back.interactions == []

    def test_missing_files_treated_as_empty(self, tmp_path):
        out = tmp_path / "data"
        out.mkdir()
        (out / "agents.jsonl").write_text(
            json.dumps({"agent_id": "a", "persona_text": "p",
                        "created_at": "2026-01-01T00:00:00Z"}) + "\n")
        back = ingest(out)
        assert set(back.agents) == {"a"}
        assert not back.posts

    def test_ingest_rejects_missing_required_key(self, tmp_path):
        out = tmp_path / "data"
        out.mkdir()
        (out / "posts.jsonl").write_text(json.dumps({"post_id": "p1"}) + "\n")
        with pytest.raises(IngestError):
            ingest(out)

    def test_ingest_rejects_bad_json_line(self, tmp_path):
        out = tmp_path / "data"
        out.mkdir()
        (out / "agents.jsonl").write_text("{not json\n")
        with pytest.raises(IngestError):
            ingest(out)


def _codes(d):
    return sorted({v.code for v in validate_dataset(d)})


class TestValidation:
    def test_clean_dataset(self):
        d = make_dataset(
            [("a", {"b"}, set()), ("b", set(), {"a"})],
            [("p1", "a", 10, E1)],
            replies=[("r1", "p1", "b", 15, "hi", None)],
            interactions=[("b", "a", "comment", 15, "r1")],
        )
        assert validate_dataset(d) == []

    def test_self_follow(self):
        d = make_dataset([("a", {"a"}, {"a"})], [("p1", "a", 0, E1)])
        assert "self_follow" in _codes(d)

    def test_dangling_follow_reference(self):
        d = make_dataset([("a", {"ghost"}, set())], [("p1", "a", 0, E1)])
        assert "dangling_reference" in _codes(d)

    def test_dangling_reply_parent(self):
        d = make_dataset(["a"], [("p1", "a", 0, E1)],
                         replies=[("r1", "missing", "a", 5, "x", None)])
        assert "dangling_reference" in _codes(d)

    def test_reply_must_follow_parent(self):
        d = make_dataset(["a", "b"], [("p1", "a", 10, E1)],
                         replies=[("r1", "p1", "b", 10, "x", None)])
        assert "timestamp_order" in _codes(d)

    def test_post_before_author_created(self):
        d = make_dataset(["a"], [("p1", "a", -5, E1)])
        assert "timestamp_order" in _codes(d)

    def test_negative_count(self):
        d = make_dataset(["a"], [("p1", "a", 0, E1, -1, 0)])
        assert "negative_count" in _codes(d)

    def test_non_unit_embedding(self):
        d = make_dataset(["a"], [("p1", "a", 0, E1)])
        d.posts["p1"].image_embedding = np.array([2.0, 0.0, 0.0, 0.0])
        assert "embedding_not_unit" in _codes(d)

    def test_dimension_mismatch(self):
        d = make_dataset(["a"], [("p1", "a", 0, E1)])
        d.posts["p1"].image_embedding = unit_vec([1.0, 1.0])
        assert "dimension_mismatch" in _codes(d)

    def test_reply_cycle(self):
        d = make_dataset(["a"], [("p1", "a", 0, E1)],
                         replies=[("r1", "r2", "a", 5, "x", None),
                                  ("r2", "r1", "a", 6, "y", None)])
        assert "reply_cycle" in _codes(d)

    def test_bad_interaction_kind(self):
        d = make_dataset(["a", "b"], [("p1", "a", 0, E1)],
                         interactions=[("b", "a", "teleport", 1, "p1")])
        assert "bad_kind" in _codes(d)

    def test_dangling_interaction_object(self):
        d = make_dataset(["a", "b"], [("p1", "a", 0, E1)],
                         interactions=[("b", "a", "like", 1, "nope")])
        assert "dangling_reference" in _codes(d)

    def test_id_collision_post_vs_reply(self):
        d = make_dataset(["a"], [("x", "a", 0, E1)],
                         replies=[("x", "x", "a", 5, "t", None)])
        assert "id_collision" in _codes(d)

    def test_violation_serializes(self):
        d = make_dataset([("a", {"a"}, {"a"})], [("p1", "a", 0, E1)])
        v = validate_dataset(d)[0]
        dd = v.to_dict()
        assert set(dd) == {"code", "message", "entity"}


def test_simulated_dataset_is_valid(small_dataset):
    assert validate_dataset(small_dataset) == []
