"""Dataset model and JSONL serialization.

A dataset is four record collections (agents, posts, replies, interaction
events) plus the image-embedding dimensionality and the dataset epoch (the
earliest timestamp across all entities). On disk it is four JSONL files —
agents.jsonl, posts.jsonl, replies.jsonl, interactions.jsonl — plus an
optional meta.json. Timestamps are ISO-8601 UTC with seconds precision;
ordering ties anywhere in the package break by id (ids sort lexicographically).

Ingest raises IngestError on structural problems (unparseable lines,
dangling references, reply cycles, dimension mismatches, embeddings far
from unit norm). Everything softer — timestamp ordering, self-follows —
is reported by validate_dataset as Violation records, not exceptions.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

__all__ = [
    "AgentRecord",
    "PostNode",
    "ReplyNode",
    "InteractionEvent",
    "Dataset",
    "Violation",
    "IngestError",
    "INTERACTION_KINDS",
    "ingest",
    "export",
    "validate_dataset",
    "dataset_equal",
    "parse_timestamp",
    "format_timestamp",
    "window_index",
    "window_bounds",
    "window_count",
]

INTERACTION_KINDS = ("like", "comment", "follow")

# Embeddings within NORM_TOL of unit length pass untouched; within
# RENORM_TOL they are renormalized (with a warning); beyond that, error.
NORM_TOL = 1e-6
RENORM_TOL = 1e-3


class IngestError(ValueError):
    """Structurally invalid input data."""


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 UTC timestamp ('Z' or explicit offset)."""
    if not isinstance(value, str):
        raise ValueError(f"timestamp must be a string, got {type(value).__name__}")
    try:
        ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError as exc:
        raise ValueError(f"bad timestamp {value!r}: {exc}") from None
    if ts.tzinfo is None:
        raise ValueError(f"timestamp {value!r} lacks a timezone")
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class AgentRecord:
    agent_id: str
    persona_text: str
    created_at: datetime
    follower_ids: set = field(default_factory=set)
    following_ids: set = field(default_factory=set)


@dataclass(eq=False)
class PostNode:
    post_id: str
    author: str
    created_at: datetime
    caption: str
    image_embedding: np.ndarray
    caption_embedding: np.ndarray | None = None
    like_count: int = 0
    comment_count: int = 0


@dataclass(eq=False)
class ReplyNode:
    reply_id: str
    parent: str  # post_id or reply_id
    author: str
    created_at: datetime
    text: str
    image_embedding: np.ndarray | None = None

    @property
    def has_image(self) -> bool:
        return self.image_embedding is not None


@dataclass(frozen=True)
class InteractionEvent:
    source: str
    target: str
    kind: str  # one of INTERACTION_KINDS
    created_at: datetime
    object: str | None = None  # post_id or reply_id the event acted on


@dataclass(eq=False)
class Dataset:
    agents: dict[str, AgentRecord] = field(default_factory=dict)
    posts: dict[str, PostNode] = field(default_factory=dict)
    replies: dict[str, ReplyNode] = field(default_factory=dict)
    interactions: list[InteractionEvent] = field(default_factory=list)
    embedding_dim: int | None = None
    caption_dim: int | None = None
    dataset_epoch: datetime | None = None

    def __post_init__(self):
        if self.dataset_epoch is None:
            self.dataset_epoch = self._earliest_timestamp()

    def _earliest_timestamp(self) -> datetime | None:
        candidates = (
            [a.created_at for a in self.agents.values()]
            + [p.created_at for p in self.posts.values()]
            + [r.created_at for r in self.replies.values()]
            + [e.created_at for e in self.interactions]
        )
        return min(candidates) if candidates else None

    def posts_by_agent(self) -> dict[str, list[PostNode]]:
        out: dict[str, list[PostNode]] = {a: [] for a in self.agents}
        for post in self.posts.values():
            out.setdefault(post.author, []).append(post)
        for posts in out.values():
            posts.sort(key=lambda p: (p.created_at, p.post_id))
        return out

    def replies_by_parent(self) -> dict[str, list[ReplyNode]]:
        out: dict[str, list[ReplyNode]] = {}
        for reply in self.replies.values():
            out.setdefault(reply.parent, []).append(reply)
        for replies in out.values():
            replies.sort(key=lambda r: (r.created_at, r.reply_id))
        return out

    def visual_reply_embeddings(self) -> np.ndarray:
        """All image-bearing reply embeddings, stacked in reply-id order."""
        vecs = [
            r.image_embedding
            for _, r in sorted(self.replies.items())
            if r.image_embedding is not None
        ]
        if not vecs:
            dim = self.embedding_dim or 0
            return np.zeros((0, dim))
        return np.stack(vecs)


# ---------------------------------------------------------------------------
# windows
# ---------------------------------------------------------------------------

def window_index(ts: datetime, epoch: datetime, window_days: int = 3) -> int:
    """Index of the half-open window [epoch + i*w, epoch + (i+1)*w) holding ts."""
    if window_days <= 0:
        raise ValueError("window_days must be positive")
    delta = (ts - epoch).total_seconds()
    return math.floor(delta / (window_days * 86400.0))


def window_bounds(index: int, epoch: datetime, window_days: int = 3) -> tuple[datetime, datetime]:
    start = epoch + timedelta(days=window_days * index)
    return start, start + timedelta(days=window_days)


def window_count(d: Dataset, window_days: int = 3) -> int:
    """Number of windows needed to cover every timestamp in the dataset."""
    if d.dataset_epoch is None:
        return 0
    latest = max(
        [p.created_at for p in d.posts.values()]
        + [r.created_at for r in d.replies.values()]
        + [e.created_at for e in d.interactions]
        + [a.created_at for a in d.agents.values()]
    )
    return window_index(latest, d.dataset_epoch, window_days) + 1


# ---------------------------------------------------------------------------
# ingest
# ---------------------------------------------------------------------------

def _clean_embedding(raw, expected_dim: int | None, where: str, loose: list) -> np.ndarray:
    vec = np.asarray(raw, dtype=float)
    if vec.ndim != 1 or vec.size == 0:
        raise IngestError(f"{where}: embedding must be a non-empty flat list")
    if expected_dim is not None and vec.size != expected_dim:
        raise IngestError(
            f"{where}: embedding dimension {vec.size} != expected {expected_dim}"
        )
    norm = float(np.linalg.norm(vec))
    err = abs(norm - 1.0)
    if err <= NORM_TOL:
        return vec
    if err <= RENORM_TOL:
        loose.append(where)
        return vec / norm
    raise IngestError(f"{where}: embedding norm {norm:.6f} beyond tolerance {RENORM_TOL}")


def _iter_jsonl(path: Path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"{path.name}:{lineno}: malformed JSON: {exc}") from None
            if not isinstance(obj, dict):
                raise IngestError(f"{path.name}:{lineno}: expected an object")
            yield lineno, obj


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise IngestError(f"{where}: missing field {key!r}")
    return obj[key]


def ingest(data_dir, *, default_embedding_dim: int | None = None) -> Dataset:
    """Load a dataset directory. Missing files are treated as empty.

    meta.json (when present) supplies embedding_dim for empty datasets;
    otherwise the dimension is inferred from the first image embedding.
    """
    data_dir = Path(data_dir)
    dim = default_embedding_dim
    cap_dim: int | None = None
    meta_path = data_dir / "meta.json"
    if meta_path.exists():
        with open(meta_path, encoding="utf-8") as fh:
            meta = json.load(fh)
        if meta.get("embedding_dim") is not None:
            dim = int(meta["embedding_dim"])
        if meta.get("caption_dim") is not None:
            cap_dim = int(meta["caption_dim"])

    loose: list[str] = []
    agents: dict[str, AgentRecord] = {}
    path = data_dir / "agents.jsonl"
    if path.exists():
        for lineno, obj in _iter_jsonl(path):
            where = f"agents.jsonl:{lineno}"
            agent_id = str(_require(obj, "agent_id", where))
            if agent_id in agents:
                raise IngestError(f"{where}: duplicate agent_id {agent_id!r}")
            try:
                created = parse_timestamp(_require(obj, "created_at", where))
            except ValueError as exc:
                raise IngestError(f"{where}: {exc}") from None
            agents[agent_id] = AgentRecord(
                agent_id=agent_id,
                persona_text=str(obj.get("persona_text", "")),
                created_at=created,
                follower_ids=set(map(str, obj.get("follower_ids", []))),
                following_ids=set(map(str, obj.get("following_ids", []))),
            )

    posts: dict[str, PostNode] = {}
    path = data_dir / "posts.jsonl"
    if path.exists():
        for lineno, obj in _iter_jsonl(path):
            where = f"posts.jsonl:{lineno}"
            post_id = str(_require(obj, "post_id", where))
            if post_id in posts:
                raise IngestError(f"{where}: duplicate post_id {post_id!r}")
            try:
                created = parse_timestamp(_require(obj, "created_at", where))
            except ValueError as exc:
                raise IngestError(f"{where}: {exc}") from None
            emb = _clean_embedding(_require(obj, "image_embedding", where), dim, where, loose)
            if dim is None:
                dim = emb.size
            cap = None
            if obj.get("caption_embedding") is not None:
                cap = _clean_embedding(obj["caption_embedding"], cap_dim, where, loose)
                if cap_dim is None:
                    cap_dim = cap.size
            posts[post_id] = PostNode(
                post_id=post_id,
                author=str(_require(obj, "author", where)),
                created_at=created,
                caption=str(obj.get("caption", "")),
                image_embedding=emb,
                caption_embedding=cap,
                like_count=int(obj.get("like_count", 0)),
                comment_count=int(obj.get("comment_count", 0)),
            )

    replies: dict[str, ReplyNode] = {}
    path = data_dir / "replies.jsonl"
    if path.exists():
        for lineno, obj in _iter_jsonl(path):
            where = f"replies.jsonl:{lineno}"
            reply_id = str(_require(obj, "reply_id", where))
            if reply_id in replies:
                raise IngestError(f"{where}: duplicate reply_id {reply_id!r}")
            try:
                created = parse_timestamp(_require(obj, "created_at", where))
            except ValueError as exc:
                raise IngestError(f"{where}: {exc}") from None
            emb = None
            if obj.get("image_embedding") is not None:
                emb = _clean_embedding(obj["image_embedding"], dim, where, loose)
                if dim is None:
                    dim = emb.size
            replies[reply_id] = ReplyNode(
                reply_id=reply_id,
                parent=str(_require(obj, "parent", where)),
                author=str(_require(obj, "author", where)),
                created_at=created,
                text=str(obj.get("text", "")),
                image_embedding=emb,
            )

    interactions: list[InteractionEvent] = []
    path = data_dir / "interactions.jsonl"
    if path.exists():
        for lineno, obj in _iter_jsonl(path):
            where = f"interactions.jsonl:{lineno}"
            kind = str(_require(obj, "kind", where))
            if kind not in INTERACTION_KINDS:
                raise IngestError(f"{where}: unknown kind {kind!r}")
            try:
                created = parse_timestamp(_require(obj, "created_at", where))
            except ValueError as exc:
                raise IngestError(f"{where}: {exc}") from None
            # Optional boolean "human" flag (platform-side likes) is accepted
            # and ignored.
            interactions.append(
                InteractionEvent(
                    source=str(_require(obj, "source", where)),
                    target=str(_require(obj, "target", where)),
                    kind=kind,
                    created_at=created,
                    object=(str(obj["object"]) if obj.get("object") is not None else None),
                )
            )

    if loose:
        warnings.warn(
            f"renormalized {len(loose)} embedding(s) with norm drift beyond {NORM_TOL}"
            f" (first at {loose[0]})",
            stacklevel=2,
        )

    d = Dataset(
        agents=agents,
        posts=posts,
        replies=replies,
        interactions=interactions,
        embedding_dim=dim,
        caption_dim=cap_dim,
    )
    _check_structure(d)
    return d


def _check_structure(d: Dataset) -> None:
    """Reference resolution + reply-forest acyclicity; raises IngestError."""
    overlap = d.posts.keys() & d.replies.keys()
    if overlap:
        raise IngestError(f"ids used as both post and reply: {sorted(overlap)[:3]}")
    for post in d.posts.values():
        if post.author not in d.agents:
            raise IngestError(f"post {post.post_id}: unknown author {post.author!r}")
    for reply in d.replies.values():
        if reply.author not in d.agents:
            raise IngestError(f"reply {reply.reply_id}: unknown author {reply.author!r}")
        if reply.parent not in d.posts and reply.parent not in d.replies:
            raise IngestError(f"reply {reply.reply_id}: dangling parent {reply.parent!r}")
    for ev in d.interactions:
        if ev.source not in d.agents:
            raise IngestError(f"interaction: unknown source {ev.source!r}")
        if ev.target not in d.agents:
            raise IngestError(f"interaction: unknown target {ev.target!r}")
        if ev.object is not None and ev.object not in d.posts and ev.object not in d.replies:
            raise IngestError(f"interaction: dangling object {ev.object!r}")

    # Walk each reply's parent chain; a chain revisiting a node is a cycle.
    state: dict[str, int] = {}  # 0 = in progress, 1 = done
    for rid in d.replies:
        if state.get(rid) == 1:
            continue
        trail = []
        node = rid
        while node in d.replies and state.get(node) != 1:
            if state.get(node) == 0:
                raise IngestError(f"reply cycle detected involving {node!r}")
            state[node] = 0
            trail.append(node)
            node = d.replies[node].parent
        for t in trail:
            state[t] = 1


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def _dump(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def export(d: Dataset, out_dir) -> list[Path]:
    """Write the four JSONL files plus meta.json; returns written paths.

    Output is deterministic: entities are sorted by id (interactions by
    timestamp, then fields) and floats use shortest round-trip repr, so
    ingest(export(d)) reproduces d exactly.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    path = out_dir / "agents.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for aid in sorted(d.agents):
            a = d.agents[aid]
            fh.write(_dump({
                "agent_id": a.agent_id,
                "persona_text": a.persona_text,
                "created_at": format_timestamp(a.created_at),
                "follower_ids": sorted(a.follower_ids),
                "following_ids": sorted(a.following_ids),
            }) + "\n")
    written.append(path)

    path = out_dir / "posts.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for pid in sorted(d.posts):
            p = d.posts[pid]
            fh.write(_dump({
                "post_id": p.post_id,
                "author": p.author,
                "created_at": format_timestamp(p.created_at),
                "caption": p.caption,
                "image_embedding": [float(v) for v in p.image_embedding],
                "caption_embedding": (
                    [float(v) for v in p.caption_embedding]
                    if p.caption_embedding is not None else None
                ),
                "like_count": p.like_count,
                "comment_count": p.comment_count,
            }) + "\n")
    written.append(path)

    path = out_dir / "replies.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for rid in sorted(d.replies):
            r = d.replies[rid]
            fh.write(_dump({
                "reply_id": r.reply_id,
                "parent": r.parent,
                "author": r.author,
                "created_at": format_timestamp(r.created_at),
                "text": r.text,
                "image_embedding": (
                    [float(v) for v in r.image_embedding]
                    if r.image_embedding is not None else None
                ),
            }) + "\n")
    written.append(path)

    path = out_dir / "interactions.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for ev in sorted(
            d.interactions,
            key=lambda e: (e.created_at, e.kind, e.source, e.target, e.object or ""),
        ):
            fh.write(_dump({
                "source": ev.source,
                "target": ev.target,
                "kind": ev.kind,
                "created_at": format_timestamp(ev.created_at),
                "object": ev.object,
            }) + "\n")
    written.append(path)

    path = out_dir / "meta.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({
            "embedding_dim": d.embedding_dim,
            "caption_dim": d.caption_dim,
            "dataset_epoch": (
                format_timestamp(d.dataset_epoch) if d.dataset_epoch else None
            ),
            "counts": {
                "agents": len(d.agents),
                "posts": len(d.posts),
                "replies": len(d.replies),
                "interactions": len(d.interactions),
            },
        }, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(path)
    return written


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    entity: str | None = None

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "entity": self.entity}


def validate_dataset(d: Dataset) -> list[Violation]:
    """Full consistency check; returns violations as data (never raises)."""
    out: list[Violation] = []

    overlap = d.posts.keys() & d.replies.keys()
    for shared in sorted(overlap):
        out.append(Violation("id_collision", f"id {shared!r} is both a post and a reply", shared))

    for aid in sorted(d.agents):
        a = d.agents[aid]
        if aid in a.follower_ids or aid in a.following_ids:
            out.append(Violation("self_follow", f"agent {aid} follows itself", aid))
        for ref in sorted((a.follower_ids | a.following_ids) - d.agents.keys()):
            out.append(Violation("dangling_reference",
                                 f"agent {aid} references unknown agent {ref!r}", aid))

    for pid in sorted(d.posts):
        p = d.posts[pid]
        if p.author not in d.agents:
            out.append(Violation("dangling_reference",
                                 f"post {pid} has unknown author {p.author!r}", pid))
        elif p.created_at < d.agents[p.author].created_at:
            out.append(Violation(
                "timestamp_order",
                f"post {pid} at {format_timestamp(p.created_at)} predates its author's "
                f"creation at {format_timestamp(d.agents[p.author].created_at)}", pid))
        if p.like_count < 0 or p.comment_count < 0:
            out.append(Violation("negative_count", f"post {pid} has a negative count", pid))
        out.extend(_norm_violation(p.image_embedding, f"post {pid} image", pid))
        if p.caption_embedding is not None:
            out.extend(_norm_violation(p.caption_embedding, f"post {pid} caption", pid))
        if d.embedding_dim is not None and p.image_embedding.size != d.embedding_dim:
            out.append(Violation("dimension_mismatch",
                                 f"post {pid} embedding has dim {p.image_embedding.size}, "
                                 f"expected {d.embedding_dim}", pid))

    for rid in sorted(d.replies):
        r = d.replies[rid]
        if r.author not in d.agents:
            out.append(Violation("dangling_reference",
                                 f"reply {rid} has unknown author {r.author!r}", rid))
        parent_ts = None
        if r.parent in d.posts:
            parent_ts = d.posts[r.parent].created_at
        elif r.parent in d.replies:
            parent_ts = d.replies[r.parent].created_at
        else:
            out.append(Violation("dangling_reference",
                                 f"reply {rid} has dangling parent {r.parent!r}", rid))
        if parent_ts is not None and r.created_at <= parent_ts:
            out.append(Violation(
                "timestamp_order",
                f"reply {rid} at {format_timestamp(r.created_at)} is not strictly after "
                f"its parent {r.parent} at {format_timestamp(parent_ts)}", rid))
        if r.image_embedding is not None:
            out.extend(_norm_violation(r.image_embedding, f"reply {rid} image", rid))
            if d.embedding_dim is not None and r.image_embedding.size != d.embedding_dim:
                out.append(Violation("dimension_mismatch",
                                     f"reply {rid} embedding has dim {r.image_embedding.size}, "
                                     f"expected {d.embedding_dim}", rid))

    seen: dict[str, int] = {}
    for rid in d.replies:
        if seen.get(rid) == 1:
            continue
        trail, node = [], rid
        while node in d.replies and seen.get(node) != 1:
            if seen.get(node) == 0:
                out.append(Violation("reply_cycle", f"reply cycle involving {node!r}", node))
                break
            seen[node] = 0
            trail.append(node)
            node = d.replies[node].parent
        for t in trail:
            seen[t] = 1

    for i, ev in enumerate(d.interactions):
        tag = f"interaction[{i}]"
        if ev.kind not in INTERACTION_KINDS:
            out.append(Violation("bad_kind", f"{tag} has unknown kind {ev.kind!r}", tag))
        if ev.source not in d.agents:
            out.append(Violation("dangling_reference", f"{tag} unknown source {ev.source!r}", tag))
        if ev.target not in d.agents:
            out.append(Violation("dangling_reference", f"{tag} unknown target {ev.target!r}", tag))
        if ev.kind == "follow" and ev.source == ev.target:
            out.append(Violation("self_follow", f"{tag} is a self-follow by {ev.source}", tag))
        if ev.object is not None and ev.object not in d.posts and ev.object not in d.replies:
            out.append(Violation("dangling_reference", f"{tag} dangling object {ev.object!r}", tag))
    return out


def _norm_violation(vec: np.ndarray, label: str, entity: str) -> list[Violation]:
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > RENORM_TOL:
        return [Violation("embedding_not_unit",
                          f"{label} embedding norm {norm:.6f} outside tolerance", entity)]
    return []


# ---------------------------------------------------------------------------
# equality
# ---------------------------------------------------------------------------

def _emb_equal(a: np.ndarray | None, b: np.ndarray | None) -> bool:
    if (a is None) != (b is None):
        return False
    if a is None:
        return True
    return a.shape == b.shape and bool(np.array_equal(a, b))


def dataset_equal(d1: Dataset, d2: Dataset) -> bool:
    """Field-for-field equality, embeddings compared exactly."""
    if d1.embedding_dim != d2.embedding_dim or d1.caption_dim != d2.caption_dim:
        return False
    if d1.dataset_epoch != d2.dataset_epoch:
        return False
    if d1.agents.keys() != d2.agents.keys():
        return False
    for aid, a1 in d1.agents.items():
        a2 = d2.agents[aid]
        if (a1.persona_text, a1.created_at) != (a2.persona_text, a2.created_at):
            return False
        if a1.follower_ids != a2.follower_ids or a1.following_ids != a2.following_ids:
            return False
    if d1.posts.keys() != d2.posts.keys():
        return False
    for pid, p1 in d1.posts.items():
        p2 = d2.posts[pid]
        if (p1.author, p1.created_at, p1.caption, p1.like_count, p1.comment_count) != (
                p2.author, p2.created_at, p2.caption, p2.like_count, p2.comment_count):
            return False
        if not _emb_equal(p1.image_embedding, p2.image_embedding):
            return False
        if not _emb_equal(p1.caption_embedding, p2.caption_embedding):
            return False
    if d1.replies.keys() != d2.replies.keys():
        return False
    for rid, r1 in d1.replies.items():
        r2 = d2.replies[rid]
        if (r1.parent, r1.author, r1.created_at, r1.text) != (
                r2.parent, r2.author, r2.created_at, r2.text):
            return False
        if not _emb_equal(r1.image_embedding, r2.image_embedding):
            return False
    key = lambda e: (e.created_at, e.kind, e.source, e.target, e.object or "")
    return sorted(d1.interactions, key=key) == sorted(d2.interactions, key=key)
