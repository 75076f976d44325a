"""Shared fixtures: small deterministic datasets and cached reference sims.

The acceptance tests print one PASS/FAIL line per criterion; those lines
are collected here and emitted in the terminal summary so they survive
pytest's output capture.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from artcolony.dataset import (
    AgentRecord,
    Dataset,
    InteractionEvent,
    PostNode,
    ReplyNode,
)
from artcolony.sim import SimConfig, run_simulation

EPOCH = datetime(2026, 1, 1, tzinfo=timezone.utc)


def unit_vec(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return v / np.linalg.norm(v)


def ts(minutes: float) -> datetime:
    return EPOCH + timedelta(minutes=minutes)


def make_dataset(agents, posts, replies=(), interactions=(), dim=None) -> Dataset:
    """Assemble a Dataset from terse tuples.

    agents: (agent_id,) or (agent_id, follower_ids, following_ids)
    posts: (post_id, author, minutes, embedding, [likes, comments])
    replies: (reply_id, parent, author, minutes, text, embedding-or-None)
    interactions: (source, target, kind, minutes, object)
    """
    agent_map = {}
    for row in agents:
        aid = row[0] if isinstance(row, tuple) else row
        followers = set(row[1]) if isinstance(row, tuple) and len(row) > 1 else set()
        following = set(row[2]) if isinstance(row, tuple) and len(row) > 2 else set()
        agent_map[aid] = AgentRecord(
            agent_id=aid, persona_text=f"persona {aid}", created_at=EPOCH,
            follower_ids=followers, following_ids=following,
        )
    post_map = {}
    for row in posts:
        pid, author, minutes, emb = row[:4]
        likes = row[4] if len(row) > 4 else 0
        comments = row[5] if len(row) > 5 else 0
        post_map[pid] = PostNode(
            post_id=pid, author=author, created_at=ts(minutes),
            caption=f"caption {pid}", image_embedding=unit_vec(emb),
            like_count=likes, comment_count=comments,
        )
    reply_map = {}
    for rid, parent, author, minutes, text, emb in replies:
        reply_map[rid] = ReplyNode(
            reply_id=rid, parent=parent, author=author, created_at=ts(minutes),
            text=text,
            image_embedding=None if emb is None else unit_vec(emb),
        )
    events = [
        InteractionEvent(source=s, target=t, kind=k, created_at=ts(m), object=o)
        for s, t, k, m, o in interactions
    ]
    if dim is None:
        if post_map:
            dim = next(iter(post_map.values())).image_embedding.size
        else:
            dim = 4
    return Dataset(
        agents=agent_map, posts=post_map, replies=reply_map,
        interactions=events, embedding_dim=dim, dataset_epoch=EPOCH,
    )


@pytest.fixture(scope="session")
def small_sim():
    """Reference sim reused across test modules: 100 agents, 14 days."""
    return run_simulation(SimConfig(n_agents=100, duration_minutes=14 * 1440,
                                    seed=1))


@pytest.fixture(scope="session")
def small_dataset(small_sim):
    return small_sim.dataset


# --- acceptance-line reporting ---------------------------------------------

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion, then assert."""

    def record(criterion: str, ok: bool, detail: str) -> None:
        line = f"{criterion}: {'PASS' if ok else 'FAIL'} — {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
