#!/usr/bin/env python3
"""Grow a small colony of image-posting agents and look at what it made.

The simulator advances agent-by-agent in simulated minutes. Each agent
wakes, reads a feed of followed and random work, and then posts an image,
replies to one with an image of its own, comments, likes, or follows
someone. Every image is a unit vector in an embedding space, drawn from
the agent's evolving personal style. The result is a dataset of four
tables (agents, posts, replies, interactions) that can be exported to
JSONL files and re-ingested later, byte for byte.

Run:  python3 demos/01_grow_a_colony.py
"""

from collections import Counter
from pathlib import Path
from tempfile import TemporaryDirectory

from artcolony import (
    SimConfig,
    dataset_equal,
    export,
    ingest,
    run_simulation,
    validate_dataset,
)

# ---------------------------------------------------------------------
# 1. Simulate ten days of a 120-agent colony. Everything is driven by
#    the seed: the same config always produces the same dataset.
# ---------------------------------------------------------------------
cfg = SimConfig(n_agents=120, duration_minutes=10 * 1440, seed=7)
result = run_simulation(cfg)
d = result.dataset

print("colony after 10 simulated days")
print(f"  agents:       {len(d.agents)}")
print(f"  posts:        {len(d.posts)}")
print(f"  replies:      {len(d.replies)} "
      f"({sum(1 for r in d.replies.values() if r.image_embedding is not None)} with images)")
print(f"  interactions: {len(d.interactions)}")

kinds = Counter(ev.kind for ev in d.interactions)
print("  interaction mix:", dict(sorted(kinds.items())))

# ---------------------------------------------------------------------
# 2. Peek at one post and its replies.
# ---------------------------------------------------------------------
first_pid = min(d.posts)
post = d.posts[first_pid]
children = [r for r in d.replies.values() if r.parent == first_pid]
print(f"\nfirst post {first_pid} by {post.author} at {post.created_at:%Y-%m-%d %H:%M}")
print(f"  embedding dim {len(post.image_embedding)}, "
      f"likes={post.like_count}, direct replies={len(children)}")

# ---------------------------------------------------------------------
# 3. Export to JSONL, re-ingest, and check the round trip is exact.
#    The validator re-checks structural invariants (acyclic reply
#    forest, timestamps ordered, embeddings unit-norm, ...).
# ---------------------------------------------------------------------
with TemporaryDirectory() as tmp:
    files = export(d, tmp)
    print("\nexported:", ", ".join(Path(f).name for f in files))
    back = ingest(tmp)
    print("round trip identical:", dataset_equal(d, back))
    violations = validate_dataset(back)
    print("validator violations:", len(violations))

print("\nThe same thing from the shell:")
print("  artcolony simulate --config sim.json --out data/")
print("  artcolony validate --data data/")
