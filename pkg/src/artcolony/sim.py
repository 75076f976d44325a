"""Discrete-event simulator of an image-first agent social network.

Agents run wake cycles (observe a feed, pick one action, sleep 10-45 min).
Actions are: publish a post, comment on a feed post, publish a visual reply
to a feed item, like a feed post, follow a feed author, or wait. All
randomness flows through a single ``numpy`` generator seeded from the
config, so a fixed seed reproduces the run event for event.

Feeds combine the most recent posts from followed accounts (fan-out on
write, bounded queue per reader) with a uniform random sample of all posts;
there is no ranking model. Visual styles come from per-agent anchor
directions; optional mechanisms layer on top:

* homophily: follow choice tilted by ``exp(beta * cos(anchor_a, anchor_b))``
* drift: at fixed window boundaries each anchor moves toward the centroid
  of the styles it interacted with during the window
* reactance: an agent whose work drew a lexicon ("criticism") comment in a
  window narrows its style noise for the following window

``randomized_adversarial_scenario`` builds on the same engine: after a
baseline period, matched agent pairs are split into treatment and control
by coin flip and designated attacker agents start directing critical
comments exclusively at treatment agents' posts.
"""

from __future__ import annotations

import hashlib
import heapq
import json
from collections import deque
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone

import numpy as np

from .dataset import (
    AgentRecord,
    Dataset,
    InteractionEvent,
    PostNode,
    ReplyNode,
    format_timestamp,
    parse_timestamp,
)
from .lexicon import ADVERSARIAL_LEXICON
from .style import SynthStyleConfig, subject_pool, unit

__all__ = [
    "SIM_EPOCH",
    "ACTIONS",
    "DEFAULT_ACTION_PROBABILITIES",
    "SimConfig",
    "GroundTruth",
    "SimResult",
    "run_simulation",
    "randomized_adversarial_scenario",
    "load_ground_truth",
]

SIM_EPOCH = datetime(2026, 1, 1, tzinfo=timezone.utc)

ACTIONS = ("post", "comment", "visual_reply", "like", "follow", "wait")

DEFAULT_ACTION_PROBABILITIES = {
    "post": 0.05,
    "comment": 0.008,
    "visual_reply": 0.025,
    "like": 0.02,
    "follow": 0.008,
    "wait": 0.889,
}

# Comment text pools. The neutral pool must stay disjoint from the
# adversarial lexicon at token level; tests enforce this.
NEUTRAL_COMMENTS = (
    "interesting texture in this one",
    "the palette reads clean",
    "strong lines throughout",
    "composition balances nicely",
    "good rhythm across the series",
    "the light treatment works",
    "bold framing, it holds together",
    "quiet piece, rewards a second look",
)

ADVERSARIAL_TEMPLATES = (
    "honestly this feels {term}",
    "{term} execution, nothing new here",
    "reads as {term} to me",
    "another {term} entry",
)

_CAPTION = "study {subject:02d} / {index}"
_PERSONA = "persona archetype {archetype:03d}"


@dataclass
class SimConfig:
    """Knobs for one simulated run.

    ``drift_lambda`` here is authoritative; it is copied into the embedded
    style config so the two can never disagree.
    """

    n_agents: int = 100
    duration_minutes: int = 14 * 1440
    seed: int = 0
    sleep_minutes: tuple[int, int] = (10, 45)
    action_probabilities: dict = field(
        default_factory=lambda: dict(DEFAULT_ACTION_PROBABILITIES)
    )
    feed_followed_recent: int = 20
    feed_random_count: int = 10
    max_following: int = 5
    homophily_beta: float = 0.0
    drift_lambda: float = 0.0
    window_days: int = 3
    adversarial_fraction: float = 0.05
    adversarial_comment_prob: float = 0.7
    reactance_coupling: str = "none"
    reactance_sigma_factor: float = 0.5
    chain_continuation_bonus: float = 2.0
    n_archetypes: int | None = None
    max_posts: int | None = None
    epoch: datetime = SIM_EPOCH
    synth_style: SynthStyleConfig = field(default_factory=SynthStyleConfig)

    def __post_init__(self):
        if self.n_agents < 1:
            raise ValueError("n_agents must be >= 1")
        if self.duration_minutes < 0:
            raise ValueError("duration_minutes must be >= 0")
        lo, hi = self.sleep_minutes
        if not (1 <= lo <= hi):
            raise ValueError("sleep_minutes must satisfy 1 <= lo <= hi")
        self.sleep_minutes = (int(lo), int(hi))
        unknown = set(self.action_probabilities) - set(ACTIONS)
        if unknown:
            raise ValueError(f"unknown action names: {sorted(unknown)}")
        probs = {a: float(self.action_probabilities.get(a, 0.0)) for a in ACTIONS}
        if any(p < 0 for p in probs.values()):
            raise ValueError("action probabilities must be non-negative")
        total = sum(probs.values())
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"action probabilities must sum to 1, got {total}")
        self.action_probabilities = probs
        if self.feed_followed_recent < 0 or self.feed_random_count < 0:
            raise ValueError("feed sizes must be >= 0")
        if self.max_following < 0:
            raise ValueError("max_following must be >= 0")
        if self.window_days < 1:
            raise ValueError("window_days must be >= 1")
        if not 0.0 <= self.adversarial_fraction <= 1.0:
            raise ValueError("adversarial_fraction must be in [0, 1]")
        if not 0.0 <= self.adversarial_comment_prob <= 1.0:
            raise ValueError("adversarial_comment_prob must be in [0, 1]")
        if self.reactance_coupling not in ("none", "anchor"):
            raise ValueError("reactance_coupling must be 'none' or 'anchor'")
        if self.reactance_sigma_factor < 0:
            raise ValueError("reactance_sigma_factor must be >= 0")
        if self.chain_continuation_bonus < 0:
            raise ValueError("chain_continuation_bonus must be >= 0")
        if self.n_archetypes is not None and self.n_archetypes < 1:
            raise ValueError("n_archetypes must be >= 1 when given")
        if not 0.0 <= self.drift_lambda <= 1.0:
            raise ValueError("drift_lambda must be in [0, 1]")
        if self.epoch.tzinfo is None:
            raise ValueError("epoch must be timezone-aware")
        if self.synth_style.drift_lambda != self.drift_lambda:
            self.synth_style = replace(self.synth_style, drift_lambda=self.drift_lambda)

    def to_dict(self) -> dict:
        d = {
            "n_agents": self.n_agents,
            "duration_minutes": self.duration_minutes,
            "seed": self.seed,
            "sleep_minutes": list(self.sleep_minutes),
            "action_probabilities": dict(self.action_probabilities),
            "feed_followed_recent": self.feed_followed_recent,
            "feed_random_count": self.feed_random_count,
            "max_following": self.max_following,
            "homophily_beta": self.homophily_beta,
            "drift_lambda": self.drift_lambda,
            "window_days": self.window_days,
            "adversarial_fraction": self.adversarial_fraction,
            "adversarial_comment_prob": self.adversarial_comment_prob,
            "reactance_coupling": self.reactance_coupling,
            "reactance_sigma_factor": self.reactance_sigma_factor,
            "chain_continuation_bonus": self.chain_continuation_bonus,
            "n_archetypes": self.n_archetypes,
            "max_posts": self.max_posts,
            "epoch": format_timestamp(self.epoch),
            "synth_style": {
                "embedding_dim": self.synth_style.embedding_dim,
                "style_weight": self.synth_style.style_weight,
                "subject_weight": self.synth_style.subject_weight,
                "noise_sigma": self.synth_style.noise_sigma,
                "subject_pool_size": self.synth_style.subject_pool_size,
                "anchor_concentration": self.synth_style.anchor_concentration,
            },
        }
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        known = {
            "n_agents", "duration_minutes", "seed", "sleep_minutes",
            "action_probabilities", "feed_followed_recent", "feed_random_count",
            "max_following", "homophily_beta", "drift_lambda", "window_days",
            "adversarial_fraction", "adversarial_comment_prob",
            "reactance_coupling", "reactance_sigma_factor",
            "chain_continuation_bonus", "n_archetypes", "max_posts",
            "epoch", "synth_style",
        }
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config key: {sorted(unknown)[0]}")
        kwargs = dict(data)
        if "sleep_minutes" in kwargs:
            kwargs["sleep_minutes"] = tuple(kwargs["sleep_minutes"])
        if "epoch" in kwargs and isinstance(kwargs["epoch"], str):
            kwargs["epoch"] = parse_timestamp(kwargs["epoch"])
        if "synth_style" in kwargs and isinstance(kwargs["synth_style"], dict):
            style_known = {
                "embedding_dim", "style_weight", "subject_weight",
                "noise_sigma", "subject_pool_size", "anchor_concentration",
                "drift_lambda",
            }
            style_unknown = set(kwargs["synth_style"]) - style_known
            if style_unknown:
                raise ValueError(
                    f"unknown config key: synth_style.{sorted(style_unknown)[0]}"
                )
            kwargs["synth_style"] = SynthStyleConfig(**kwargs["synth_style"])
        return cls(**kwargs)


@dataclass
class GroundTruth:
    """Latent state emitted alongside a simulated dataset.

    ``anchor_history[agent_id]`` maps window index -> anchor vector in force
    at the start of that window. ``ties`` records each follow with the
    anchor cosine at decision time. ``assignment`` is present only for the
    randomized adversarial scenario.
    """

    subjects: dict = field(default_factory=dict)
    archetypes: dict = field(default_factory=dict)
    adversarial_ids: list = field(default_factory=list)
    anchor_history: dict = field(default_factory=dict)
    ties: list = field(default_factory=list)
    assignment: dict | None = None

    def write_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for node_id in sorted(self.subjects):
                rec = {"kind": "subject", "id": node_id,
                       "subject": self.subjects[node_id]}
                fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
            for agent_id in sorted(self.archetypes):
                rec = {"kind": "archetype", "agent_id": agent_id,
                       "archetype": self.archetypes[agent_id]}
                fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
            if self.adversarial_ids:
                rec = {"kind": "adversarial", "agent_ids": list(self.adversarial_ids)}
                fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
            for agent_id in sorted(self.anchor_history):
                for window in sorted(self.anchor_history[agent_id]):
                    vec = self.anchor_history[agent_id][window]
                    rec = {"kind": "anchor", "agent_id": agent_id,
                           "window": window,
                           "anchor": [float(x) for x in vec]}
                    fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
            for tie in self.ties:
                rec = {"kind": "tie", **tie}
                fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
            if self.assignment is not None:
                rec = {"kind": "assignment", **self.assignment}
                fh.write(json.dumps(rec, separators=(",", ":")) + "\n")


def load_ground_truth(path) -> GroundTruth:
    gt = GroundTruth()
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            kind = rec.get("kind")
            if kind == "subject":
                gt.subjects[rec["id"]] = int(rec["subject"])
            elif kind == "archetype":
                gt.archetypes[rec["agent_id"]] = int(rec["archetype"])
            elif kind == "adversarial":
                gt.adversarial_ids = list(rec["agent_ids"])
            elif kind == "anchor":
                hist = gt.anchor_history.setdefault(rec["agent_id"], {})
                hist[int(rec["window"])] = np.asarray(rec["anchor"], dtype=float)
            elif kind == "tie":
                gt.ties.append({k: v for k, v in rec.items() if k != "kind"})
            elif kind == "assignment":
                gt.assignment = {k: v for k, v in rec.items() if k != "kind"}
            else:
                raise ValueError(f"unknown ground truth record kind: {kind!r}")
    return gt


@dataclass
class SimResult:
    dataset: Dataset
    ground_truth: GroundTruth
    event_log: list
    config: SimConfig

    def event_log_hash(self) -> str:
        """SHA-256 over the acted (non-wait) event stream."""
        h = hashlib.sha256()
        for entry in self.event_log:
            h.update(repr(entry).encode("ascii"))
            h.update(b"\n")
        return h.hexdigest()


@dataclass
class _Scenario:
    boundary_minutes: int
    n_treatment: int
    n_control: int
    n_adversarial: int
    assigned: bool = False
    adversaries: set = field(default_factory=set)
    treatment: list = field(default_factory=list)
    control: list = field(default_factory=list)
    treatment_set: set = field(default_factory=set)


class _Engine:
    """Mutable run state; index-based, materialised to a Dataset at the end."""

    def __init__(self, cfg: SimConfig, scenario: _Scenario | None = None):
        self.cfg = cfg
        self.scenario = scenario
        self.rng = np.random.default_rng(cfg.seed)
        style = cfg.synth_style
        self.dim = style.embedding_dim
        self.subjects = subject_pool(style, self.rng)

        n = cfg.n_agents
        shared = unit(self.rng.standard_normal(self.dim))
        conc = style.anchor_concentration
        k_arch = cfg.n_archetypes if cfg.n_archetypes is not None else n
        arch_anchors = np.empty((k_arch, self.dim))
        for i in range(k_arch):
            u = unit(self.rng.standard_normal(self.dim))
            arch_anchors[i] = unit(conc * shared + u)
        self.archetype = np.arange(n) % k_arch
        self.anchors = arch_anchors[self.archetype].copy()

        if scenario is not None:
            self.adversarial = np.zeros(n, dtype=bool)
        else:
            n_adv = int(round(cfg.adversarial_fraction * n))
            self.adversarial = np.zeros(n, dtype=bool)
            if n_adv > 0:
                picks = self.rng.choice(n, size=min(n_adv, n), replace=False)
                self.adversarial[picks] = True

        self.following = [set() for _ in range(n)]
        self.followers = [set() for _ in range(n)]
        self.inbox = [deque(maxlen=cfg.feed_followed_recent) for _ in range(n)]

        # posts: parallel lists indexed by creation order
        self.post_author: list[int] = []
        self.post_time: list[int] = []
        self.post_subject: list[int] = []
        self.post_emb: list[np.ndarray] = []
        self.post_likes: list[int] = []
        self.post_comments: list[int] = []
        self.tree_img: list[list[int]] = []  # visual-reply indices under each post
        self.agent_posts: list[list[int]] = [[] for _ in range(n)]

        # replies: parallel lists indexed by creation order
        self.r_author: list[int] = []
        self.r_time: list[int] = []
        self.r_parent: list[tuple] = []  # ("p"|"r", index)
        self.r_root: list[int] = []      # root post index
        self.r_subject: list[int | None] = []
        self.r_emb: list[np.ndarray | None] = []
        self.r_text: list[str] = []

        self.events: list[tuple] = []  # (t, actor, action, obj_kind, obj_idx)
        self.interactions: list[tuple] = []  # (t, src, tgt, kind, obj_kind, obj_idx)

        self.window_minutes = cfg.window_days * 1440
        self.window_index = 0
        self.sigma_factor = np.ones(n)
        self.criticized = np.zeros(n, dtype=bool)
        self.win_sum = np.zeros((n, self.dim))
        self.win_cnt = np.zeros(n, dtype=np.int64)
        self.win_weights: list[dict] = [dict() for _ in range(n)]

        self.anchor_snapshots: list[tuple] = [(0, self.anchors.copy())]
        self.ties: list[tuple] = []  # (src, tgt, t, cosine)

    # -- id formatting ---------------------------------------------------
    def _agent_id(self, idx: int) -> str:
        return f"a{idx:0{self._aw}d}"

    # -- window bookkeeping ----------------------------------------------
    def _end_window(self) -> None:
        cfg = self.cfg
        n = cfg.n_agents
        if cfg.drift_lambda > 0.0:
            lam = cfg.drift_lambda
            have = self.win_cnt > 0
            cents = np.zeros_like(self.win_sum)
            if have.any():
                cents[have] = self.win_sum[have] / self.win_cnt[have, None]
            for a in range(n):
                wts = self.win_weights[a]
                if not wts:
                    continue
                acc = np.zeros(self.dim)
                total = 0.0
                for b, w in wts.items():
                    if have[b]:
                        acc += w * cents[b]
                        total += w
                if total <= 0.0:
                    continue
                blended = (1.0 - lam) * self.anchors[a] + lam * (acc / total)
                norm = np.linalg.norm(blended)
                if norm > 0.0:
                    self.anchors[a] = blended / norm
            for a in range(n):
                self.win_weights[a].clear()
            self.win_sum[:] = 0.0
            self.win_cnt[:] = 0
        if cfg.reactance_coupling == "anchor":
            self.sigma_factor = np.where(
                self.criticized, cfg.reactance_sigma_factor, 1.0
            )
        self.criticized[:] = False
        self.window_index += 1
        self.anchor_snapshots.append((self.window_index, self.anchors.copy()))

    def _add_weight(self, a: int, b: int, w: float) -> None:
        if self.cfg.drift_lambda > 0.0 and a != b:
            d = self.win_weights[a]
            d[b] = d.get(b, 0.0) + w

    # -- content creation -------------------------------------------------
    def _synth(self, a: int, subject: int) -> np.ndarray:
        style = self.cfg.synth_style
        sigma = style.noise_sigma * self.sigma_factor[a]
        raw = (
            style.style_weight * self.anchors[a]
            + style.subject_weight * self.subjects[subject]
            + sigma * self.rng.standard_normal(self.dim)
        )
        norm = np.linalg.norm(raw)
        while norm == 0.0:
            raw = (
                style.style_weight * self.anchors[a]
                + style.subject_weight * self.subjects[subject]
                + sigma * self.rng.standard_normal(self.dim)
            )
            norm = np.linalg.norm(raw)
        return raw / norm

    def _do_post(self, a: int, t: int) -> None:
        subject = int(self.rng.integers(self.cfg.synth_style.subject_pool_size))
        emb = self._synth(a, subject)
        pidx = len(self.post_author)
        self.post_author.append(a)
        self.post_time.append(t)
        self.post_subject.append(subject)
        self.post_emb.append(emb)
        self.post_likes.append(0)
        self.post_comments.append(0)
        self.tree_img.append([])
        self.agent_posts[a].append(pidx)
        if self.cfg.drift_lambda > 0.0:
            self.win_sum[a] += emb
            self.win_cnt[a] += 1
        for f in self.followers[a]:
            self.inbox[f].append(pidx)
        self.events.append((t, a, "post", "p", pidx))

    def _comment_text(self, a: int, force_adversarial: bool = False) -> tuple[str, bool]:
        adversarial = force_adversarial or bool(self.adversarial[a])
        if adversarial and self.rng.random() < self.cfg.adversarial_comment_prob:
            term = ADVERSARIAL_LEXICON[int(self.rng.integers(len(ADVERSARIAL_LEXICON)))]
            tmpl = ADVERSARIAL_TEMPLATES[int(self.rng.integers(len(ADVERSARIAL_TEMPLATES)))]
            return tmpl.format(term=term), True
        return NEUTRAL_COMMENTS[int(self.rng.integers(len(NEUTRAL_COMMENTS)))], False

    def _do_comment(self, a: int, t: int, pidx: int, force_adversarial=False) -> None:
        text, critical = self._comment_text(a, force_adversarial)
        ridx = len(self.r_author)
        self.r_author.append(a)
        self.r_time.append(t)
        self.r_parent.append(("p", pidx))
        self.r_root.append(pidx)
        self.r_subject.append(None)
        self.r_emb.append(None)
        self.r_text.append(text)
        self.post_comments[pidx] += 1
        target = self.post_author[pidx]
        if critical:
            self.criticized[target] = True
        self.interactions.append((t, a, target, "comment", "p", pidx))
        self._add_weight(a, target, 2.0)
        self.events.append((t, a, "comment", "r", ridx))

    def _do_visual_reply(self, a: int, t: int, kind: str, idx: int) -> None:
        if kind == "p":
            subject = self.post_subject[idx]
            parent_author = self.post_author[idx]
            root = idx
        else:
            subject = self.r_subject[idx]
            parent_author = self.r_author[idx]
            root = self.r_root[idx]
        emb = self._synth(a, subject)
        ridx = len(self.r_author)
        self.r_author.append(a)
        self.r_time.append(t)
        self.r_parent.append((kind, idx))
        self.r_root.append(root)
        self.r_subject.append(subject)
        self.r_emb.append(emb)
        self.r_text.append("")
        self.post_comments[root] += 1
        self.tree_img[root].append(ridx)
        if self.cfg.drift_lambda > 0.0:
            self.win_sum[a] += emb
            self.win_cnt[a] += 1
        if parent_author != a:
            self.interactions.append((t, a, parent_author, "comment", kind, idx))
            self._add_weight(a, parent_author, 2.0)
        self.events.append((t, a, "visual_reply", "r", ridx))

    def _do_like(self, a: int, t: int, pidx: int) -> None:
        self.post_likes[pidx] += 1
        target = self.post_author[pidx]
        self.interactions.append((t, a, target, "like", "p", pidx))
        self._add_weight(a, target, 1.0)
        self.events.append((t, a, "like", "p", pidx))

    def _do_follow(self, a: int, t: int, candidates: list[int]) -> None:
        beta = self.cfg.homophily_beta
        if beta != 0.0:
            sims = self.anchors[candidates] @ self.anchors[a]
            logits = beta * sims
            logits -= logits.max()
            w = np.exp(logits)
            w /= w.sum()
            choice = candidates[int(self.rng.choice(len(candidates), p=w))]
        else:
            choice = candidates[int(self.rng.integers(len(candidates)))]
        self.following[a].add(choice)
        self.followers[choice].add(a)
        cosine = float(self.anchors[a] @ self.anchors[choice])
        self.ties.append((a, choice, t, cosine))
        self.interactions.append((t, a, choice, "follow", None, None))
        self._add_weight(a, choice, 3.0)
        self.events.append((t, a, "follow", "a", choice))

    # -- feed + decision ---------------------------------------------------
    def _feed(self, a: int, t: int) -> list[int]:
        # Content becomes visible the minute after creation, so no reply can
        # share a timestamp with its parent.
        feed = []
        seen = set()
        for pidx in reversed(self.inbox[a]):
            if pidx not in seen and self.post_time[pidx] < t:
                seen.add(pidx)
                feed.append(pidx)
        n_posts = len(self.post_author)
        k = self.cfg.feed_random_count
        if n_posts > 0 and k > 0:
            for pidx in self.rng.integers(0, n_posts, size=k):
                pidx = int(pidx)
                if (pidx not in seen and self.post_author[pidx] != a
                        and self.post_time[pidx] < t):
                    seen.add(pidx)
                    feed.append(pidx)
        return feed

    def _cycle(self, a: int, t: int) -> None:
        cfg = self.cfg
        scenario = self.scenario
        if scenario is not None and scenario.assigned and a in scenario.adversaries:
            self._adversary_cycle(a, t)
            return
        feed = self._feed(a, t)
        probs = cfg.action_probabilities
        w_post = probs["post"]
        if cfg.max_posts is not None and len(self.post_author) >= cfg.max_posts:
            w_post = 0.0
        feed_ok = bool(feed)
        w_comment = probs["comment"] if feed_ok else 0.0
        w_like = probs["like"] if feed_ok else 0.0
        w_follow = 0.0
        candidates: list[int] = []
        if feed_ok and len(self.following[a]) < cfg.max_following and probs["follow"] > 0:
            cand = {self.post_author[p] for p in feed}
            cand -= self.following[a]
            cand.discard(a)
            if cand:
                candidates = sorted(cand)
                w_follow = probs["follow"]
        w_vr = probs["visual_reply"] if feed_ok else 0.0
        w_wait = probs["wait"]
        total = w_post + w_comment + w_vr + w_like + w_follow + w_wait
        if total <= 0.0:
            return
        u = self.rng.random() * total
        if u < w_post:
            self._do_post(a, t)
            return
        u -= w_post
        if u < w_comment:
            pidx = feed[int(self.rng.integers(len(feed)))]
            self._do_comment(a, t, pidx)
            return
        u -= w_comment
        if u < w_vr:
            kind, idx = self._pick_visual_target(feed, t)
            self._do_visual_reply(a, t, kind, idx)
            return
        u -= w_vr
        if u < w_like:
            pidx = feed[int(self.rng.integers(len(feed)))]
            self._do_like(a, t, pidx)
            return
        u -= w_like
        if u < w_follow:
            self._do_follow(a, t, candidates)
            return
        # wait: no-op

    def _pick_visual_target(self, feed: list[int], t: int) -> tuple[str, int]:
        """Uniform over feed posts, replies up-weighted by the chain bonus."""
        bonus = self.cfg.chain_continuation_bonus
        trees = [[r for r in self.tree_img[p] if self.r_time[r] < t] for p in feed]
        n_posts = len(feed)
        n_replies = sum(len(tree) for tree in trees)
        total = n_posts + bonus * n_replies
        u = self.rng.random() * total
        if u < n_posts or n_replies == 0:
            return "p", feed[min(int(u), n_posts - 1)]
        u = (u - n_posts) / bonus
        for p, tree in zip(feed, trees):
            if u < len(tree):
                return "r", tree[min(int(u), len(tree) - 1)]
            u -= len(tree)
        return "p", feed[-1]  # numeric edge; effectively unreachable

    def _adversary_cycle(self, a: int, t: int) -> None:
        scenario = self.scenario
        assert scenario is not None
        targets = scenario.treatment
        agent = targets[int(self.rng.integers(len(targets)))]
        posts = [p for p in self.agent_posts[agent] if self.post_time[p] < t]
        if not posts:
            return
        recent = posts[-self.cfg.feed_followed_recent:]
        pidx = recent[int(self.rng.integers(len(recent)))]
        self._do_comment(a, t, pidx, force_adversarial=True)

    def _assign_scenario(self) -> None:
        scenario = self.scenario
        assert scenario is not None
        n = self.cfg.n_agents
        adv = self.rng.choice(n, size=scenario.n_adversarial, replace=False)
        scenario.adversaries = {int(x) for x in adv}
        eligible = [a for a in range(n) if a not in scenario.adversaries]
        eligible.sort(
            key=lambda a: (-len(self.agent_posts[a]), -len(self.followers[a]), a)
        )
        n_pairs = min(scenario.n_treatment, scenario.n_control)
        if len(eligible) < 2 * n_pairs:
            raise ValueError(
                "not enough agents to form matched pairs: "
                f"need {2 * n_pairs}, have {len(eligible)}"
            )
        for i in range(n_pairs):
            x, y = eligible[2 * i], eligible[2 * i + 1]
            if self.rng.random() < 0.5:
                x, y = y, x
            scenario.treatment.append(x)
            scenario.control.append(y)
        scenario.treatment_set = set(scenario.treatment)
        scenario.assigned = True

    # -- main loop ---------------------------------------------------------
    def run(self) -> None:
        cfg = self.cfg
        lo, hi = cfg.sleep_minutes
        duration = cfg.duration_minutes
        heap: list[tuple[int, int]] = []
        for a in range(cfg.n_agents):
            t0 = int(self.rng.integers(0, hi + 1))
            if t0 < duration:
                heapq.heappush(heap, (t0, a))
        next_boundary = self.window_minutes
        scenario = self.scenario
        while heap:
            t, a = heapq.heappop(heap)
            while t >= next_boundary:
                self._end_window()
                next_boundary += self.window_minutes
            if scenario is not None and not scenario.assigned and t >= scenario.boundary_minutes:
                self._assign_scenario()
            self._cycle(a, t)
            t_next = t + int(self.rng.integers(lo, hi + 1))
            if t_next < duration:
                heapq.heappush(heap, (t_next, a))

    # -- materialisation ----------------------------------------------------
    def build_result(self) -> SimResult:
        cfg = self.cfg
        n = cfg.n_agents
        self._aw = max(4, len(str(max(n - 1, 0))))
        pw = max(6, len(str(max(len(self.post_author) - 1, 0))))
        rw = max(6, len(str(max(len(self.r_author) - 1, 0))))
        epoch = cfg.epoch

        def pid(idx: int) -> str:
            return f"p{idx:0{pw}d}"

        def rid(idx: int) -> str:
            return f"r{idx:0{rw}d}"

        def node_id(kind: str, idx: int) -> str:
            return pid(idx) if kind == "p" else rid(idx)

        def when(minutes: int) -> datetime:
            return epoch + timedelta(minutes=minutes)

        agents = {}
        for a in range(n):
            aid = self._agent_id(a)
            agents[aid] = AgentRecord(
                agent_id=aid,
                persona_text=_PERSONA.format(archetype=int(self.archetype[a])),
                created_at=epoch,
                follower_ids={self._agent_id(b) for b in self.followers[a]},
                following_ids={self._agent_id(b) for b in self.following[a]},
            )

        posts = {}
        for i, author in enumerate(self.post_author):
            posts[pid(i)] = PostNode(
                post_id=pid(i),
                author=self._agent_id(author),
                created_at=when(self.post_time[i]),
                caption=_CAPTION.format(subject=self.post_subject[i], index=i),
                image_embedding=self.post_emb[i],
                like_count=self.post_likes[i],
                comment_count=self.post_comments[i],
            )

        replies = {}
        for i, author in enumerate(self.r_author):
            kind, idx = self.r_parent[i]
            replies[rid(i)] = ReplyNode(
                reply_id=rid(i),
                parent=node_id(kind, idx),
                author=self._agent_id(author),
                created_at=when(self.r_time[i]),
                text=self.r_text[i],
                image_embedding=self.r_emb[i],
            )

        interactions = []
        for t, src, tgt, kind, obj_kind, obj_idx in self.interactions:
            obj = node_id(obj_kind, obj_idx) if obj_kind is not None else None
            interactions.append(
                InteractionEvent(
                    source=self._agent_id(src),
                    target=self._agent_id(tgt),
                    kind=kind,
                    created_at=when(t),
                    object=obj,
                )
            )

        dataset = Dataset(
            agents=agents,
            posts=posts,
            replies=replies,
            interactions=interactions,
            embedding_dim=self.dim,
            dataset_epoch=epoch,
        )

        gt = GroundTruth()
        for i in range(len(self.post_author)):
            gt.subjects[pid(i)] = int(self.post_subject[i])
        for i in range(len(self.r_author)):
            if self.r_subject[i] is not None:
                gt.subjects[rid(i)] = int(self.r_subject[i])
        for a in range(n):
            gt.archetypes[self._agent_id(a)] = int(self.archetype[a])
        adv_ids = [self._agent_id(a) for a in np.flatnonzero(self.adversarial)]
        if self.scenario is not None and self.scenario.assigned:
            adv_ids = sorted(self._agent_id(a) for a in self.scenario.adversaries)
        gt.adversarial_ids = adv_ids
        for window, arr in self.anchor_snapshots:
            for a in range(n):
                gt.anchor_history.setdefault(self._agent_id(a), {})[window] = arr[a]
        for src, tgt, t, cosine in self.ties:
            gt.ties.append({
                "source": self._agent_id(src),
                "target": self._agent_id(tgt),
                "created_at": format_timestamp(when(t)),
                "anchor_cosine": cosine,
            })
        if self.scenario is not None and self.scenario.assigned:
            sc = self.scenario
            gt.assignment = {
                "treatment_ids": sorted(self._agent_id(a) for a in sc.treatment),
                "control_ids": sorted(self._agent_id(a) for a in sc.control),
                "adversarial_ids": sorted(self._agent_id(a) for a in sc.adversaries),
                "treatment_start": format_timestamp(when(sc.boundary_minutes)),
                "pre_days": sc.boundary_minutes // 1440,
            }

        log = []
        for t, actor, action, obj_kind, obj_idx in self.events:
            obj = node_id(obj_kind, obj_idx) if obj_kind in ("p", "r") else (
                self._agent_id(obj_idx) if obj_kind == "a" else None
            )
            log.append((t, self._agent_id(actor), action, obj))

        return SimResult(dataset=dataset, ground_truth=gt, event_log=log, config=cfg)


def run_simulation(cfg: SimConfig | None = None) -> SimResult:
    """Run one simulation to completion and materialise its dataset."""
    if cfg is None:
        cfg = SimConfig()
    engine = _Engine(cfg)
    engine.run()
    return engine.build_result()


def randomized_adversarial_scenario(
    cfg: SimConfig,
    *,
    n_treatment: int = 20,
    n_control: int = 20,
    days: int = 7,
    n_adversarial: int = 3,
    seed: int | None = None,
) -> SimResult:
    """Two-period run with randomized targeted criticism in the second period.

    The first ``days`` days are a plain baseline. At the boundary,
    ``n_adversarial`` agents are designated attackers; the remaining agents
    are ranked by (baseline post count, follower count), paired off in rank
    order, and each pair is split treatment/control by coin flip. For the
    second ``days`` days the attackers comment only on recent posts by
    treatment agents, inserting a lexicon term with the configured
    probability. The assignment is recorded in the result's ground truth.

    Drift/reactance windows default to one day here so that a reaction in
    one day shows up in the next day's output; pass a config with a
    different ``window_days`` to override.
    """
    if days < 1:
        raise ValueError("days must be >= 1")
    if n_treatment < 1 or n_control < 1 or n_adversarial < 1:
        raise ValueError("scenario group sizes must be >= 1")
    needed = n_treatment + n_control + n_adversarial
    if cfg.n_agents < needed:
        raise ValueError(
            f"scenario needs at least {needed} agents, config has {cfg.n_agents}"
        )
    run_cfg = replace(
        cfg,
        duration_minutes=2 * days * 1440,
        adversarial_fraction=0.0,
        window_days=1 if cfg.window_days == SimConfig.window_days else cfg.window_days,
        seed=cfg.seed if seed is None else seed,
    )
    scenario = _Scenario(
        boundary_minutes=days * 1440,
        n_treatment=n_treatment,
        n_control=n_control,
        n_adversarial=n_adversarial,
    )
    engine = _Engine(run_cfg, scenario=scenario)
    engine.run()
    if not scenario.assigned:
        raise RuntimeError("scenario boundary was never reached; duration too short")
    return engine.build_result()
