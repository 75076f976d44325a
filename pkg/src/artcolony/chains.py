"""Visual reply chains: extraction and per-chain style metrics.

A chain is a maximal root-to-leaf path that starts at a post and descends
through image-bearing replies only (text comments break the path). A
branching node yields one chain per maximal branch, so chains may share
prefixes. Chain depth counts replies (the root is node 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .dataset import Dataset, PostNode, ReplyNode

__all__ = [
    "Chain",
    "ChainNull",
    "LagCoherence",
    "EngagementStats",
    "extract_chains",
    "chain_coherence",
    "chain_style_diversity",
    "chain_null_distribution",
    "lag_k_coherence",
    "chain_engagement_stats",
]


@dataclass(eq=False)
class Chain:
    root: PostNode
    replies: list[ReplyNode]

    @property
    def depth(self) -> int:
        return len(self.replies)

    @property
    def chain_id(self) -> str:
        tail = self.replies[-1].reply_id if self.replies else ""
        return f"{self.root.post_id}:{tail}"

    @cached_property
    def embeddings(self) -> np.ndarray:
        """Node embeddings in path order, shape (depth + 1, dim)."""
        return np.stack([self.root.image_embedding]
                        + [r.image_embedding for r in self.replies])

    @property
    def authors(self) -> list[str]:
        return [self.root.author] + [r.author for r in self.replies]

    def distinct_agents(self) -> int:
        return len(set(self.authors))


def extract_chains(d: Dataset, min_depth: int = 2) -> list[Chain]:
    """All maximal image-reply paths with depth >= min_depth.

    Children are visited in (created_at, reply_id) order, and posts in id
    order, so the output ordering is deterministic. Along any single path
    timestamps increase monotonically in valid data, so each chain is
    already in creation order.
    """
    by_parent = d.replies_by_parent()
    chains: list[Chain] = []
    for pid in sorted(d.posts):
        root = d.posts[pid]
        # Iterative DFS carrying the current reply path.
        stack: list[tuple[ReplyNode | None, list[ReplyNode]]] = [(None, [])]
        while stack:
            node, path = stack.pop()
            node_id = pid if node is None else node.reply_id
            kids = [r for r in by_parent.get(node_id, []) if r.has_image]
            if not kids:
                if len(path) >= min_depth:
                    chains.append(Chain(root, path))
                continue
            # Reversed so the earliest child is processed first (LIFO stack).
            for kid in reversed(kids):
                stack.append((kid, path + [kid]))
    return chains


def _pair_cosines(emb: np.ndarray, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    # Embeddings are unit-norm, so dot products are cosines.
    return np.einsum("ij,ij->i", emb[i], emb[j])


def chain_coherence(chain: Chain, *, include_same_author: bool = True) -> float | None:
    """Mean cosine over adjacent node pairs (the chain coherence score).

    With include_same_author=False, adjacent pairs sharing an author are
    masked out; returns None when every pair is masked.
    """
    k = chain.depth
    if k < 1:
        raise ValueError("chain coherence needs depth >= 1")
    emb = chain.embeddings
    idx = np.arange(k)
    values = _pair_cosines(emb, idx, idx + 1)
    if not include_same_author:
        authors = chain.authors
        keep = np.array([authors[i] != authors[i + 1] for i in range(k)])
        if not keep.any():
            return None
        values = values[keep]
    return float(values.mean())


def chain_style_diversity(chain: Chain) -> float:
    """Mean pairwise cosine distance over all node pairs in the chain."""
    if chain.depth < 1:
        raise ValueError("chain style diversity needs depth >= 1")
    emb = chain.embeddings
    i, j = np.triu_indices(emb.shape[0], k=1)
    return float(np.mean(1.0 - _pair_cosines(emb, i, j)))


# ---------------------------------------------------------------------------
# null machinery
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class ChainNull:
    """Null distribution for a corpus-level chain statistic.

    resample_means holds one depth-matched pseudo-corpus mean per resample
    (the permutation-style null for the observed corpus mean); values is a
    flat sample of per-pseudo-chain statistics (capped) for two-sample
    comparisons against the observed per-chain values.
    """

    statistic: str  # "coherence" | "diversity"
    resample_means: np.ndarray
    values: np.ndarray
    n_resamples: int

    @property
    def mean(self) -> float:
        return float(self.resample_means.mean())


def _distinct_pairs(rng, n_pool: int, n_pairs: int) -> tuple[np.ndarray, np.ndarray]:
    a = rng.integers(0, n_pool, n_pairs)
    b = rng.integers(0, n_pool, n_pairs)
    clash = a == b
    while clash.any():
        b[clash] = rng.integers(0, n_pool, int(clash.sum()))
        clash = a == b
    return a, b


def chain_null_distribution(
    pool: np.ndarray,
    depths,
    statistic: str = "coherence",
    *,
    n_resamples: int = 5000,
    seed=None,
    values_cap: int = 5000,
) -> ChainNull:
    """Depth-matched null for corpus chain statistics.

    Per resample and per chain of depth k: "coherence" draws k random
    distinct-index pairs from the pooled image embeddings (posts plus
    image-bearing replies) and takes
    the mean cosine; "diversity" draws k+1 embeddings (independent draws)
    and takes the mean pairwise cosine distance. The resample statistic is
    the mean over pseudo-chains, mirroring the observed corpus mean.
    """
    if statistic not in ("coherence", "diversity"):
        raise ValueError(f"unknown statistic {statistic!r}")
    depths = np.asarray(list(depths), dtype=np.int64)
    if depths.size == 0:
        raise ValueError("no chains supplied")
    if (depths < 1).any():
        raise ValueError("chain depths must be >= 1")
    pool = np.asarray(pool, dtype=float)
    if pool.ndim != 2 or pool.shape[0] < 2:
        raise ValueError("pool must be (n >= 2, dim)")
    rng = np.random.default_rng(seed)
    n_pool = pool.shape[0]
    n_chains = depths.size

    if statistic == "coherence":
        counts = depths  # k adjacent pairs per chain
    else:
        counts = depths * (depths + 1) // 2  # C(k+1, 2) pairs per chain
    offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
    total_pairs = int(counts.sum())

    # For diversity, pre-build the within-set pair template once: node
    # slots are contiguous per chain, pairs index into the slot array.
    if statistic == "diversity":
        sizes = depths + 1
        slot_offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]])
        total_slots = int(sizes.sum())
        pi, pj = [], []
        for c in range(n_chains):
            i, j = np.triu_indices(sizes[c], k=1)
            pi.append(slot_offsets[c] + i)
            pj.append(slot_offsets[c] + j)
        pair_i = np.concatenate(pi)
        pair_j = np.concatenate(pj)

    means = np.empty(n_resamples)
    collected: list[np.ndarray] = []
    collected_n = 0
    for r in range(n_resamples):
        if statistic == "coherence":
            a, b = _distinct_pairs(rng, n_pool, total_pairs)
            vals = _pair_cosines(pool, a, b)
        else:
            slots = rng.integers(0, n_pool, total_slots)
            vals = 1.0 - _pair_cosines(pool, slots[pair_i], slots[pair_j])
        chain_means = np.add.reduceat(vals, offsets) / counts
        means[r] = chain_means.mean()
        if collected_n < values_cap:
            collected.append(chain_means)
            collected_n += chain_means.size
    values = np.concatenate(collected)[:values_cap] if collected else np.empty(0)
    return ChainNull(statistic, means, values, n_resamples)


@dataclass(frozen=True)
class LagCoherence:
    lag: int
    n_pairs: int
    observed_mean: float
    null_mean: float
    delta: float
    p_value: float


def lag_k_coherence(
    chains,
    lag: int,
    pool: np.ndarray,
    *,
    n_resamples: int = 2000,
    seed=None,
) -> LagCoherence | None:
    """Mean cosine over all lag-separated node pairs, minus a random null.

    Pools pairs (v_i, v_{i+lag}) across every chain with depth >= lag;
    the null redraws the same number of distinct-index random pairs per
    resample. Returns None when no chain is deep enough.
    """
    if lag < 1:
        raise ValueError("lag must be >= 1")
    values = []
    for chain in chains:
        if chain.depth < lag:
            continue
        emb = chain.embeddings
        i = np.arange(emb.shape[0] - lag)
        values.append(_pair_cosines(emb, i, i + lag))
    if not values:
        return None
    observed = np.concatenate(values)
    pool = np.asarray(pool, dtype=float)
    rng = np.random.default_rng(seed)
    null = np.empty(n_resamples)
    for r in range(n_resamples):
        a, b = _distinct_pairs(rng, pool.shape[0], observed.size)
        null[r] = _pair_cosines(pool, a, b).mean()
    obs_mean = float(observed.mean())
    null_mean = float(null.mean())
    count = int(np.sum(np.abs(null - null_mean) >= abs(obs_mean - null_mean)))
    p = (1 + count) / (n_resamples + 1)
    return LagCoherence(lag, int(observed.size), obs_mean, null_mean,
                        obs_mean - null_mean, p)


@dataclass(frozen=True)
class EngagementStats:
    in_chain_mean: float | None
    out_chain_mean: float | None
    ratio: float | None
    n_in: int
    n_out: int


def chain_engagement_stats(d: Dataset, chains) -> EngagementStats:
    """Mean engagement (likes + comments) of chain-root posts vs the rest."""
    roots = {c.root.post_id for c in chains}
    eng_in, eng_out = [], []
    for pid, post in d.posts.items():
        engagement = post.like_count + post.comment_count
        (eng_in if pid in roots else eng_out).append(engagement)
    in_mean = float(np.mean(eng_in)) if eng_in else None
    out_mean = float(np.mean(eng_out)) if eng_out else None
    ratio = None
    if in_mean is not None and out_mean is not None and out_mean > 0:
        ratio = in_mean / out_mean
    return EngagementStats(in_mean, out_mean, ratio, len(eng_in), len(eng_out))
