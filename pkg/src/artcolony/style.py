"""Style-space geometry: unit-norm embeddings, centroids, and the
synthetic embedding generator used by the simulator.

Embeddings are plain float ndarrays constrained to unit L2 norm.
Centroids are arithmetic means of unit vectors and are deliberately NOT
renormalized — their norm encodes dispersion, and every similarity here
is cosine (scale-free) anyway.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .dataset import Dataset, window_index

__all__ = [
    "StyleCentroid",
    "SynthStyleConfig",
    "unit",
    "require_unit",
    "cosine",
    "centroid",
    "agent_style_centroids",
    "agent_centroids",
    "within_agent_spread",
    "subject_pool",
    "synth_embedding",
    "apply_drift",
]


def unit(vec: np.ndarray) -> np.ndarray:
    """Scale to unit norm; zero vectors are an error."""
    vec = np.asarray(vec, dtype=float)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return vec / norm


def require_unit(vec: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    vec = np.asarray(vec, dtype=float)
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"expected a unit vector, got norm {norm:.8f}")
    return vec


@dataclass(frozen=True)
class StyleCentroid:
    """Mean of unit embeddings with its provenance.

    support_count is the number of items averaged; window_index is None
    for whole-dataset (non-windowed) centroids.
    """

    components: np.ndarray
    support_count: int
    window_index: int | None = None


def _as_array(v) -> np.ndarray:
    if isinstance(v, StyleCentroid):
        return v.components
    return np.asarray(v, dtype=float)


def cosine(a, b) -> float:
    """Cosine similarity between vectors and/or centroids."""
    av, bv = _as_array(a), _as_array(b)
    na, nb = float(np.linalg.norm(av)), float(np.linalg.norm(bv))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine undefined for zero-norm input")
    return float(av @ bv / (na * nb))


def centroid(vectors: Iterable, window: int | None = None) -> StyleCentroid:
    mat = np.asarray([_as_array(v) for v in vectors], dtype=float)
    if mat.ndim != 2 or mat.shape[0] == 0:
        raise ValueError("centroid needs at least one vector")
    return StyleCentroid(mat.mean(axis=0), mat.shape[0], window)


def agent_style_centroids(
    d: Dataset,
    *,
    window_days: int = 3,
    min_posts: int = 3,
) -> dict[tuple[str, int], StyleCentroid]:
    """Per-agent, per-window style centroids over post image embeddings.

    Windows are half-open [epoch + i*w, epoch + (i+1)*w) aligned to the
    dataset epoch. An (agent, window) cell with fewer than min_posts posts
    is omitted. Replies never contribute (post embeddings only).
    """
    if min_posts < 1:
        raise ValueError("min_posts must be >= 1")
    if d.dataset_epoch is None:
        return {}
    groups: dict[tuple[str, int], list[np.ndarray]] = {}
    for pid in sorted(d.posts):
        p = d.posts[pid]
        w = window_index(p.created_at, d.dataset_epoch, window_days)
        groups.setdefault((p.author, w), []).append(p.image_embedding)
    return {
        key: StyleCentroid(np.mean(vecs, axis=0), len(vecs), key[1])
        for key, vecs in groups.items()
        if len(vecs) >= min_posts
    }


def agent_centroids(d: Dataset, *, min_posts: int = 1) -> dict[str, StyleCentroid]:
    """Whole-dataset style centroid per agent (post embeddings only)."""
    groups: dict[str, list[np.ndarray]] = {}
    for pid in sorted(d.posts):
        p = d.posts[pid]
        groups.setdefault(p.author, []).append(p.image_embedding)
    return {
        author: StyleCentroid(np.mean(vecs, axis=0), len(vecs))
        for author, vecs in groups.items()
        if len(vecs) >= min_posts
    }


def within_agent_spread(d: Dataset, *, min_posts: int = 2) -> dict[str, float]:
    """Mean pairwise cosine distance among each agent's own post embeddings.

    Agents with fewer than min_posts posts are omitted (no pairs to average).
    """
    if min_posts < 2:
        raise ValueError("min_posts must be >= 2 (pairwise measure)")
    groups: dict[str, list[np.ndarray]] = {}
    for pid in sorted(d.posts):
        p = d.posts[pid]
        groups.setdefault(p.author, []).append(p.image_embedding)
    out: dict[str, float] = {}
    for author, vecs in groups.items():
        if len(vecs) < min_posts:
            continue
        mat = np.stack(vecs)
        i, j = np.triu_indices(mat.shape[0], k=1)
        out[author] = float(np.mean(1.0 - np.einsum("ij,ij->i", mat[i], mat[j])))
    return out


# ---------------------------------------------------------------------------
# synthetic generator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SynthStyleConfig:
    """Knobs for the synthetic embedding generator.

    An image embedding is normalize(w_s * anchor + w_j * subject + sigma * g)
    with g an isotropic standard Gaussian draw. anchor_concentration c shapes
    the anchor distribution normalize(c * m + u) around a shared direction m,
    giving the space a positive baseline similarity like real encoder spaces.
    """

    embedding_dim: int = 64
    style_weight: float = 0.7    # w_s
    subject_weight: float = 0.3  # w_j
    noise_sigma: float = 0.15
    subject_pool_size: int = 40  # K
    drift_lambda: float = 0.0
    anchor_concentration: float = 0.3

    def __post_init__(self):
        if self.embedding_dim < 1:
            raise ValueError("embedding_dim must be positive")
        if self.subject_pool_size < 1:
            raise ValueError("subject_pool_size must be positive")
        if not 0.0 <= self.drift_lambda <= 1.0:
            raise ValueError("drift_lambda must lie in [0, 1]")
        if self.noise_sigma < 0.0:
            raise ValueError("noise_sigma must be non-negative")


def subject_pool(cfg: SynthStyleConfig, rng: np.random.Generator) -> np.ndarray:
    """K fixed unit subject vectors, drawn once per simulation."""
    mat = rng.standard_normal((cfg.subject_pool_size, cfg.embedding_dim))
    return mat / np.linalg.norm(mat, axis=1, keepdims=True)


def synth_embedding(
    anchor: np.ndarray,
    subject: np.ndarray,
    cfg: SynthStyleConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw one unit-norm embedding around an anchor/subject blend."""
    for _ in range(10):
        raw = cfg.style_weight * anchor + cfg.subject_weight * subject
        if cfg.noise_sigma > 0.0:
            raw = raw + cfg.noise_sigma * rng.standard_normal(cfg.embedding_dim)
        norm = float(np.linalg.norm(raw))
        if norm > 0.0:
            return raw / norm
    raise RuntimeError("zero-vector embedding after 10 redraws")


def apply_drift(anchor: np.ndarray, neighborhood, lam: float) -> np.ndarray:
    """Pull an anchor toward a neighborhood centroid:
    normalize((1 - lam) * anchor + lam * neighborhood).

    lam = 0 returns the anchor unchanged (exactly); lam = 1 returns the
    normalized neighborhood centroid.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lam must lie in [0, 1]")
    if lam == 0.0:
        return np.asarray(anchor, dtype=float)
    blend = (1.0 - lam) * np.asarray(anchor, dtype=float) + lam * _as_array(neighborhood)
    norm = float(np.linalg.norm(blend))
    if norm == 0.0:
        warnings.warn("drift produced a zero vector; keeping the previous anchor")
        return np.asarray(anchor, dtype=float)
    return blend / norm
