"""Visual theme detection and cascade reproduction numbers.

Themes are k-means clusters of post embeddings with k = floor(n_posts /
posts_per_cluster). Each theme's index post is its earliest member; the
theme centroid is frozen at the index post's timestamp. A theme's
reproduction number is r0 = s * |secondary adopters within the adoption
window after the index post|.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np

from .dataset import Dataset
from .graph import InteractionGraph, undirected_binary
from .stats import CorrelationResult, pearson_r

__all__ = [
    "Theme",
    "CascadeResult",
    "SensitivityGrid",
    "kmeans",
    "silhouette_score",
    "detect_themes",
    "theme_r0",
    "supercritical_fraction",
    "sensitivity_grid",
    "centrality_r0_correlation",
]


def kmeans(
    X: np.ndarray,
    k: int,
    rng=None,
    *,
    max_iter: int = 100,
    tol: float = 1e-6,
) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd's algorithm with k-means++ seeding from the provided generator.

    Empty clusters are dropped (not re-seeded) with a warning, so the
    returned centroid count can be < k. Labels are re-indexed onto the
    surviving centroids. Returns (labels, centroids).
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n == 0:
        raise ValueError("kmeans needs at least one point")
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    rng = np.random.default_rng(rng)

    # k-means++ seeding: subsequent centers drawn with probability
    # proportional to squared distance from the nearest chosen center.
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(0, n)]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total == 0.0:
            centers[c:] = X[rng.integers(0, n, k - c)]
            break
        probs = d2 / total
        centers[c] = X[rng.choice(n, p=probs)]
        d2 = np.minimum(d2, np.sum((X - centers[c]) ** 2, axis=1))

    for _ in range(max_iter):
        labels = _assign(X, centers)
        new_centers = []
        for c in range(centers.shape[0]):
            members = labels == c
            if members.any():
                new_centers.append(X[members].mean(axis=0))
        if len(new_centers) < centers.shape[0]:
            warnings.warn(
                f"dropped {centers.shape[0] - len(new_centers)} empty cluster(s)"
            )
        new_centers = np.asarray(new_centers)
        if new_centers.shape == centers.shape:
            shift = float(np.max(np.linalg.norm(new_centers - centers, axis=1)))
            centers = new_centers
            if shift < tol:
                break
        else:
            centers = new_centers
    labels = _assign(X, centers)
    return labels, centers


def _assign(X: np.ndarray, centers: np.ndarray, chunk: int = 8192) -> np.ndarray:
    """Nearest-center assignment, chunked to bound the distance matrix."""
    n = X.shape[0]
    labels = np.empty(n, dtype=np.int64)
    c2 = np.sum(centers**2, axis=1)
    for start in range(0, n, chunk):
        block = X[start:start + chunk]
        # squared distance up to a per-row constant
        d = c2[None, :] - 2.0 * (block @ centers.T)
        labels[start:start + chunk] = np.argmin(d, axis=1)
    return labels


def silhouette_score(X: np.ndarray, labels: np.ndarray) -> float:
    """Mean silhouette over samples (Euclidean); singletons score 0."""
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels)
    uniq = np.unique(labels)
    if uniq.size < 2:
        raise ValueError("silhouette needs at least 2 clusters")
    sq = np.sum(X**2, axis=1)
    dist = np.sqrt(np.maximum(sq[:, None] + sq[None, :] - 2.0 * (X @ X.T), 0.0))
    n = X.shape[0]
    scores = np.zeros(n)
    masks = {c: labels == c for c in uniq}
    sizes = {c: int(masks[c].sum()) for c in uniq}
    for i in range(n):
        own = labels[i]
        if sizes[own] <= 1:
            continue  # silhouette of a singleton is 0 by convention
        a = dist[i][masks[own]].sum() / (sizes[own] - 1)
        b = min(
            dist[i][masks[c]].mean()
            for c in uniq if c != own
        )
        denom = max(a, b)
        if denom > 0:
            scores[i] = (b - a) / denom
    return float(scores.mean())


# ---------------------------------------------------------------------------
# themes
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class Theme:
    theme_id: str
    post_ids: list[str]          # ordered by (created_at, post_id)
    index_post_id: str
    t0: datetime
    centroid: np.ndarray         # frozen at the index post
    size: int


def detect_themes(
    d: Dataset,
    *,
    seed=None,
    posts_per_cluster: int = 30,
) -> list[Theme]:
    """Cluster post embeddings into themes, k = floor(n / posts_per_cluster).

    The frozen centroid averages members with created_at <= t0 (the index
    post plus exact timestamp ties). Themes come back sorted by (t0,
    index_post_id).
    """
    if posts_per_cluster < 1:
        raise ValueError("posts_per_cluster must be positive")
    post_ids = sorted(d.posts)
    n = len(post_ids)
    if n == 0:
        return []
    k = max(1, n // posts_per_cluster)
    X = np.stack([d.posts[pid].image_embedding for pid in post_ids])
    labels, _ = kmeans(X, k, np.random.default_rng(seed))

    themes: list[Theme] = []
    for c in np.unique(labels):
        members = [post_ids[i] for i in np.nonzero(labels == c)[0]]
        members.sort(key=lambda pid: (d.posts[pid].created_at, pid))
        t0 = d.posts[members[0]].created_at
        frozen = [d.posts[pid].image_embedding
                  for pid in members if d.posts[pid].created_at <= t0]
        themes.append(Theme(
            theme_id="",  # assigned after the deterministic sort below
            post_ids=members,
            index_post_id=members[0],
            t0=t0,
            centroid=np.mean(frozen, axis=0),
            size=len(members),
        ))
    themes.sort(key=lambda t: (t.t0, t.index_post_id))
    for i, theme in enumerate(themes):
        theme.theme_id = f"theme{i:04d}"
    return themes


# ---------------------------------------------------------------------------
# cascades
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CascadeResult:
    theme_id: str
    r0: float
    n_secondary: int
    index_author: str
    t0: datetime
    scaling: float
    window_hours: float


def secondary_adopters(theme: Theme, d: Dataset, window_hours: float) -> set[str]:
    """Authors (other than the index author) posting into the theme within
    (t0, t0 + window]."""
    index_author = d.posts[theme.index_post_id].author
    deadline = theme.t0 + timedelta(hours=window_hours)
    adopters = set()
    for pid in theme.post_ids:
        post = d.posts[pid]
        if post.author == index_author:
            continue
        if theme.t0 < post.created_at <= deadline:
            adopters.add(post.author)
    return adopters


def theme_r0(
    theme: Theme,
    d: Dataset,
    *,
    scaling: float = 3.0,
    window_hours: float = 48.0,
) -> CascadeResult:
    """Reproduction number r0 = scaling * |secondary adopters|."""
    adopters = secondary_adopters(theme, d, window_hours)
    return CascadeResult(
        theme_id=theme.theme_id,
        r0=scaling * len(adopters),
        n_secondary=len(adopters),
        index_author=d.posts[theme.index_post_id].author,
        t0=theme.t0,
        scaling=scaling,
        window_hours=window_hours,
    )


def supercritical_fraction(results) -> float | None:
    """Fraction of themes with r0 > 1; None with no themes."""
    results = list(results)
    if not results:
        return None
    return float(np.mean([r.r0 > 1.0 for r in results]))


@dataclass(frozen=True)
class SensitivityGrid:
    s_values: tuple[float, ...]
    windows_hours: tuple[float, ...]
    fractions: tuple[tuple[float, ...], ...]  # [s][window]

    def to_dict(self) -> dict:
        return {
            "s_values": list(self.s_values),
            "windows_hours": list(self.windows_hours),
            "supercritical_fractions": [list(row) for row in self.fractions],
        }


def sensitivity_grid(
    themes,
    d: Dataset,
    *,
    s_values=(1.0, 2.0, 3.0, 4.0, 5.0),
    windows_hours=(24.0, 48.0, 72.0, 96.0),
) -> SensitivityGrid:
    """Super-critical fraction across the (scaling, window) grid.

    Adopter counts per theme depend on the window only, so they are
    computed once per window; the fraction is then monotone in the window
    by construction.
    """
    themes = list(themes)
    counts = {
        w: [len(secondary_adopters(t, d, w)) for t in themes]
        for w in windows_hours
    }
    rows = []
    for s in s_values:
        row = []
        for w in windows_hours:
            if not themes:
                row.append(float("nan"))
            else:
                row.append(float(np.mean([s * c > 1.0 for c in counts[w]])))
        rows.append(tuple(row))
    return SensitivityGrid(tuple(s_values), tuple(windows_hours), tuple(rows))


def centrality_r0_correlation(
    results,
    g: InteractionGraph,
) -> CorrelationResult | None:
    """Pearson r between index-author degree centrality and theme r0."""
    gu = undirected_binary(g)
    n = gu.number_of_nodes()
    if n < 2:
        return None
    results = list(results)
    if len(results) < 3:
        return None
    cent = [gu.degree(r.index_author) / (n - 1) if r.index_author in gu else 0.0
            for r in results]
    r0s = [r.r0 for r in results]
    return pearson_r(cent, r0s)
