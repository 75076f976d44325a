"""Analysis pipelines over a dataset.

Eight numbered experiment pipelines (e1-e8) probe complementary phenomena
in an image-first agent network: reply-chain coherence, visual homophily,
style convergence, criticism response, community/style alignment, theme
cascades, distinctiveness-engagement curvature, and intra-chain diversity.
Three robustness pipelines (r1-r3) re-derive the key results under
stronger nulls or parameter sweeps, and f1 analyses the randomized
targeted-criticism scenario. ``run_all`` executes a selection with
deterministic per-pipeline sub-seeds and applies a Benjamini-Hochberg
false-discovery pass across the pre-registered primary p-values (one per
e-pipeline).

Every pipeline is a pure function of (dataset, config, seed): reruns are
byte-identical, and a pipeline facing insufficient data returns a report
with absent metrics and an explanatory flag instead of raising.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, fields as dc_fields
from datetime import datetime

import numpy as np
import scipy.stats as ss

from .chains import (
    chain_coherence,
    chain_null_distribution,
    chain_style_diversity,
    extract_chains,
    lag_k_coherence,
)
from .dataset import (
    Dataset,
    parse_timestamp,
    window_bounds,
    window_count,
    window_index,
)
from .graph import (
    build_interaction_graph,
    degree_preserving_ensemble,
    louvain_partition,
    neighborhood_centroid,
    undirected_binary,
)
from .lexicon import ADVERSARIAL_LEXICON, tokenize
from .stats import (
    TestResult,
    adjusted_rand_index,
    bh_fdr,
    bootstrap_bca_ci,
    logistic_fit,
    mann_whitney_auc,
    normalized_mutual_information,
    p_value_from_null,
    pearson_r,
    permutation_test,
    quadratic_fit,
    welch_t,
)
from .style import agent_centroids, agent_style_centroids, cosine, within_agent_spread
from .themes import (
    centrality_r0_correlation,
    detect_themes,
    kmeans,
    sensitivity_grid,
    silhouette_score,
    supercritical_fraction,
    theme_r0,
)

__all__ = [
    "AnalysisConfig",
    "ExperimentReport",
    "RunReport",
    "ADVERSARIAL_LEXICON",
    "EXPERIMENT_IDS",
    "e1_chains",
    "e2_homophily",
    "e3_style_drift",
    "e4_cross_modal",
    "e5_communities",
    "e6_cascades",
    "e7_distinctiveness",
    "distinctiveness_scores",
    "e8_style_diversity",
    "r1_graph_nulls",
    "r2_lag_coherence",
    "r3_cascade_sensitivity",
    "f1_targeted_criticism",
    "run_all",
    "write_report_json",
    "write_report_csv",
    "render_report_table",
]


@dataclass(frozen=True)
class AnalysisConfig:
    """Shared knobs for the analysis pipelines."""

    window_days: int = 3
    min_posts_centroid: int = 3
    min_chain_depth: int = 2
    chain_null_resamples: int = 5000
    diversity_null_resamples: int = 3000
    permutation_resamples: int = 2000
    bootstrap_resamples: int = 5000
    graph_null_count: int = 200
    robust_graph_null_count: int = 1000
    posts_per_cluster: int = 30
    r0_scaling: float = 3.0
    r0_window_hours: float = 48.0
    kmeans_k_min: int = 2
    kmeans_k_max: int = 8
    fdr_q: float = 0.05

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dc_fields(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "AnalysisConfig":
        known = {f.name for f in dc_fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config key: {sorted(unknown)[0]}")
        return cls(**data)


@dataclass
class ExperimentReport:
    """Structured result of one pipeline.

    ``table`` holds the headline rows for the flat CSV rendering:
    (metric, observed, baseline, p_value). ``primary_p`` is the single
    pre-registered p-value that enters the global FDR pass (None for
    robustness pipelines and for degenerate data).
    """

    experiment_id: str
    title: str
    phenomenon: str
    n_observations: int = 0
    metrics: dict = field(default_factory=dict)
    tests: dict = field(default_factory=dict)
    intervals: dict = field(default_factory=dict)
    correlations: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    table: list = field(default_factory=list)
    primary_test: str | None = None
    primary_p: float | None = None
    fdr_significant: bool | None = None

    def to_dict(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "title": self.title,
            "phenomenon": self.phenomenon,
            "n_observations": self.n_observations,
            "metrics": _jsonsafe(self.metrics),
            "tests": {k: _jsonsafe(v.to_dict()) for k, v in self.tests.items()},
            "intervals": {k: _jsonsafe(v.to_dict()) for k, v in self.intervals.items()},
            "correlations": {
                k: _jsonsafe(v.to_dict()) for k, v in self.correlations.items()
            },
            "flags": list(self.flags),
            "table": [
                {
                    "metric": m,
                    "observed": _jsonsafe(obs),
                    "baseline": _jsonsafe(base),
                    "p_value": _jsonsafe(p),
                }
                for m, obs, base, p in self.table
            ],
            "primary_test": self.primary_test,
            "primary_p": _jsonsafe(self.primary_p),
            "fdr_significant": self.fdr_significant,
        }


def _jsonsafe(value):
    """Recursively replace non-finite floats with None (JSON has no NaN)."""
    if isinstance(value, dict):
        return {k: _jsonsafe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonsafe(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _seed_tree(seed, n: int) -> list:
    """n deterministic child seeds (ints) derived from one entropy source."""
    seq = np.random.SeedSequence(seed)
    return [int(child.generate_state(1, dtype=np.uint64)[0] >> 1)
            for child in seq.spawn(n)]


def _image_pool(d: Dataset) -> np.ndarray:
    """All image embeddings (posts plus image-bearing replies), stacked."""
    post_vecs = [d.posts[pid].image_embedding for pid in sorted(d.posts)]
    reply_mat = d.visual_reply_embeddings()
    if post_vecs and reply_mat.size:
        return np.vstack([np.stack(post_vecs), reply_mat])
    if post_vecs:
        return np.stack(post_vecs)
    return reply_mat


# ---------------------------------------------------------------------------
# e1: reply-chain coherence
# ---------------------------------------------------------------------------

def e1_chains(d: Dataset, *, seed=None, config: AnalysisConfig | None = None) -> ExperimentReport:
    """Adjacent-step style coherence in image reply chains vs a depth-matched
    random-pair baseline."""
    cfg = config or AnalysisConfig()
    rep = ExperimentReport(
        "e1",
        "Reply chains hold adjacent-step style coherence above a depth-matched random baseline",
        "chain coherence",
    )
    chains = extract_chains(d, cfg.min_chain_depth)
    rep.metrics["n_chains"] = len(chains)
    if not chains:
        rep.flags.append("no chains at the configured minimum depth")
        return rep
    seeds = _seed_tree(seed, 5)
    depths = np.array([c.depth for c in chains], dtype=float)
    ccs_values = np.array([chain_coherence(c) for c in chains], dtype=float)
    ccs = float(ccs_values.mean())
    rep.n_observations = len(chains)
    rep.metrics.update(
        mean_depth=float(depths.mean()),
        max_depth=int(depths.max()),
        mean_distinct_authors=float(np.mean([c.distinct_agents() for c in chains])),
        ccs_mean=ccs,
    )

    pool = _image_pool(d)
    null = chain_null_distribution(
        pool, depths.astype(int), "coherence",
        n_resamples=cfg.chain_null_resamples, seed=seeds[0],
    )
    rep.metrics["ccs_null_mean"] = null.mean
    rep.metrics["delta_ccs"] = ccs - null.mean
    perm = p_value_from_null(ccs, null.resample_means, alternative="two-sided",
                             center=null.mean)
    rep.tests["ccs_vs_null_perm"] = perm
    if len(ccs_values) >= 2 and len(null.values) >= 2:
        rep.tests["ccs_vs_null_welch"] = welch_t(ccs_values, null.values)

    # Same-author-filtered variant (adjacent pairs by one author removed).
    filtered = [chain_coherence(c, include_same_author=False) for c in chains]
    filtered = [v for v in filtered if v is not None]
    rep.metrics["ccs_cross_author"] = float(np.mean(filtered)) if filtered else None
    rep.metrics["n_chains_cross_author"] = len(filtered)

    # Engagement on chain roots vs other posts.
    roots = {c.root.post_id for c in chains}
    eng_in, eng_out = [], []
    for pid, post in d.posts.items():
        (eng_in if pid in roots else eng_out).append(
            post.like_count + post.comment_count
        )
    rep.metrics["engagement_chain_roots"] = float(np.mean(eng_in)) if eng_in else None
    rep.metrics["engagement_other_posts"] = float(np.mean(eng_out)) if eng_out else None
    ratio = None
    if eng_in and eng_out and np.mean(eng_out) > 0:
        ratio = float(np.mean(eng_in) / np.mean(eng_out))
    rep.metrics["engagement_ratio"] = ratio
    if len(eng_in) >= 2 and len(eng_out) >= 2:
        rep.tests["engagement_welch"] = welch_t(eng_in, eng_out)

    if np.unique(depths).size > 1 and np.unique(ccs_values).size > 1:
        corr = pearson_r(depths, ccs_values)
        if corr is not None:
            rep.correlations["depth_ccs"] = corr

    for lag, lag_seed in zip((1, 2, 3), seeds[1:4]):
        res = lag_k_coherence(chains, lag, pool,
                              n_resamples=cfg.permutation_resamples, seed=lag_seed)
        if res is not None:
            rep.metrics[f"lag{lag}_delta"] = res.delta
            rep.metrics[f"lag{lag}_p"] = res.p_value

    rep.primary_test = "ccs_vs_null_perm"
    rep.primary_p = perm.p_value
    rep.table = [
        ("chain_coherence", ccs, null.mean, perm.p_value),
        ("engagement_ratio", ratio, 1.0,
         rep.tests["engagement_welch"].p_value if "engagement_welch" in rep.tests else None),
    ]
    return rep


# ---------------------------------------------------------------------------
# e2: visual homophily
# ---------------------------------------------------------------------------

def _pair_setup(d: Dataset, cfg: AnalysisConfig):
    """Shared scaffolding for the tie/style analyses.

    Returns None when no agent clears the centroid threshold; otherwise a
    dict with the eligible agents (sorted), their unit style directions and
    cosine matrix, the binarized graph restricted to them, and the edge
    index arrays.
    """
    cents = agent_centroids(d, min_posts=cfg.min_posts_centroid)
    gu_full = undirected_binary(build_interaction_graph(d))
    eligible = []
    dirs = []
    for agent in sorted(cents):
        vec = cents[agent].components
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            continue
        eligible.append(agent)
        dirs.append(vec / norm)
    if not eligible:
        return None
    index = {a: i for i, a in enumerate(eligible)}
    mat = np.stack(dirs)
    cos = mat @ mat.T
    sub = gu_full.subgraph(eligible)
    ei, ej = [], []
    for a, b in sub.edges():
        i, j = index[a], index[b]
        if i > j:
            i, j = j, i
        ei.append(i)
        ej.append(j)
    return {
        "agents": eligible,
        "index": index,
        "cos": cos,
        "centroids": cents,
        "gu_full": gu_full,
        "sub": sub,
        "edge_i": np.array(ei, dtype=np.int64),
        "edge_j": np.array(ej, dtype=np.int64),
    }


def _h_ratio(cos: np.ndarray, ei: np.ndarray, ej: np.ndarray) -> float | None:
    """Connected-pair mean cosine over disconnected-pair mean cosine."""
    n = cos.shape[0]
    n_pairs = n * (n - 1) // 2
    m = ei.size
    if m == 0 or n_pairs - m == 0:
        return None
    total = (cos.sum() - np.trace(cos)) / 2.0
    conn = float(cos[ei, ej].sum())
    mean_conn = conn / m
    mean_disc = (total - conn) / (n_pairs - m)
    if mean_disc == 0.0:
        return None
    return float(mean_conn / mean_disc)


def _text_centroids(d: Dataset, cfg: AnalysisConfig) -> dict[str, np.ndarray]:
    """Per-agent caption-embedding centroids (agents clearing the same
    post threshold); empty when the dataset carries no caption channel."""
    groups: dict[str, list[np.ndarray]] = {}
    for pid in sorted(d.posts):
        p = d.posts[pid]
        if p.caption_embedding is not None:
            groups.setdefault(p.author, []).append(p.caption_embedding)
    return {
        a: np.mean(vecs, axis=0)
        for a, vecs in groups.items()
        if len(vecs) >= cfg.min_posts_centroid
    }


def _homophily_analysis(
    rep: ExperimentReport,
    d: Dataset,
    cfg: AnalysisConfig,
    seed,
    n_null_graphs: int,
) -> None:
    setup = _pair_setup(d, cfg)
    if setup is None:
        rep.flags.append("no agents clear the centroid threshold")
        return
    agents = setup["agents"]
    cos = setup["cos"]
    ei, ej = setup["edge_i"], setup["edge_j"]
    n = len(agents)
    n_pairs = n * (n - 1) // 2
    m = int(ei.size)
    rep.metrics["n_eligible_agents"] = n
    rep.metrics["n_connected_pairs"] = m
    rep.metrics["n_disconnected_pairs"] = n_pairs - m
    rep.n_observations = n_pairs
    if m < 2 or n_pairs - m < 2:
        rep.flags.append("need at least 2 connected and 2 disconnected pairs")
        return

    seeds = _seed_tree(seed, 2)
    iu, ju = np.triu_indices(n, k=1)
    all_vals = cos[iu, ju]
    conn_mask = np.zeros(all_vals.size, dtype=bool)
    # Position of edge (i, j), i<j, in the row-major triu enumeration.
    pair_pos = ei * (2 * n - ei - 1) // 2 + (ej - ei - 1)
    conn_mask[pair_pos] = True
    conn_vals = all_vals[conn_mask]
    disc_vals = all_vals[~conn_mask]
    rep.metrics["mean_cosine_connected"] = float(conn_vals.mean())
    rep.metrics["mean_cosine_disconnected"] = float(disc_vals.mean())

    h = _h_ratio(cos, ei, ej)
    rep.metrics["h_ratio"] = h
    if h is None:
        rep.flags.append("homophily ratio undefined (zero denominator)")
        return

    null_h = []
    for u_idx, v_idx in degree_preserving_ensemble(
        setup["sub"], n_null_graphs, np.random.default_rng(seeds[0])
    ):
        hv = _h_ratio(cos, u_idx, v_idx)
        if hv is not None:
            null_h.append(hv)
    if null_h:
        perm = p_value_from_null(h, np.asarray(null_h), alternative="two-sided",
                                 center=1.0)
        rep.tests["h_degree_null_perm"] = perm
        rep.metrics["h_null_mean"] = float(np.mean(null_h))
        rep.primary_test = "h_degree_null_perm"
        rep.primary_p = perm.p_value

    rep.metrics["auc_visual"] = mann_whitney_auc(conn_vals, disc_vals)

    text_cents = _text_centroids(d, cfg)
    if text_cents:
        t_idx = [i for i, a in enumerate(agents) if a in text_cents]
        if len(t_idx) >= 3:
            t_mat = np.stack([text_cents[agents[i]] for i in t_idx])
            norms = np.linalg.norm(t_mat, axis=1)
            keep = norms > 0
            if keep.sum() >= 3:
                t_mat = t_mat[keep] / norms[keep, None]
                t_rows = [t_idx[k] for k in np.flatnonzero(keep)]
                t_cos = t_mat @ t_mat.T
                t_conn, t_disc = [], []
                edge_pairs = set(zip(ei.tolist(), ej.tolist()))
                for i_pos in range(len(t_rows)):
                    for j_pos in range(i_pos + 1, len(t_rows)):
                        oi, oj = t_rows[i_pos], t_rows[j_pos]
                        val = t_cos[i_pos, j_pos]
                        if (oi, oj) in edge_pairs:
                            t_conn.append(val)
                        else:
                            t_disc.append(val)
                if len(t_conn) >= 2 and len(t_disc) >= 2:
                    rep.metrics["auc_text"] = mann_whitney_auc(t_conn, t_disc)

    # Tie regression with structural controls: visual cosine, degree sum,
    # shared-neighbor count, on connected pairs vs an equal-size random
    # sample of disconnected pairs.
    sub = setup["sub"]
    rng = np.random.default_rng(seeds[1])
    disc_positions = np.flatnonzero(~conn_mask)
    sample_n = min(m, disc_positions.size)
    picked = rng.choice(disc_positions, size=sample_n, replace=False)
    deg = np.array([sub.degree(a) for a in agents], dtype=float)
    neigh = [set(sub.neighbors(a)) for a in agents]

    def features(i: int, j: int) -> list[float]:
        return [
            float(cos[i, j]),
            float(deg[i] + deg[j]),
            float(len(neigh[i] & neigh[j])),
        ]

    rows, labels = [], []
    for i, j in zip(ei, ej):
        rows.append(features(int(i), int(j)))
        labels.append(1)
    for p in picked:
        rows.append(features(int(iu[p]), int(ju[p])))
        labels.append(0)
    try:
        fit = logistic_fit(np.array(rows), np.array(labels))
        rep.metrics["tie_model"] = {
            "features": ["visual_cosine", "degree_sum", "shared_neighbors"],
            **fit.to_dict(),
        }
    except (ValueError, np.linalg.LinAlgError) as exc:
        rep.flags.append(f"tie regression failed: {exc}")

    rep.table = [
        ("homophily_ratio", h, rep.metrics.get("h_null_mean", 1.0),
         rep.primary_p),
        ("auc_visual", rep.metrics["auc_visual"], 0.5, None),
    ]


def e2_homophily(d: Dataset, *, seed=None, config: AnalysisConfig | None = None) -> ExperimentReport:
    """Do connected agent pairs look more alike than disconnected pairs?"""
    cfg = config or AnalysisConfig()
    rep = ExperimentReport(
        "e2",
        "Connected agent pairs are more visually similar than disconnected pairs",
        "visual homophily",
    )
    _homophily_analysis(rep, d, cfg, seed, cfg.graph_null_count)
    return rep


# ---------------------------------------------------------------------------
# e3: style convergence toward interaction partners
# ---------------------------------------------------------------------------

def style_convergence_samples(
    d: Dataset,
    *,
    window_days: int | None = None,
    seed=None,
    config: AnalysisConfig | None = None,
) -> tuple[np.ndarray, int]:
    """Per-(agent, window) style-convergence observations.

    Each value is cos(next-window centroid, interaction-weighted neighbor
    centroid) minus cos(next-window centroid, matched random baseline).
    The baseline is exchangeable with the neighborhood under no-drift:
    matched in size, in weight profile (the neighborhood's weight multiset
    applied to the sampled agents), and in selection intensity (partners
    are encountered in proportion to how much they post, so the sample is
    drawn with probability proportional to each agent's window post
    count). Returns (values, number of window transitions used).
    """
    cfg = config or AnalysisConfig()
    wd = window_days if window_days is not None else cfg.window_days
    cents = agent_style_centroids(d, window_days=wd, min_posts=cfg.min_posts_centroid)
    if not cents or d.dataset_epoch is None:
        return np.empty(0), 0
    by_window: dict[int, dict[str, object]] = {}
    for (agent, w), c in cents.items():
        by_window.setdefault(w, {})[agent] = c

    rng = np.random.default_rng(seed)
    values = []
    windows_used = set()
    for w in range(window_count(d, wd) - 1):
        cur = by_window.get(w)
        nxt = by_window.get(w + 1)
        if not cur or not nxt:
            continue
        g_w = build_interaction_graph(d, window=window_bounds(w, d.dataset_epoch, wd))
        pool_agents = sorted(cur)
        support = np.array([cur[b].support_count for b in pool_agents],
                           dtype=float)
        for agent in sorted(nxt):
            nb = neighborhood_centroid(g_w, agent, cur)
            if nb is None:
                continue
            weights = np.array(sorted(
                (g_w.edge_weight(agent, b) for b in g_w.out_neighbors(agent)
                 if b in cur),
                reverse=True,
            ))
            eligible = np.array([b != agent for b in pool_agents])
            if int(eligible.sum()) < weights.size:
                continue
            probs = support[eligible] / support[eligible].sum()
            picked = rng.choice(np.flatnonzero(eligible), size=weights.size,
                                replace=False, p=probs)
            rand_mat = np.stack([cur[pool_agents[i]].components for i in picked])
            rand_mean = weights @ rand_mat / weights.sum()
            try:
                vci = cosine(nxt[agent], nb) - cosine(nxt[agent], rand_mean)
            except ValueError:
                continue
            values.append(vci)
            windows_used.add(w)
    return np.asarray(values, dtype=float), len(windows_used)


def e3_style_drift(
    d: Dataset,
    window_days: int | None = None,
    *,
    seed=None,
    config: AnalysisConfig | None = None,
) -> ExperimentReport:
    """Per (agent, window): does the next-window centroid lean toward the
    agent's interaction neighborhood more than toward random agents?"""
    cfg = config or AnalysisConfig()
    wd = window_days if window_days is not None else cfg.window_days
    rep = ExperimentReport(
        "e3",
        "Agent style centroids do not drift toward interaction partners beyond a random-agent baseline",
        "style convergence",
    )
    seeds = _seed_tree(seed, 3)
    arr0, n_windows = style_convergence_samples(
        d, window_days=wd, seed=seeds[0], config=cfg)
    if arr0.size == 0 and not d.posts:
        rep.flags.append("no per-window centroids available")
        return rep
    values = arr0.tolist()

    rep.n_observations = len(values)
    rep.metrics["n_agent_windows"] = len(values)
    rep.metrics["n_window_transitions"] = n_windows
    if len(values) < 2:
        rep.flags.append("fewer than 2 usable agent-window observations")
        return rep
    arr = np.asarray(values)
    vci_mean = float(arr.mean())
    rep.metrics["vci_mean"] = vci_mean
    rep.metrics["vci_sd"] = float(arr.std(ddof=1))

    # Swapping the neighborhood and random baselines flips each term's
    # sign, so the assignment-shuffle null is a sign-flip null on the mean.
    perm = TestResult(vci_mean, 1.0, "permutation", 0, degenerate=True)
    if np.any(arr != 0.0):
        perm = permutation_test(
            vci_mean,
            lambda v: float(np.mean(v)),
            arr,
            lambda v, r: v * r.choice((-1.0, 1.0), size=v.size),
            n_resamples=cfg.permutation_resamples,
            seed=seeds[1],
            alternative="two-sided",
        )
    rep.tests["vci_signflip_perm"] = perm
    rep.intervals["vci_mean"] = bootstrap_bca_ci(
        arr, lambda v: float(np.mean(v)),
        n_resamples=cfg.bootstrap_resamples, seed=seeds[2],
    )
    rep.primary_test = "vci_signflip_perm"
    rep.primary_p = perm.p_value
    rep.table = [("vci_mean", vci_mean, 0.0, perm.p_value)]
    return rep


# ---------------------------------------------------------------------------
# e4: criticism exposure vs style shift
# ---------------------------------------------------------------------------

def _direction_shift(before: np.ndarray, after: np.ndarray) -> float | None:
    """Euclidean distance between the unit directions of two centroids."""
    nb = np.linalg.norm(before)
    na = np.linalg.norm(after)
    if nb == 0.0 or na == 0.0:
        return None
    return float(np.linalg.norm(after / na - before / nb))

def e4_cross_modal(
    d: Dataset,
    lexicon=ADVERSARIAL_LEXICON,
    *,
    seed=None,
    config: AnalysisConfig | None = None,
) -> ExperimentReport:
    """Does receiving critical comments in one window predict the size of
    the style shift into the next window?"""
    cfg = config or AnalysisConfig()
    rep = ExperimentReport(
        "e4",
        "Critical-comment exposure in a window predicts the centroid shift into the next window",
        "criticism response",
    )
    if d.dataset_epoch is None or not d.posts:
        rep.flags.append("empty dataset")
        return rep
    wd = cfg.window_days
    vocab = set(lexicon)

    parent_author: dict[str, str] = {}
    for pid, post in d.posts.items():
        parent_author[pid] = post.author
    for rid, reply in d.replies.items():
        parent_author[rid] = reply.author

    exposure: dict[tuple[str, int], int] = {}
    total_critical = 0
    for rid in sorted(d.replies):
        reply = d.replies[rid]
        if not reply.text:
            continue
        if not any(tok in vocab for tok in tokenize(reply.text)):
            continue
        total_critical += 1
        target = parent_author.get(reply.parent)
        if target is None:
            continue
        w = window_index(reply.created_at, d.dataset_epoch, wd)
        exposure[(target, w)] = exposure.get((target, w), 0) + 1

    activity: dict[tuple[str, int], int] = {}
    for pid in sorted(d.posts):
        p = d.posts[pid]
        w = window_index(p.created_at, d.dataset_epoch, wd)
        activity[(p.author, w)] = activity.get((p.author, w), 0) + 1

    # Shift = distance between consecutive-window centroid DIRECTIONS.
    # Normalizing first removes centroid-magnitude differences (driven by
    # per-window post counts and coherence), isolating the style rotation.
    cents = agent_style_centroids(d, window_days=wd, min_posts=cfg.min_posts_centroid)
    xs, ys, zs = [], [], []
    for (agent, w), cur in sorted(cents.items()):
        nxt = cents.get((agent, w + 1))
        if nxt is None:
            continue
        shift = _direction_shift(cur.components, nxt.components)
        if shift is None:
            continue
        xs.append(float(exposure.get((agent, w), 0)))
        ys.append(shift)
        zs.append(float(activity.get((agent, w), 0)))

    rep.metrics["n_critical_comments"] = total_critical
    rep.metrics["n_pairs"] = len(xs)
    rep.n_observations = len(xs)
    if len(xs) < 3:
        rep.flags.append("fewer than 3 paired agent-window observations")
        return rep
    x = np.asarray(xs)
    y = np.asarray(ys)
    z = np.asarray(zs)
    rep.metrics["exposed_share"] = float(np.mean(x > 0))
    rep.metrics["mean_shift"] = float(y.mean())

    corr = pearson_r(x, y, n_resamples=cfg.permutation_resamples,
                     seed=_seed_tree(seed, 1)[0])
    if corr is None:
        rep.flags.append("no variation in exposure or shift")
        return rep
    rep.correlations["exposure_shift"] = corr
    rep.primary_test = "exposure_shift"
    rep.primary_p = corr.p_value

    med = float(np.median(x))
    hi, lo = y[x > med], y[x <= med]
    rep.metrics["median_exposure"] = med
    if hi.size >= 2 and lo.size >= 2:
        rep.tests["split_at_median_welch"] = welch_t(hi, lo)
        rep.metrics["mean_shift_high_exposure"] = float(hi.mean())
        rep.metrics["mean_shift_low_exposure"] = float(lo.mean())

    # Activity-matched variant: residualize both sides on per-window post
    # count before correlating.
    design = np.column_stack([np.ones(z.size), z])
    rx = x - design @ np.linalg.lstsq(design, x, rcond=None)[0]
    ry = y - design @ np.linalg.lstsq(design, y, rcond=None)[0]
    if rx.std() > 0 and ry.std() > 0:
        partial = pearson_r(rx, ry)
        if partial is not None:
            rep.correlations["exposure_shift_partial"] = partial

    rep.table = [("exposure_shift_r", corr.r, 0.0, corr.p_value)]
    return rep


# ---------------------------------------------------------------------------
# e5: community structure vs style clusters
# ---------------------------------------------------------------------------

def _silhouette_kmeans(
    X: np.ndarray, cfg: AnalysisConfig, seed
) -> tuple[np.ndarray, int, float] | None:
    """k-means labels at the silhouette-selected k (ties -> smallest k)."""
    n = X.shape[0]
    best = None
    seeds = _seed_tree(seed, max(cfg.kmeans_k_max - cfg.kmeans_k_min + 1, 1))
    for pos, k in enumerate(range(cfg.kmeans_k_min, cfg.kmeans_k_max + 1)):
        if k >= n:
            break
        labels, _ = kmeans(X, k, np.random.default_rng(seeds[pos]))
        if np.unique(labels).size < 2:
            continue
        score = silhouette_score(X, labels)
        if best is None or score > best[2]:
            best = (labels, k, score)
    return best


def e5_communities(
    d: Dataset,
    seed=None,
    *,
    config: AnalysisConfig | None = None,
) -> ExperimentReport:
    """Agreement between graph communities and style-space clusters."""
    cfg = config or AnalysisConfig()
    rep = ExperimentReport(
        "e5",
        "Graph communities are not organized around visual style clusters",
        "community/style alignment",
    )
    cents = agent_centroids(d, min_posts=cfg.min_posts_centroid)
    gu = undirected_binary(build_interaction_graph(d))
    agents = sorted(a for a in cents if a in gu and gu.degree(a) > 0)
    rep.metrics["n_agents"] = len(agents)
    rep.n_observations = len(agents)
    if len(agents) < 10:
        rep.flags.append("fewer than 10 connected agents with centroids")
        return rep
    sub = gu.subgraph(agents)
    if sub.number_of_edges() == 0:
        rep.flags.append("graph is edgeless after filtering")
        return rep

    seeds = _seed_tree(seed, 4)
    partition = louvain_partition(sub, seed=seeds[0] % (2**31))
    social = [partition[a] for a in agents]
    rep.metrics["n_communities"] = len(set(social))

    X = np.stack([cents[a].components for a in agents])
    best = _silhouette_kmeans(X, cfg, seeds[1])
    if best is None:
        rep.flags.append("style clustering degenerate (all points coincide)")
        return rep
    style_labels, k_style, silhouette = best
    rep.metrics["k_style"] = k_style
    rep.metrics["silhouette"] = silhouette

    nmi = normalized_mutual_information(social, style_labels)
    ari = adjusted_rand_index(social, style_labels)
    rep.metrics["nmi"] = nmi
    rep.metrics["ari"] = ari

    rng = np.random.default_rng(seeds[2])
    null = np.empty(cfg.permutation_resamples)
    style_arr = np.asarray(style_labels)
    for i in range(cfg.permutation_resamples):
        null[i] = normalized_mutual_information(social, rng.permutation(style_arr))
    perm = p_value_from_null(nmi, null, alternative="greater")
    rep.tests["nmi_label_perm"] = perm
    rep.metrics["nmi_null_mean"] = float(null.mean())
    rep.primary_test = "nmi_label_perm"
    rep.primary_p = perm.p_value

    text_cents = _text_centroids(d, cfg)
    t_agents = [a for a in agents if a in text_cents]
    if len(t_agents) >= 10:
        Xt = np.stack([text_cents[a] for a in t_agents])
        best_t = _silhouette_kmeans(Xt, cfg, seeds[3])
        if best_t is not None:
            social_t = [partition[a] for a in t_agents]
            rep.metrics["nmi_text"] = normalized_mutual_information(
                social_t, best_t[0]
            )

    rep.table = [("community_style_nmi", nmi, rep.metrics["nmi_null_mean"],
                  perm.p_value)]
    return rep


# ---------------------------------------------------------------------------
# e6: theme cascades
# ---------------------------------------------------------------------------

def e6_cascades(
    d: Dataset,
    seed=None,
    *,
    config: AnalysisConfig | None = None,
) -> ExperimentReport:
    """Reproduction numbers of visual themes and their spread profile."""
    cfg = config or AnalysisConfig()
    rep = ExperimentReport(
        "e6",
        "Visual themes recruit distinct adopters at a super-critical rate",
        "theme cascades",
    )
    if not d.posts:
        rep.flags.append("empty dataset")
        return rep
    if len(d.posts) < 30:
        rep.flags.append("fewer than 30 posts; theme clustering is coarse")
    themes = detect_themes(d, seed=_seed_tree(seed, 1)[0],
                           posts_per_cluster=cfg.posts_per_cluster)
    results = [
        theme_r0(t, d, scaling=cfg.r0_scaling, window_hours=cfg.r0_window_hours)
        for t in themes
    ]
    rep.n_observations = len(results)
    rep.metrics["n_themes"] = len(results)
    if not results:
        rep.flags.append("no themes detected")
        return rep
    r0s = np.array([r.r0 for r in results], dtype=float)
    rep.metrics["mean_r0"] = float(r0s.mean())
    rep.metrics["sd_r0"] = float(r0s.std(ddof=1)) if r0s.size > 1 else None
    rep.metrics["median_r0"] = float(np.median(r0s))
    frac = supercritical_fraction(results)
    rep.metrics["supercritical_fraction"] = frac

    k = int(np.sum(r0s > 1.0))
    binom = ss.binomtest(k, len(results), 0.5)
    test = TestResult(float(frac), float(binom.pvalue), "analytic")
    rep.tests["supercritical_binomial"] = test
    rep.primary_test = "supercritical_binomial"
    rep.primary_p = test.p_value

    rep.metrics["sensitivity"] = sensitivity_grid(themes, d).to_dict()
    corr = centrality_r0_correlation(results, build_interaction_graph(d))
    if corr is not None:
        rep.correlations["centrality_r0"] = corr

    rep.table = [
        ("mean_r0", rep.metrics["mean_r0"], 1.0, None),
        ("supercritical_fraction", frac, 0.5, test.p_value),
    ]
    return rep


# ---------------------------------------------------------------------------
# e7: distinctiveness vs engagement
# ---------------------------------------------------------------------------

def distinctiveness_scores(
    d: Dataset,
    *,
    config: AnalysisConfig | None = None,
) -> tuple[list[str], np.ndarray, np.ndarray]:
    """Per-agent visual distinctiveness and mean post engagement.

    Distinctiveness = 1 - cos(agent centroid, unweighted mean centroid of
    the agents who directed at least one interaction at them). Agents
    without an audience, a centroid, or posts are dropped. Returns
    (agents, distinctiveness, engagement) aligned by index.
    """
    cfg = config or AnalysisConfig()
    cents = agent_centroids(d, min_posts=cfg.min_posts_centroid)
    g = build_interaction_graph(d)
    audience: dict[str, set[str]] = {}
    for src, row in g.weights.items():
        for tgt in row:
            audience.setdefault(tgt, set()).add(src)

    posts_by_agent = d.posts_by_agent()
    agents, vds_values, engagement = [], [], []
    for agent in sorted(cents):
        sources = [s for s in audience.get(agent, ()) if s in cents]
        if not sources:
            continue
        aud_mean = np.mean([cents[s].components for s in sources], axis=0)
        try:
            vds = 1.0 - cosine(cents[agent], aud_mean)
        except ValueError:
            continue
        posts = posts_by_agent.get(agent, [])
        if not posts:
            continue
        agents.append(agent)
        vds_values.append(vds)
        engagement.append(
            float(np.mean([p.like_count + p.comment_count for p in posts]))
        )
    return agents, np.asarray(vds_values), np.asarray(engagement)


def e7_distinctiveness(
    d: Dataset,
    *,
    config: AnalysisConfig | None = None,
) -> ExperimentReport:
    """Quadratic shape of engagement as a function of how far an agent's
    style sits from its incoming-interaction audience."""
    cfg = config or AnalysisConfig()
    rep = ExperimentReport(
        "e7",
        "Engagement peaks at intermediate distinctiveness from the audience mean",
        "distinctiveness curvature",
    )
    _, vds_values, engagement = distinctiveness_scores(d, config=cfg)

    rep.n_observations = len(vds_values)
    rep.metrics["n_agents"] = len(vds_values)
    if len(vds_values) < 3:
        rep.flags.append("fewer than 3 agents with audiences and centroids")
        return rep
    x = vds_values
    y = engagement
    rep.metrics["vds_mean"] = float(x.mean())
    rep.metrics["vds_min"] = float(x.min())
    rep.metrics["vds_max"] = float(x.max())
    rep.metrics["engagement_mean"] = float(y.mean())

    try:
        fit = quadratic_fit(x, y)
    except ValueError as exc:
        rep.flags.append(f"quadratic fit failed: {exc}")
        return rep
    rep.metrics["beta0"] = fit.beta0
    rep.metrics["beta1"] = fit.beta1
    rep.metrics["beta2"] = fit.beta2
    rep.metrics["r_squared"] = fit.r_squared
    rep.metrics["vertex"] = fit.vertex
    if fit.vertex is not None:
        inside = bool(x.min() <= fit.vertex <= x.max())
        rep.metrics["vertex_in_range"] = inside
        if not inside:
            rep.flags.append("vertex outside observed distinctiveness range")
    else:
        rep.metrics["vertex_in_range"] = None
    if fit.beta2_p is not None:
        test = TestResult(fit.beta2, fit.beta2_p, "analytic")
        rep.tests["curvature"] = test
        rep.primary_test = "curvature"
        rep.primary_p = fit.beta2_p
    rep.table = [("curvature_beta2", fit.beta2, 0.0, fit.beta2_p)]
    return rep


# ---------------------------------------------------------------------------
# e8: intra-chain style diversity
# ---------------------------------------------------------------------------

def e8_style_diversity(
    d: Dataset,
    *,
    seed=None,
    config: AnalysisConfig | None = None,
) -> ExperimentReport:
    """Chains mix more styles than single agents but fewer than random
    image sets: within-agent < intra-chain < random."""
    cfg = config or AnalysisConfig()
    rep = ExperimentReport(
        "e8",
        "Chain style diversity sits between single-agent spread and a random baseline",
        "chain style diversity",
    )
    chains = extract_chains(d, cfg.min_chain_depth)
    rep.metrics["n_chains"] = len(chains)
    rep.n_observations = len(chains)
    if not chains:
        rep.flags.append("no chains at the configured minimum depth")
        return rep
    depths = [c.depth for c in chains]
    icsd_values = np.array([chain_style_diversity(c) for c in chains])
    rep.metrics["icsd_mean"] = float(icsd_values.mean())
    rep.metrics["mean_distinct_authors"] = float(
        np.mean([c.distinct_agents() for c in chains])
    )

    spread = within_agent_spread(d)
    within_values = np.array([spread[a] for a in sorted(spread)])
    rep.metrics["within_agent_mean"] = (
        float(within_values.mean()) if within_values.size else None
    )

    pool = _image_pool(d)
    null = chain_null_distribution(
        pool, depths, "diversity",
        n_resamples=cfg.diversity_null_resamples, seed=_seed_tree(seed, 1)[0],
    )
    rep.metrics["random_baseline_mean"] = null.mean

    if icsd_values.size >= 2 and len(null.values) >= 2:
        test = welch_t(icsd_values, null.values)
        rep.tests["chain_vs_random_welch"] = test
        rep.primary_test = "chain_vs_random_welch"
        rep.primary_p = test.p_value
    if within_values.size >= 2 and icsd_values.size >= 2:
        rep.tests["within_vs_chain_welch"] = welch_t(within_values, icsd_values)

    ordered = None
    if within_values.size and icsd_values.size:
        ordered = bool(
            within_values.mean() < icsd_values.mean() < null.mean
        )
    rep.metrics["ordering_holds"] = ordered

    if np.unique(depths).size > 1 and np.unique(icsd_values).size > 1:
        corr = pearson_r(np.asarray(depths, dtype=float), icsd_values)
        if corr is not None:
            rep.correlations["depth_icsd"] = corr
    ccs_values = np.array([chain_coherence(c) for c in chains])
    if np.unique(ccs_values).size > 1 and np.unique(icsd_values).size > 1:
        corr = pearson_r(ccs_values, icsd_values)
        if corr is not None:
            rep.correlations["ccs_icsd"] = corr

    rep.table = [
        ("icsd_mean", rep.metrics["icsd_mean"], null.mean, rep.primary_p),
        ("within_agent_mean", rep.metrics["within_agent_mean"],
         rep.metrics["icsd_mean"],
         rep.tests["within_vs_chain_welch"].p_value
         if "within_vs_chain_welch" in rep.tests else None),
    ]
    return rep


# ---------------------------------------------------------------------------
# robustness pipelines
# ---------------------------------------------------------------------------

def r1_graph_nulls(d: Dataset, *, seed=None, config: AnalysisConfig | None = None) -> ExperimentReport:
    """Homophily result under the full-size degree-preserving ensemble."""
    cfg = config or AnalysisConfig()
    rep = ExperimentReport(
        "r1",
        "Tie-structure results hold under a large degree-preserving null ensemble",
        "tie-structure robustness",
    )
    _homophily_analysis(rep, d, cfg, seed, cfg.robust_graph_null_count)
    # Robustness pipelines never enter the FDR pass.
    rep.primary_test = None
    rep.primary_p = None
    return rep


def r2_lag_coherence(d: Dataset, *, seed=None, config: AnalysisConfig | None = None) -> ExperimentReport:
    """Coherence at chain lags 1-3 and with same-author pairs removed."""
    cfg = config or AnalysisConfig()
    rep = ExperimentReport(
        "r2",
        "Chain coherence persists at longer lags and without same-author pairs",
        "coherence decay",
    )
    chains = extract_chains(d, cfg.min_chain_depth)
    rep.metrics["n_chains"] = len(chains)
    rep.n_observations = len(chains)
    if not chains:
        rep.flags.append("no chains at the configured minimum depth")
        return rep
    pool = _image_pool(d)
    seeds = _seed_tree(seed, 3)
    rows = []
    for lag, lag_seed in zip((1, 2, 3), seeds):
        res = lag_k_coherence(chains, lag, pool,
                              n_resamples=cfg.permutation_resamples, seed=lag_seed)
        if res is None:
            continue
        rep.metrics[f"lag{lag}"] = {
            "n_pairs": res.n_pairs,
            "observed_mean": res.observed_mean,
            "null_mean": res.null_mean,
            "delta": res.delta,
            "p_value": res.p_value,
        }
        rows.append((f"lag{lag}_coherence", res.observed_mean, res.null_mean,
                     res.p_value))
    filtered = [chain_coherence(c, include_same_author=False) for c in chains]
    filtered = [v for v in filtered if v is not None]
    rep.metrics["ccs_cross_author"] = float(np.mean(filtered)) if filtered else None
    rep.table = rows
    return rep


def r3_cascade_sensitivity(d: Dataset, *, seed=None, config: AnalysisConfig | None = None) -> ExperimentReport:
    """Super-critical fraction across the scaling x window grid."""
    cfg = config or AnalysisConfig()
    rep = ExperimentReport(
        "r3",
        "Cascade conclusions are stable across scaling factors and adoption windows",
        "cascade sensitivity",
    )
    if not d.posts:
        rep.flags.append("empty dataset")
        return rep
    themes = detect_themes(d, seed=_seed_tree(seed, 1)[0],
                           posts_per_cluster=cfg.posts_per_cluster)
    rep.metrics["n_themes"] = len(themes)
    rep.n_observations = len(themes)
    if not themes:
        rep.flags.append("no themes detected")
        return rep
    grid = sensitivity_grid(themes, d)
    rep.metrics["sensitivity"] = grid.to_dict()
    fr = np.asarray(grid.fractions)
    rep.metrics["monotone_in_window"] = bool(np.all(np.diff(fr, axis=1) >= 0.0))
    # r0 scales linearly with s by construction; expose the check anyway.
    base = [theme_r0(t, d, scaling=1.0, window_hours=cfg.r0_window_hours).r0
            for t in themes]
    scaled = [theme_r0(t, d, scaling=2.0, window_hours=cfg.r0_window_hours).r0
              for t in themes]
    rep.metrics["r0_linear_in_scaling"] = bool(
        np.allclose(np.asarray(scaled), 2.0 * np.asarray(base))
    )
    rep.table = [
        ("supercritical_fraction_s3_w48",
         float(fr[list(grid.s_values).index(3)][list(grid.windows_hours).index(48.0)])
         if 3 in grid.s_values and 48.0 in grid.windows_hours else None,
         0.5, None),
    ]
    return rep


# ---------------------------------------------------------------------------
# f1: randomized targeted criticism
# ---------------------------------------------------------------------------

def f1_targeted_criticism(
    d: Dataset,
    assignment: dict | None,
    *,
    config: AnalysisConfig | None = None,
) -> ExperimentReport:
    """Welch comparison of pre/post centroid shifts between treatment and
    control agents from the randomized criticism scenario."""
    cfg = config or AnalysisConfig()
    rep = ExperimentReport(
        "f1",
        "Targeted criticism changes the magnitude of style shift relative to matched controls",
        "targeted criticism",
    )
    if not assignment:
        rep.flags.append("no assignment record available")
        return rep
    try:
        treatment = list(assignment["treatment_ids"])
        control = list(assignment["control_ids"])
        boundary = assignment["treatment_start"]
    except KeyError as exc:
        rep.flags.append(f"assignment record missing field {exc}")
        return rep
    if isinstance(boundary, str):
        boundary = parse_timestamp(boundary)

    posts_by_agent = d.posts_by_agent()

    def period_shift(agent: str) -> float | None:
        pre = [p.image_embedding for p in posts_by_agent.get(agent, [])
               if p.created_at < boundary]
        post = [p.image_embedding for p in posts_by_agent.get(agent, [])
                if p.created_at >= boundary]
        if len(pre) < cfg.min_posts_centroid or len(post) < cfg.min_posts_centroid:
            return None
        return _direction_shift(np.mean(pre, axis=0), np.mean(post, axis=0))

    treat_vals = [v for v in (period_shift(a) for a in treatment) if v is not None]
    ctrl_vals = [v for v in (period_shift(a) for a in control) if v is not None]
    rep.metrics["n_treatment"] = len(treat_vals)
    rep.metrics["n_control"] = len(ctrl_vals)
    rep.n_observations = len(treat_vals) + len(ctrl_vals)
    dropped = (len(treatment) - len(treat_vals)) + (len(control) - len(ctrl_vals))
    if dropped:
        rep.flags.append(f"{dropped} agents dropped for too few posts in a period")
    if len(treat_vals) < 2 or len(ctrl_vals) < 2:
        rep.flags.append("not enough agents with posts in both periods")
        return rep
    mt = float(np.mean(treat_vals))
    mc = float(np.mean(ctrl_vals))
    rep.metrics["mean_shift_treatment"] = mt
    rep.metrics["mean_shift_control"] = mc
    rep.metrics["difference"] = mt - mc
    rep.metrics["treatment_below_control"] = bool(mt < mc)
    test = welch_t(treat_vals, ctrl_vals)
    rep.tests["treatment_vs_control_welch"] = test
    rep.table = [("shift_treatment_vs_control", mt, mc, test.p_value)]
    return rep


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

EXPERIMENT_IDS = ("e1", "e2", "e3", "e4", "e5", "e6", "e7", "e8",
                  "r1", "r2", "r3", "f1")

# Pipelines whose primary p-value enters the global FDR pass, in order.
_FDR_IDS = ("e1", "e2", "e3", "e4", "e5", "e6", "e7", "e8")


@dataclass
class RunReport:
    reports: list
    seed: int | None
    config: AnalysisConfig
    fdr: dict

    def get(self, experiment_id: str) -> ExperimentReport | None:
        for rep in self.reports:
            if rep.experiment_id == experiment_id:
                return rep
        return None

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "config": _jsonsafe(self.config.to_dict()),
            "fdr": _jsonsafe(self.fdr),
            "reports": [rep.to_dict() for rep in self.reports],
        }


def run_all(
    d: Dataset,
    seed: int | None = 0,
    *,
    config: AnalysisConfig | None = None,
    experiments=None,
    assignment: dict | None = None,
) -> RunReport:
    """Run a selection of pipelines with per-pipeline deterministic seeds.

    ``experiments`` is an iterable of ids (default: e1-e8 and r1-r3, plus
    f1 when an assignment record is supplied). Sub-seeds are derived per
    pipeline id, so running a subset reproduces exactly the numbers the
    full run produces for those pipelines. A pipeline that raises is
    recorded as a flagged, metric-free report and the run continues.
    """
    cfg = config or AnalysisConfig()
    if experiments is None:
        selected = [e for e in EXPERIMENT_IDS if e != "f1"]
        if assignment:
            selected.append("f1")
    else:
        selected = list(experiments)
        unknown = [e for e in selected if e not in EXPERIMENT_IDS]
        if unknown:
            raise ValueError(f"unknown experiment id: {unknown[0]}")

    sub_seeds = dict(zip(EXPERIMENT_IDS, _seed_tree(seed, len(EXPERIMENT_IDS))))
    runners = {
        "e1": lambda: e1_chains(d, seed=sub_seeds["e1"], config=cfg),
        "e2": lambda: e2_homophily(d, seed=sub_seeds["e2"], config=cfg),
        "e3": lambda: e3_style_drift(d, seed=sub_seeds["e3"], config=cfg),
        "e4": lambda: e4_cross_modal(d, seed=sub_seeds["e4"], config=cfg),
        "e5": lambda: e5_communities(d, sub_seeds["e5"], config=cfg),
        "e6": lambda: e6_cascades(d, sub_seeds["e6"], config=cfg),
        "e7": lambda: e7_distinctiveness(d, config=cfg),
        "e8": lambda: e8_style_diversity(d, seed=sub_seeds["e8"], config=cfg),
        "r1": lambda: r1_graph_nulls(d, seed=sub_seeds["r1"], config=cfg),
        "r2": lambda: r2_lag_coherence(d, seed=sub_seeds["r2"], config=cfg),
        "r3": lambda: r3_cascade_sensitivity(d, seed=sub_seeds["r3"], config=cfg),
        "f1": lambda: f1_targeted_criticism(d, assignment, config=cfg),
    }

    titles = {
        "e1": "chain coherence", "e2": "visual homophily",
        "e3": "style convergence", "e4": "criticism response",
        "e5": "community/style alignment", "e6": "theme cascades",
        "e7": "distinctiveness curvature", "e8": "chain style diversity",
        "r1": "tie-structure robustness", "r2": "coherence decay",
        "r3": "cascade sensitivity", "f1": "targeted criticism",
    }
    reports = []
    for exp_id in selected:
        try:
            reports.append(runners[exp_id]())
        except Exception as exc:  # record, keep going
            failed = ExperimentReport(
                exp_id, f"pipeline failed: {type(exc).__name__}",
                titles[exp_id],
            )
            failed.flags.append(f"error: {type(exc).__name__}: {exc}")
            reports.append(failed)

    fdr_entries = []
    ps, reps_with_p = [], []
    for rep in reports:
        if rep.experiment_id in _FDR_IDS and rep.primary_p is not None:
            ps.append(rep.primary_p)
            reps_with_p.append(rep)
    if ps:
        rejected = bh_fdr(ps, q=cfg.fdr_q)
        for rep, p, sig in zip(reps_with_p, ps, rejected):
            rep.fdr_significant = bool(sig)
            fdr_entries.append({
                "experiment_id": rep.experiment_id,
                "test": rep.primary_test,
                "p_value": p,
                "significant": bool(sig),
            })
    fdr = {"q": cfg.fdr_q, "n_tests": len(ps), "tests": fdr_entries}
    return RunReport(reports=reports, seed=seed, config=cfg, fdr=fdr)


# ---------------------------------------------------------------------------
# report rendering
# ---------------------------------------------------------------------------

def write_report_json(run: RunReport, path) -> None:
    text = json.dumps(run.to_dict(), sort_keys=True, indent=2, allow_nan=False)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _table_rows(run_dict: dict) -> list[list[str]]:
    rows = []
    for rep in run_dict.get("reports", []):
        for entry in rep.get("table", []):
            rows.append([
                rep.get("experiment_id", ""),
                entry.get("metric", ""),
                _fmt(entry.get("observed")),
                _fmt(entry.get("baseline")),
                _fmt(entry.get("p_value")),
                rep.get("phenomenon", ""),
            ])
    return rows


_TABLE_HEADER = ["experiment", "metric", "observed", "baseline", "p_value",
                 "phenomenon"]


def write_report_csv(run: RunReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_TABLE_HEADER)
        writer.writerows(_table_rows(run.to_dict()))


def render_report_table(run_dict: dict, fmt: str = "text") -> str:
    """Render the flat metric table from a parsed report structure."""
    rows = _table_rows(run_dict)
    if fmt == "json":
        return json.dumps(run_dict, sort_keys=True, indent=2, allow_nan=False)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(_TABLE_HEADER)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}; supported: text, csv, json")
    widths = [len(h) for h in _TABLE_HEADER]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(_TABLE_HEADER, widths)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"
