"""artcolony: a deterministic simulator and analysis suite for image-first
agent social networks.

The package has two halves. ``sim`` grows a synthetic network of
image-posting agents minute by minute (posts, image replies, comments,
likes, follows) with optional style drift, similarity-weighted following,
criticism reactance, and a randomized targeted-criticism scenario.
``experiments`` measures the resulting dataset: reply-chain coherence,
visual homophily, style convergence, criticism response, community/style
alignment, theme cascades, distinctiveness curvature, and chain style
diversity, with permutation/bootstrap statistics and a global
false-discovery correction.
"""

from .chains import (
    Chain,
    chain_coherence,
    chain_engagement_stats,
    chain_null_distribution,
    chain_style_diversity,
    extract_chains,
    lag_k_coherence,
)
from .dataset import (
    AgentRecord,
    Dataset,
    IngestError,
    InteractionEvent,
    PostNode,
    ReplyNode,
    Violation,
    dataset_equal,
    export,
    format_timestamp,
    ingest,
    parse_timestamp,
    validate_dataset,
    window_bounds,
    window_count,
    window_index,
)
from .experiments import (
    EXPERIMENT_IDS,
    AnalysisConfig,
    ExperimentReport,
    RunReport,
    e1_chains,
    e2_homophily,
    e3_style_drift,
    style_convergence_samples,
    e4_cross_modal,
    e5_communities,
    e6_cascades,
    distinctiveness_scores,
    e7_distinctiveness,
    e8_style_diversity,
    f1_targeted_criticism,
    r1_graph_nulls,
    r2_lag_coherence,
    r3_cascade_sensitivity,
    render_report_table,
    run_all,
    write_report_csv,
    write_report_json,
)
from .graph import (
    InteractionGraph,
    build_interaction_graph,
    degree_preserving_ensemble,
    degree_preserving_null,
    louvain_partition,
    neighborhood_centroid,
    undirected_binary,
)
from .lexicon import ADVERSARIAL_LEXICON, contains_lexicon_term, tokenize
from .sim import (
    GroundTruth,
    SimConfig,
    SimResult,
    load_ground_truth,
    randomized_adversarial_scenario,
    run_simulation,
)
from .stats import (
    ConfidenceInterval,
    CorrelationResult,
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
from .style import (
    StyleCentroid,
    SynthStyleConfig,
    agent_centroids,
    agent_style_centroids,
    apply_drift,
    cosine,
    subject_pool,
    synth_embedding,
    unit,
    within_agent_spread,
)
from .themes import (
    CascadeResult,
    Theme,
    centrality_r0_correlation,
    detect_themes,
    kmeans,
    secondary_adopters,
    sensitivity_grid,
    silhouette_score,
    supercritical_fraction,
    theme_r0,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # dataset
    "AgentRecord", "PostNode", "ReplyNode", "InteractionEvent", "Dataset",
    "IngestError", "Violation", "ingest", "export", "validate_dataset",
    "dataset_equal", "parse_timestamp", "format_timestamp",
    "window_index", "window_bounds", "window_count",
    # style
    "StyleCentroid", "SynthStyleConfig", "unit", "cosine",
    "agent_centroids", "agent_style_centroids", "within_agent_spread",
    "subject_pool", "synth_embedding", "apply_drift",
    # graph
    "InteractionGraph", "build_interaction_graph", "neighborhood_centroid",
    "undirected_binary", "louvain_partition", "degree_preserving_null",
    "degree_preserving_ensemble",
    # chains
    "Chain", "extract_chains", "chain_coherence", "chain_style_diversity",
    "chain_null_distribution", "lag_k_coherence", "chain_engagement_stats",
    # themes
    "Theme", "CascadeResult", "kmeans", "silhouette_score", "detect_themes",
    "secondary_adopters", "theme_r0", "supercritical_fraction",
    "sensitivity_grid", "centrality_r0_correlation",
    # stats
    "TestResult", "ConfidenceInterval", "CorrelationResult",
    "permutation_test", "p_value_from_null", "bootstrap_bca_ci", "bh_fdr",
    "pearson_r", "welch_t", "mann_whitney_auc",
    "normalized_mutual_information", "adjusted_rand_index",
    "logistic_fit", "quadratic_fit",
    # lexicon
    "ADVERSARIAL_LEXICON", "tokenize", "contains_lexicon_term",
    # sim
    "SimConfig", "SimResult", "GroundTruth", "run_simulation",
    "randomized_adversarial_scenario", "load_ground_truth",
    # experiments
    "AnalysisConfig", "ExperimentReport", "RunReport", "EXPERIMENT_IDS",
    "run_all", "e1_chains", "e2_homophily", "e3_style_drift", "style_convergence_samples",
    "e4_cross_modal", "e5_communities", "e6_cascades",
    "e7_distinctiveness", "distinctiveness_scores", "e8_style_diversity", "r1_graph_nulls",
    "r2_lag_coherence", "r3_cascade_sensitivity", "f1_targeted_criticism",
    "write_report_json", "write_report_csv", "render_report_table",
]
