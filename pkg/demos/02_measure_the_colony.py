#!/usr/bin/env python3
"""A tour of the six core measurements, on one simulated colony.

Each measurement asks a different question about how style moves through
the network:

  CCS   chain coherence        do image replies stay visually close to
                               what they answer?
  H     visual homophily       are connected agents more alike than
                               disconnected ones?
  VCI   style convergence      do agents drift toward their neighborhood
                               more than toward a matched random crowd?
  ICSD  chain style diversity  how much does style vary inside one chain,
                               relative to one agent and to random pulls?
  VDS   distinctiveness        how far each agent sits from the colony
                               mean, and how engagement responds to that.
  R0    theme reproduction     when a visual theme appears, how many
                               secondary adopters does it recruit?

Every one of these is an experiment pipeline that returns an
ExperimentReport: metrics, significance tests against an explicit null,
and flags when the data cannot support the question.

Run:  python3 demos/02_measure_the_colony.py
"""

from artcolony import (
    SimConfig,
    e1_chains,
    e2_homophily,
    e3_style_drift,
    e6_cascades,
    e7_distinctiveness,
    e8_style_diversity,
    run_simulation,
)

d = run_simulation(SimConfig(n_agents=150, duration_minutes=12 * 1440, seed=11)).dataset
print(f"dataset: {len(d.posts)} posts, {len(d.replies)} replies, "
      f"{len(d.interactions)} interactions\n")


def show(rep, lines):
    p = f"p={rep.primary_p:.4f}" if rep.primary_p is not None else "no test"
    print(f"[{rep.experiment_id}] {rep.title}  ({p})")
    for text in lines:
        print("   ", text)
    for flag in rep.flags:
        print("    note:", flag)
    print()


# CCS --- reply chains versus depth-matched random walks ----------------
rep = e1_chains(d, seed=0)
show(rep, [
    f"{rep.metrics['n_chains']} chains, mean depth {rep.metrics['mean_depth']:.2f}",
    f"coherence {rep.metrics['ccs_mean']:.3f} vs null {rep.metrics['ccs_null_mean']:.3f} "
    f"(delta {rep.metrics['delta_ccs']:+.3f})",
])

# H --- cosine similarity across ties vs non-ties -----------------------
rep = e2_homophily(d, seed=0)
show(rep, [
    f"connected pairs {rep.metrics['n_connected_pairs']}, "
    f"disconnected {rep.metrics['n_disconnected_pairs']}",
    f"H = {rep.metrics['h_ratio']:.3f} "
    f"(connected mean {rep.metrics['mean_cosine_connected']:.3f} / "
    f"disconnected mean {rep.metrics['mean_cosine_disconnected']:.3f})",
    f"tie-presence AUC from visual similarity: {rep.metrics['auc_visual']:.3f}",
])

# VCI --- window-to-window movement toward the neighborhood -------------
rep = e3_style_drift(d, seed=0)
show(rep, [
    f"{rep.metrics['n_agent_windows']} agent-window observations over "
    f"{rep.metrics['n_window_transitions']} window transitions",
    f"VCI mean {rep.metrics['vci_mean']:+.4f} (sd {rep.metrics['vci_sd']:.4f}); "
    "positive means agents moved toward their own neighbors more than toward "
    "a degree-matched random alternative",
])

# ICSD --- diversity inside a chain sits between two anchors ------------
rep = e8_style_diversity(d, seed=0)
show(rep, [
    f"within-agent {rep.metrics['within_agent_mean']:.3f} < "
    f"chain {rep.metrics['icsd_mean']:.3f} < "
    f"random {rep.metrics['random_baseline_mean']:.3f} "
    f"(ordering holds: {rep.metrics['ordering_holds']})",
])

# VDS --- distinctiveness and the engagement curve -----------------------
rep = e7_distinctiveness(d)
lines = [
    f"{rep.metrics['n_agents']} agents, VDS mean {rep.metrics['vds_mean']:.3f} "
    f"(range {rep.metrics['vds_min']:.3f}..{rep.metrics['vds_max']:.3f})",
]
if rep.metrics.get("vertex") is not None:
    lines.append(
        f"quadratic engagement fit peaks at VDS={rep.metrics['vertex']:.3f} "
        f"(inside observed range: {rep.metrics['vertex_in_range']})")
show(rep, lines)

# R0 --- themes as cascades ----------------------------------------------
rep = e6_cascades(d, 0)
show(rep, [
    f"{rep.metrics['n_themes']} themes; mean R0 {rep.metrics['mean_r0']:.2f}, "
    f"median {rep.metrics['median_r0']:.2f}",
    f"supercritical fraction (R0 > 1): {rep.metrics['supercritical_fraction']:.2f}",
])

print("On a default colony (no planted drift or homophily) expect H near 1,")
print("VCI near 0, and the chain metrics driven mostly by same-author runs;")
print("demo 04 plants real effects and watches the same numbers move.")
