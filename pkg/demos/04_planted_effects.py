#!/usr/bin/env python3
"""Plant effects in the simulator and watch the detectors find them.

The simulator has two knobs that create real social-visual structure:

  drift_lambda    each window, every agent's style anchor moves a step
                  toward its interaction neighborhood's centroid.
  homophily_beta  follow decisions weight candidates by exp(beta * cos):
                  the more similar your anchor, the likelier the follow.

With both at zero (the null colony), style convergence (VCI) should
sit at zero and visual homophily (H) at one - and the pipelines say
exactly that. With either knob turned up, the matching detector should
light up while the null keeps quiet. This is the calibration story:
a detector is only trustworthy if it stays silent on colonies where
nothing was planted.

Run:  python3 demos/04_planted_effects.py  (about a minute)
"""

from artcolony import SimConfig, e2_homophily, e3_style_drift, run_simulation

BASE = dict(n_agents=200, duration_minutes=12 * 1440)


def colony(seed, **knobs):
    return run_simulation(SimConfig(seed=seed, **BASE, **knobs)).dataset


print("simulating three colonies (identical except for one knob each)...")
null_d = colony(21)
drift_d = colony(21, drift_lambda=0.3)
homo_d = colony(21, homophily_beta=3.0)

print("\nstyle convergence detector (VCI, sign-flip permutation test)")
for name, d in [("null colony   ", null_d), ("drift planted ", drift_d)]:
    rep = e3_style_drift(d, seed=0)
    print(f"  {name} VCI={rep.metrics['vci_mean']:+.4f}  p={rep.primary_p:.4f}")

print("\nvisual homophily detector (H, degree-preserving tie rewiring)")
for name, d in [("null colony     ", null_d), ("homophily planted", homo_d)]:
    rep = e2_homophily(d, seed=0)
    print(f"  {name} H={rep.metrics['h_ratio']:.4f}  p={rep.primary_p:.4f}")

print("""
Reading the output: the planted rows should show VCI well above zero and
H well above one, each with small p-values; the null rows should show
VCI near zero and H near one with unremarkable p-values. Tie-based
detectors are checked against degree-preserving rewirings of the real
graph, so ordinary degree inequality alone cannot fake an effect.""")
