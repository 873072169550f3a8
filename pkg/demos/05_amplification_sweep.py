"""Empirical amplification: stars approach 1/r^2, incubators beat cliques.

Star extinction tends to 1/r^2 as the star grows. A dense incubator is
expected to push extinction below the complete graph on the same vertex
count — the direction of amplification is checkable at desk scale even
though the asymptotic rate is not. Moderate replicate counts keep this
script quick; the acceptance suite repeats it at full scale.
"""

from moranlab import (baseline_graph, build_dense_incubator, danger,
                      estimate_extinction)

r = 2.0
reps = 20_000

print(f"stars, r={r} (limit 1/r^2 = {1 / r ** 2}):")
for n in (51, 101, 201):
    est = estimate_extinction(baseline_graph("star", n), r, reps, seed=5)
    print(f"  n={n:4d}: {est.point:.4f} ({est.ci_low:.4f},{est.ci_high:.4f})")

print("\ndense incubator vs complete graph on equal n:")
inc = build_dense_incubator(r, 4, seed=7)
clique = baseline_graph("complete", inc.n)
e_inc = estimate_extinction(inc, r, reps, seed=6)
e_cl = estimate_extinction(clique, r, reps, seed=7)
print(f"  incubator k=4 (n={inc.n}): {e_inc.point:.4f} "
      f"({e_inc.ci_low:.4f},{e_inc.ci_high:.4f})")
print(f"  clique    K_{clique.n}:    {e_cl.point:.4f} "
      f"({e_cl.ci_low:.4f},{e_cl.ci_high:.4f})")
print(f"  amplification direction confirmed: {e_inc.ci_high < e_cl.ci_low}")

print("\nwhy the star amplifies: vertex danger (death pressure when the")
print("neighbourhood is hostile) concentrates on the centre:")
q = danger(baseline_graph("star", 101))
print(f"  centre danger {q[0]:.0f}, leaf danger {q[1]:.4f}")
