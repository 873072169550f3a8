"""Closed-form extinction bounds against exact values on small graphs.

Three floors hold universally: 1/(5 r sqrt(n)) on strongly connected
digraphs, 1/(42 r^{4/3} n^{1/3}) and n/(288 r^2 m) on connected graphs.
The two incubator ceilings are asymptotic (they need a branching factor
far beyond desk scale), so they are evaluated but never asserted.
"""

from moranlab import (connected_graphs, exact_extinction, theorem_bounds,
                      verify_lower_bounds_exhaustive)

r = 2.0
print("floors vs exact extinction on all connected graphs with 5 vertices:")
print(f"{'graph':>8s} {'m':>3s} {'exact':>8s} {'sqrt':>8s} {'cbrt':>8s} "
      f"{'density':>8s}")
for i, G in enumerate(connected_graphs(5, 5)):
    ell = exact_extinction(G, r).mean_extinction
    b = theorem_bounds(G.n, G.m, r)
    print(f"{i:8d} {G.m:3d} {ell:8.4f} "
          f"{b['digraph_sqrt_floor'].value:8.4f} "
          f"{b['undirected_cbrt_floor'].value:8.4f} "
          f"{b['edge_density_floor'].value:8.4f}")

print("\nexhaustive check up to 6 vertices (floors + absorption-time "
      "ceiling):")
reports = verify_lower_bounds_exhaustive(max_n=6, r_list=(1.5, 2.0),
                                         digraph_samples=50, seed=3,
                                         with_time_bound=True)
by_name = {}
for rep in reports:
    ok, tot = by_name.get(rep.bound_name, (0, 0))
    by_name[rep.bound_name] = (ok + rep.satisfied, tot + 1)
for name, (ok, tot) in sorted(by_name.items()):
    print(f"  {name:28s} {ok}/{tot} hold")

print("\nthe ceilings, evaluated (asymptotic; never asserted at this scale):")
b = theorem_bounds(1503, 446562, 2.0)
for name in ("dense_incubator_ceiling", "sparse_incubator_ceiling"):
    print(f"  {name}: {b[name].value:.3f}  [{b[name].note}]")
