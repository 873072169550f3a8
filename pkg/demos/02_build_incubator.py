"""Construct an incubator and re-derive its structure independently.

An incubator is k leaf blocks (V1) starred onto k centres (V2), which are
wired biregularly into a regular expander core (V3). The dense variant
(branching factor sqrt(k)) makes the core a clique and the centre-core
layer complete bipartite. Every structural claim made by the builder is
checked here with the set-based graph queries, not trusted.
"""

from moranlab import (IncubatorSpec, build_incubator,
                      certify_small_set_expander, edge_boundary,
                      incubator_counts, is_biregular, Digraph)

spec = IncubatorSpec(r=2.0, k=4, b=2, seed=7)
print(f"spec: r={spec.r} k={spec.k} b={spec.b} -> beta={spec.beta}, "
      f"leaf block {spec.leaf_block}")
n, m = incubator_counts(spec)
print(f"predicted counts: n={n}, m={m}")

G = build_incubator(spec)
print(f"built: {G}")
V1, V2, V3 = (list(G.labels[k]) for k in ("V1", "V2", "V3"))
print(f"parts: |V1|={len(V1)} |V2|={len(V2)} |V3|={len(V3)}")

ok, degs = is_biregular(G, V1, V2)
print(f"leaf layer biregular: {ok}, degrees {degs}, "
      f"edges {edge_boundary(G, V1, V2)}")
ok, degs = is_biregular(G, V2, V3)
print(f"centre-core layer biregular: {ok}, degrees {degs}, "
      f"edges {edge_boundary(G, V2, V3)}")
print(f"V1-V3 edges (must be 0): {edge_boundary(G, V1, V3)}")

# core expansion: extract the induced core and certify it
arcs = G.edge_list()
v3set = set(V3)
relabel = {v: i for i, v in enumerate(V3)}
core_edges = [(relabel[int(u)], relabel[int(v)]) for u, v in arcs
              if int(u) in v3set and int(v) in v3set]
core = Digraph(len(V3), core_edges)
cert = certify_small_set_expander(core, mode="spectral")
print(f"core: degree {core.out_degree(0)} on {core.n} vertices; "
      f"certified={cert.passed} "
      f"(ratio floor {cert.certified_ratio_floor:.2f}, "
      f"need >= degree/4 = {core.out_degree(0) / 4:.2f})")
