"""Enumeration and sampling of small test graphs.

Connected undirected graphs up to 7 vertices come from the networkx graph
atlas (non-isomorphic representatives; the Moran process is isomorphism
invariant, so one representative per class suffices). Strongly connected
digraphs are rejection-sampled with a seeded generator.
"""

from __future__ import annotations

from typing import Iterator, List

import numpy as np

from .graphs import Digraph, is_strongly_connected

ATLAS_MAX_N = 7

# number of connected graphs on n vertices, n = 1..7 (sanity anchor)
CONNECTED_COUNTS = {1: 1, 2: 1, 3: 2, 4: 6, 5: 21, 6: 112, 7: 853}


def connected_graphs(n_min: int = 2, n_max: int = 7) -> Iterator[Digraph]:
    """All non-isomorphic connected undirected graphs with n_min <= n <= n_max."""
    if n_max > ATLAS_MAX_N:
        raise ValueError(f"atlas covers n <= {ATLAS_MAX_N}, got n_max={n_max}")
    from networkx.generators.atlas import graph_atlas_g

    for g in graph_atlas_g():
        n = g.number_of_nodes()
        if n < n_min or n > n_max:
            continue
        G = Digraph(n, list(g.edges()), directed=False)
        if is_strongly_connected(G):
            yield G


def random_strongly_connected_digraphs(count: int, n_max: int = 7,
                                       seed: int = 0,
                                       n_min: int = 2) -> List[Digraph]:
    """Rejection-sample simple strongly connected digraphs (seeded)."""
    rng = np.random.default_rng(seed)
    out: List[Digraph] = []
    while len(out) < count:
        n = int(rng.integers(n_min, n_max + 1))
        p = rng.uniform(0.25, 0.8)
        mat = rng.random((n, n)) < p
        np.fill_diagonal(mat, False)
        edges = list(zip(*np.nonzero(mat)))
        if not edges:
            continue
        G = Digraph(n, edges, directed=True)
        if is_strongly_connected(G):
            out.append(G)
    return out
