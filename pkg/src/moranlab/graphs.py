"""Immutable graph/digraph representation and set-based structural queries.

Vertices are dense integers ``0..n-1``. Undirected graphs are stored as
symmetric digraphs (every undirected edge appears as two arcs) so that one
simulation engine serves both; ``m`` reports undirected edges once.
Adjacency is kept sorted, which makes duplicate detection and equality
checks cheap. Instances are immutable after construction and safe to share
across concurrent simulation replicates.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

LABEL_NAMES = ("V1", "V2", "V3")


class GraphError(ValueError):
    """Invalid graph construction or query arguments."""


class Digraph:
    """Simple digraph (no loops, no parallel arcs) in CSR form.

    Parameters
    ----------
    n : int
        Vertex count.
    edges : iterable of (u, v)
        Arcs for directed graphs, undirected edges otherwise (each pair
        listed once; orientation ignored).
    directed : bool
        If False the edge set is symmetrized.
    labels : mapping, optional
        Partition tags, e.g. ``{"V1": [...], "V2": [...], "V3": [...]}``.
        Label sets must be disjoint subsets of the vertex range.
    """

    __slots__ = ("n", "directed", "out_ptr", "out_idx", "in_ptr", "in_idx",
                 "labels", "_kernel_cache")

    def __init__(self, n: int, edges: Iterable[Sequence[int]],
                 directed: bool = False,
                 labels: Optional[Mapping[str, Iterable[int]]] = None):
        if n < 1:
            raise GraphError(f"need at least one vertex, got n={n}")
        e = np.asarray(list(edges), dtype=np.int64)
        if e.size == 0:
            e = e.reshape(0, 2)
        if e.ndim != 2 or e.shape[1] != 2:
            raise GraphError("edges must be (u, v) pairs")
        if e.size and (e.min() < 0 or e.max() >= n):
            raise GraphError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise GraphError("self-loops are not allowed")

        if directed:
            arcs = e
        else:
            arcs = np.concatenate([e, e[:, ::-1]], axis=0)

        order = np.lexsort((arcs[:, 1], arcs[:, 0]))
        arcs = arcs[order]
        if arcs.shape[0] > 1:
            dup = np.all(arcs[1:] == arcs[:-1], axis=1)
            if np.any(dup):
                u, v = arcs[1:][dup][0]
                raise GraphError(f"duplicate edge ({u}, {v})")

        self.n = int(n)
        self.directed = bool(directed)
        self.out_idx = arcs[:, 1].astype(np.int32)
        counts = np.bincount(arcs[:, 0], minlength=n)
        self.out_ptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)

        rev = arcs[np.lexsort((arcs[:, 0], arcs[:, 1]))]
        self.in_idx = rev[:, 0].astype(np.int32)
        counts_in = np.bincount(arcs[:, 1], minlength=n)
        self.in_ptr = np.concatenate([[0], np.cumsum(counts_in)]).astype(np.int64)

        self.labels = _normalize_labels(labels, n)
        self._kernel_cache = None

        self.out_idx.setflags(write=False)
        self.out_ptr.setflags(write=False)
        self.in_idx.setflags(write=False)
        self.in_ptr.setflags(write=False)

    # -- basic queries ----------------------------------------------------

    @property
    def num_arcs(self) -> int:
        return int(self.out_idx.shape[0])

    @property
    def m(self) -> int:
        """Edge count: undirected edges once, or arcs if directed."""
        return self.num_arcs if self.directed else self.num_arcs // 2

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.out_idx[self.out_ptr[v]:self.out_ptr[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        return self.in_idx[self.in_ptr[v]:self.in_ptr[v + 1]]

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.out_ptr).astype(np.int64)

    def in_degrees(self) -> np.ndarray:
        return np.diff(self.in_ptr).astype(np.int64)

    def out_degree(self, v: int) -> int:
        return int(self.out_ptr[v + 1] - self.out_ptr[v])

    def in_degree(self, v: int) -> int:
        return int(self.in_ptr[v + 1] - self.in_ptr[v])

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.out_neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < nbrs.shape[0] and nbrs[i] == v)

    def label_mask(self, name: str) -> np.ndarray:
        """Boolean membership mask for a partition label."""
        if not self.labels or name not in self.labels:
            raise GraphError(f"graph has no label {name!r}")
        mask = np.zeros(self.n, dtype=bool)
        mask[list(self.labels[name])] = True
        return mask

    def edge_list(self) -> np.ndarray:
        """Arcs as an array of (u, v); undirected edges once with u < v."""
        src = np.repeat(np.arange(self.n), np.diff(self.out_ptr))
        arcs = np.stack([src, self.out_idx.astype(np.int64)], axis=1)
        if not self.directed:
            arcs = arcs[arcs[:, 0] < arcs[:, 1]]
        return arcs

    def __eq__(self, other) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return (self.n == other.n and self.directed == other.directed
                and np.array_equal(self.out_ptr, other.out_ptr)
                and np.array_equal(self.out_idx, other.out_idx)
                and self.labels == other.labels)

    def __hash__(self):
        return hash((self.n, self.directed, self.out_idx.tobytes()))

    def __repr__(self):
        kind = "digraph" if self.directed else "graph"
        lab = " labelled" if self.labels else ""
        return f"<{kind} n={self.n} m={self.m}{lab}>"


def _normalize_labels(labels, n):
    if labels is None:
        return None
    out = {}
    seen = np.zeros(n, dtype=bool)
    for name, ids in labels.items():
        if name not in LABEL_NAMES:
            raise GraphError(f"unknown label {name!r}; expected one of {LABEL_NAMES}")
        ids = tuple(sorted(int(i) for i in ids))
        if ids and (ids[0] < 0 or ids[-1] >= n):
            raise GraphError(f"label {name!r} has out-of-range vertex")
        for i in ids:
            if seen[i]:
                raise GraphError(f"vertex {i} carries two labels")
            seen[i] = True
        out[name] = ids
    return out


def _as_vertex_mask(G: Digraph, S: Iterable[int], what: str) -> np.ndarray:
    mask = np.zeros(G.n, dtype=bool)
    for v in S:
        v = int(v)
        if v < 0 or v >= G.n:
            raise GraphError(f"{what} contains out-of-range vertex {v}")
        mask[v] = True
    return mask


# -- set-based operations --------------------------------------------------

def edge_boundary(G: Digraph, S: Iterable[int],
                  T: Optional[Iterable[int]] = None) -> int:
    """Number of edges between S and T (or between S and its complement).

    S and T must be disjoint. Undirected edges are counted once; on a
    digraph, arcs crossing in either direction each count.
    """
    s_mask = _as_vertex_mask(G, S, "S")
    if T is None:
        t_mask = ~s_mask
    else:
        t_mask = _as_vertex_mask(G, T, "T")
        if np.any(s_mask & t_mask):
            raise GraphError("S and T overlap")
    src = np.repeat(np.arange(G.n), np.diff(G.out_ptr))
    dst = G.out_idx
    count = int(np.count_nonzero(s_mask[src] & t_mask[dst]))
    if G.directed:
        count += int(np.count_nonzero(t_mask[src] & s_mask[dst]))
    return count


def is_strongly_connected(G: Digraph) -> bool:
    """True iff every vertex reaches every other (BFS out + BFS in from 0)."""
    if G.n == 1:
        return True
    for ptr, idx in ((G.out_ptr, G.out_idx), (G.in_ptr, G.in_idx)):
        seen = np.zeros(G.n, dtype=bool)
        seen[0] = True
        stack = [0]
        while stack:
            v = stack.pop()
            for w in idx[ptr[v]:ptr[v + 1]]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(int(w))
        if not seen.all():
            return False
    return True


def is_biregular(G: Digraph, S: Iterable[int], T: Iterable[int]):
    """Check that the bipartite subgraph G[S, T] is biregular.

    Returns ``(True, (deg_S, deg_T))`` if every S-vertex has the same
    number of T-neighbours and vice versa, else ``(False, None)``.
    """
    if G.directed:
        raise GraphError("is_biregular is defined for undirected graphs")
    s_mask = _as_vertex_mask(G, S, "S")
    t_mask = _as_vertex_mask(G, T, "T")
    if not s_mask.any() or not t_mask.any():
        raise GraphError("S and T must be nonempty")
    if np.any(s_mask & t_mask):
        raise GraphError("S and T overlap")
    src = np.repeat(np.arange(G.n), np.diff(G.out_ptr))
    dst = G.out_idx
    cross = s_mask[src] & t_mask[dst]
    deg_s = np.bincount(src[cross], minlength=G.n)[s_mask]
    cross_t = t_mask[src] & s_mask[dst]
    deg_t = np.bincount(src[cross_t], minlength=G.n)[t_mask]
    if int(deg_s.max()) != int(deg_s.min()) or int(deg_t.max()) != int(deg_t.min()):
        return False, None
    return True, (int(deg_s[0]), int(deg_t[0]))


# -- serialization ----------------------------------------------------------

def graph_to_json(G: Digraph) -> str:
    """Serialize to the graph JSON format (edges once, labels optional)."""
    doc = {
        "n": G.n,
        "directed": G.directed,
        "edges": [[int(u), int(v)] for u, v in G.edge_list()],
    }
    if G.labels:
        doc["labels"] = {k: list(v) for k, v in G.labels.items()}
    return json.dumps(doc)


def graph_from_json(text: str) -> Digraph:
    doc = json.loads(text)
    return Digraph(doc["n"], doc["edges"], directed=doc["directed"],
                   labels=doc.get("labels"))


def graph_to_edgelist(G: Digraph) -> str:
    """Plain text format: header line ``n directed``, then ``u v`` lines."""
    lines = [f"{G.n} {1 if G.directed else 0}"]
    lines += [f"{u} {v}" for u, v in G.edge_list()]
    return "\n".join(lines) + "\n"


def graph_from_edgelist(text: str) -> Digraph:
    rows = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise GraphError("edge list needs a 'n directed' header line")
    n = int(rows[0][0])
    flag = rows[0][1].lower()
    directed = flag in ("1", "true")
    edges = [(int(u), int(v)) for u, v in rows[1:]]
    return Digraph(n, edges, directed=directed)


def save_graph(G: Digraph, path) -> None:
    text = graph_to_json(G) if str(path).endswith(".json") else graph_to_edgelist(G)
    with open(path, "w") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")


def load_graph(path) -> Digraph:
    with open(path) as fh:
        text = fh.read()
    if str(path).endswith(".json") or text.lstrip().startswith("{"):
        return graph_from_json(text)
    return graph_from_edgelist(text)
