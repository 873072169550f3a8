"""Exact twin-class lumping of the Moran jump chain.

Vertices with identical neighbourhoods (open twins: same neighbours, or
closed twins: same neighbours plus mutual adjacency) are exchangeable under
graph automorphisms, so the vector of per-class mutant counts is itself a
Markov chain with the same absorption law as the vertex-level process. On
graphs that decompose into few such classes (cliques: one class; stars:
two; dense incubators: core + centres + leaf blocks) this collapses the
per-event cost to O(#classes) regardless of graph size.

The decomposition is *verified*, never assumed: every vertex's per-class
out- and in-neighbour counts must be all-or-nothing and identical across
its class, else ``lumped_model`` returns None and callers fall back to the
general frontier kernel. Singleton classes always verify, so small graphs
lump trivially into their vertex set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .graphs import Digraph
from ._kernels import (RESULT_CENSORED, RESULT_EXTINCTION, RESULT_FIXATION,
                       _next_double, _rand_below, _stream_init)

LUMP_MAX_CLASSES = 64


@dataclass(frozen=True)
class LumpedModel:
    n: int
    sizes: np.ndarray          # class sizes
    adj: np.ndarray            # adj[a, b] = 1 iff every a-vertex hits every b-vertex
    within: np.ndarray         # within[a] = 1 iff the class induces a clique
    inv_deg: np.ndarray        # 1/d_out per class (0 for out-degree 0)
    class_of: np.ndarray       # vertex -> class
    v3_class: Optional[np.ndarray]   # 1 for all-V3 classes; None if impure


def _group_rows(keys):
    groups = {}
    for v, key in enumerate(keys):
        groups.setdefault(key, []).append(v)
    return groups


def lumped_model(G: Digraph, max_classes: int = LUMP_MAX_CLASSES
                 ) -> Optional[LumpedModel]:
    """Verified twin decomposition, or None when it does not apply."""
    n = G.n
    outs = [frozenset(int(w) for w in G.out_neighbors(v)) for v in range(n)]
    ins = [frozenset(int(w) for w in G.in_neighbors(v)) for v in range(n)]
    open_groups = _group_rows([(outs[v], ins[v]) for v in range(n)])
    closed_groups = _group_rows(
        [(outs[v] | {v}, ins[v] | {v}) for v in range(n)])

    class_of = np.full(n, -1, dtype=np.int64)
    classes = []
    for v in range(n):
        if class_of[v] >= 0:
            continue
        cand_closed = [u for u in closed_groups[(outs[v] | {v}, ins[v] | {v})]
                       if class_of[u] < 0]
        cand_open = [u for u in open_groups[(outs[v], ins[v])]
                     if class_of[u] < 0]
        members = max((cand_closed, cand_open), key=len)
        if len(members) < 2:
            members = [v]
        cid = len(classes)
        for u in members:
            class_of[u] = cid
        classes.append(members)
    k = len(classes)
    if k > max_classes:
        return None

    sizes = np.array([len(c) for c in classes], dtype=np.int64)
    adj = np.zeros((k, k), dtype=np.uint8)
    within = np.zeros(k, dtype=np.uint8)

    # verify: per-vertex class-count rows must be uniform and all-or-nothing
    def rows_ok(neigh_sets):
        ref = {}
        for a, members in enumerate(classes):
            for v in members:
                row = np.zeros(k, dtype=np.int64)
                for w in neigh_sets[v]:
                    row[class_of[w]] += 1
                key = (a,)
                if key not in ref:
                    ref[key] = row
                    for b in range(k):
                        want_full = sizes[b] if b != a else sizes[a] - 1
                        if row[b] not in (0, want_full):
                            return None
                elif not np.array_equal(ref[key], row):
                    return None
        return {a: ref[(a,)] for a in range(k)}

    out_rows = rows_ok(outs)
    if out_rows is None:
        return None
    in_rows = rows_ok(ins)
    if in_rows is None:
        return None

    for a in range(k):
        for b in range(k):
            if a == b:
                within[a] = 1 if (sizes[a] > 1 and
                                  out_rows[a][a] == sizes[a] - 1) else 0
            else:
                adj[a, b] = 1 if out_rows[a][b] == sizes[b] else 0

    degs = G.out_degrees()
    inv_deg = np.zeros(k, dtype=np.float64)
    for a, members in enumerate(classes):
        d = int(degs[members[0]])
        expect = int((adj[a] * sizes).sum()) + (sizes[a] - 1 if within[a] else 0)
        if d != expect:
            return None
        inv_deg[a] = 1.0 / d if d > 0 else 0.0

    v3_class = None
    if G.labels and "V3" in G.labels:
        mask = G.label_mask("V3")
        v3_class = np.zeros(k, dtype=np.uint8)
        pure = True
        for a, members in enumerate(classes):
            inside = int(mask[members].sum())
            if inside == len(members):
                v3_class[a] = 1
            elif inside != 0:
                pure = False
        if not pure:
            v3_class = None

    return LumpedModel(n=n, sizes=sizes, adj=adj, within=within,
                       inv_deg=inv_deg, class_of=class_of, v3_class=v3_class)


# ---------------------------------------------------------------------------
# compiled chain on class counts
# ---------------------------------------------------------------------------

@njit(cache=True)
def _lumped_single(r, step_cap, state, sizes, adj, within, inv_deg, m,
                   v3_class, v3_target, track_v3):
    """Jump chain on per-class mutant counts; same law as the vertex chain.

    Row weights w1[a] (mutant spawners of class a) and w0[a] are cached and
    refreshed only for rows affected by a flip; the running total is
    rebuilt from the rows every 2^20 events to bound float drift.
    """
    k = sizes.shape[0]
    ntot = 0
    jtot = 0
    for a in range(k):
        ntot += sizes[a]
        jtot += m[a]
    cur_v3 = 0
    if track_v3:
        for a in range(k):
            if v3_class[a] == 1:
                cur_v3 += m[a]
    max_v3 = cur_v3
    hit = track_v3 and v3_target >= 0 and cur_v3 >= v3_target

    s1 = np.empty(k, np.float64)   # reachable opposite counts for mutants
    s0 = np.empty(k, np.float64)
    w1 = np.empty(k, np.float64)
    w0 = np.empty(k, np.float64)
    total = 0.0
    for a in range(k):
        o1 = 0.0
        o0 = 0.0
        for b in range(k):
            if adj[a, b] == 1:
                o1 += sizes[b] - m[b]
                o0 += m[b]
        if within[a] == 1:
            o1 += sizes[a] - m[a]
            o0 += m[a]
        s1[a] = o1
        s0[a] = o0
        w1[a] = r * m[a] * o1 * inv_deg[a]
        w0[a] = (sizes[a] - m[a]) * o0 * inv_deg[a]
        total += w1[a] + w0[a]

    eff = 0
    since_rebuild = 0
    while 0 < jtot < ntot and eff < step_cap:
        since_rebuild += 1
        if since_rebuild >= 1048576 or total <= 0.0:
            total = 0.0
            for a in range(k):
                w1[a] = r * m[a] * s1[a] * inv_deg[a]
                w0[a] = (sizes[a] - m[a]) * s0[a] * inv_deg[a]
                total += w1[a] + w0[a]
            since_rebuild = 0
            if total <= 0.0:
                break
        u01, state = _next_double(state)
        x = u01 * total
        sel_a = -1
        sel_t = 1
        acc = 0.0
        for a in range(k):
            if w1[a] > 0.0:
                sel_a = a
                sel_t = 1
                acc += w1[a]
                if x < acc:
                    break
            if w0[a] > 0.0:
                sel_a = a
                sel_t = 0
                acc += w0[a]
                if x < acc:
                    break
        if sel_a < 0:
            total = 0.0
            for a in range(k):
                w1[a] = r * m[a] * s1[a] * inv_deg[a]
                w0[a] = (sizes[a] - m[a]) * s0[a] * inv_deg[a]
                total += w1[a] + w0[a]
            since_rebuild = 0
            continue
        # target class ~ opposite-type occupancy among reachable classes
        opp = s1[sel_a] if sel_t == 1 else s0[sel_a]
        u02, state = _next_double(state)
        y = u02 * opp
        tb = -1
        acc2 = 0.0
        for b in range(k):
            if adj[sel_a, b] == 1:
                cnt = (sizes[b] - m[b]) if sel_t == 1 else m[b]
                if cnt > 0:
                    tb = b
                    acc2 += cnt
                    if y < acc2:
                        break
        if within[sel_a] == 1 and (tb < 0 or y >= acc2):
            cnt = (sizes[sel_a] - m[sel_a]) if sel_t == 1 else m[sel_a]
            if cnt > 0:
                tb = sel_a
        if tb < 0:
            total = -1.0          # force rebuild; inconsistent drift
            continue
        delta = 1 if sel_t == 1 else -1
        m[tb] += delta
        jtot += delta
        # refresh caches: s-rows of classes that can reach tb, and both rows
        for a in range(k):
            if adj[a, tb] == 1:
                s1[a] -= delta
                s0[a] += delta
                nt = r * m[a] * s1[a] * inv_deg[a]
                total += nt - w1[a]
                w1[a] = nt
                nt = (sizes[a] - m[a]) * s0[a] * inv_deg[a]
                total += nt - w0[a]
                w0[a] = nt
        if within[tb] == 1:
            s1[tb] -= delta
            s0[tb] += delta
        nt = r * m[tb] * s1[tb] * inv_deg[tb]
        total += nt - w1[tb]
        w1[tb] = nt
        nt = (sizes[tb] - m[tb]) * s0[tb] * inv_deg[tb]
        total += nt - w0[tb]
        w0[tb] = nt
        eff += 1
        if track_v3 and v3_class[tb] == 1:
            cur_v3 += delta
            if cur_v3 > max_v3:
                max_v3 = cur_v3
            if v3_target >= 0 and cur_v3 >= v3_target:
                hit = True
    if jtot == 0:
        code = RESULT_EXTINCTION
    elif jtot == ntot:
        code = RESULT_FIXATION
    else:
        code = RESULT_CENSORED
    return code, eff, max_v3, hit, state


@njit(cache=True)
def lumped_run(r, init_counts, master_seed, replicate, step_cap,
               sizes, adj, within, inv_deg,
               v3_class, v3_target, track_v3):
    m = init_counts.copy()
    state = _stream_init(master_seed, replicate)
    code, eff, max_v3, hit, state = _lumped_single(
        r, step_cap, state, sizes, adj, within, inv_deg, m,
        v3_class, v3_target, track_v3)
    return code, eff, max_v3, hit


@njit(cache=True)
def lumped_estimate(r, init_counts, uniform_init, replicates, master_seed,
                    step_cap, sizes, adj, within, inv_deg, size_cum):
    k = sizes.shape[0]
    m = np.empty(k, np.int64)
    dummy = np.zeros(1, np.uint8)
    ntot = size_cum[k]
    extinct = 0
    fixed = 0
    censored = 0
    for rep in range(replicates):
        state = _stream_init(master_seed, rep)
        if uniform_init:
            v0, state = _rand_below(state, ntot)
            for a in range(k):
                m[a] = 0
            for a in range(k):
                if v0 < size_cum[a + 1]:
                    m[a] = 1
                    break
        else:
            for a in range(k):
                m[a] = init_counts[a]
        code, eff, mv, hi, state = _lumped_single(
            r, step_cap, state, sizes, adj, within, inv_deg, m,
            dummy, -1, False)
        if code == RESULT_EXTINCTION:
            extinct += 1
        elif code == RESULT_FIXATION:
            fixed += 1
        else:
            censored += 1
    return extinct, fixed, censored
