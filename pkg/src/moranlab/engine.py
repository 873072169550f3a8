"""Moran process simulation: faithful stepper, fast kernels, estimators.

`step` is the reference single-step implementation (pure Python, explicit
probabilities). Bulk runs go through compiled kernels with per-replicate
SplitMix64 streams keyed by (master_seed, replicate_index): results are
reproducible and independent of replicate execution order, so parallelising
or re-batching replicates can never change an estimate.

Default step cap is 100*ceil(r*n^4/(r-1)) for r > 1 (one hundred times the
worst-case expected absorption time), 100*n^5 for r <= 1 where that formula
is undefined. Capped runs are reported as censored, never dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Optional, Tuple, Union

import numpy as np

from .graphs import Digraph, GraphError
from . import _kernels as K

FIXATION = "fixation"
EXTINCTION = "extinction"
STEP_CAP_EXCEEDED = "step_cap_exceeded"
_CODE_NAMES = {K.RESULT_EXTINCTION: EXTINCTION, K.RESULT_FIXATION: FIXATION,
               K.RESULT_CENSORED: STEP_CAP_EXCEEDED}

Z_95 = 1.959963984540054
Z_99 = 2.5758293035489004


# ---------------------------------------------------------------------------
# reference configuration + single step
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MutantConfiguration:
    """A mutant set X with its cached aggregate weight n + (r-1)|X|."""

    members: FrozenSet[int]
    size: int
    total_weight: float

    @classmethod
    def create(cls, G: Digraph, r: float, members: Iterable[int]):
        ms = frozenset(int(v) for v in members)
        for v in ms:
            if v < 0 or v >= G.n:
                raise GraphError(f"vertex {v} out of range")
        return cls(members=ms, size=len(ms),
                   total_weight=G.n + (r - 1.0) * len(ms))

    def weight_consistent(self, G: Digraph, r: float) -> bool:
        return (self.size == len(self.members) and
                abs(self.total_weight - (G.n + (r - 1.0) * self.size)) < 1e-9)


def step(G: Digraph, r: float, cfg: MutantConfiguration,
         rng: np.random.Generator) -> MutantConfiguration:
    """One Moran step: fitness-weighted spawner, uniform out-neighbour.

    A vertex with no out-neighbours leaves the state unchanged, as does a
    spawn onto a vertex of the spawner's own type.
    """
    if not r > 0:
        raise GraphError(f"fitness must be positive, got r={r}")
    members = sorted(cfg.members)
    j = len(members)
    w_tot = G.n + (r - 1.0) * j
    if rng.random() * w_tot < r * j:
        v = members[int(rng.integers(j))]
        mutant = True
    else:
        others = sorted(set(range(G.n)) - cfg.members)
        v = others[int(rng.integers(G.n - j))]
        mutant = False
    nbrs = G.out_neighbors(v)
    if nbrs.shape[0] == 0:
        return cfg
    w = int(nbrs[int(rng.integers(nbrs.shape[0]))])
    if mutant and w not in cfg.members:
        return MutantConfiguration.create(G, r, cfg.members | {w})
    if not mutant and w in cfg.members:
        return MutantConfiguration.create(G, r, cfg.members - {w})
    return cfg


# ---------------------------------------------------------------------------
# outcomes and estimates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimOutcome:
    result: str
    steps: int
    effective_steps: int
    max_v3_mutants: Optional[int] = None
    v3_hit: Optional[bool] = None


def wilson_interval(successes: int, trials: int,
                    z: float = Z_95) -> Tuple[float, float]:
    """Wilson score interval; well behaved near 0 and 1."""
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials
                         + z2 / (4.0 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class Estimate:
    """Monte-Carlo extinction estimate with its sampling provenance."""

    point: float
    ci_low: float
    ci_high: float
    replicates: int
    extinct: int
    fixed: int
    censored: int
    seed: int
    kernel: str
    flagged: bool               # censoring above 1 in 1000

    def ci(self, z: float = Z_95) -> Tuple[float, float]:
        return wilson_interval(self.extinct, self.replicates, z)


# ---------------------------------------------------------------------------
# kernel plumbing
# ---------------------------------------------------------------------------

def default_step_cap(n: int, r: float) -> int:
    if r > 1:
        return 100 * math.ceil(r * n ** 4 / (r - 1.0))
    return 100 * n ** 5


def _naive_prep(G: Digraph):
    cache = G._kernel_cache or {}
    if "naive" not in cache:
        cache["naive"] = (G.out_ptr.astype(np.int64),
                          G.out_idx.astype(np.int64))
        G._kernel_cache = cache
    return cache["naive"]


HUB_MIN_INDEG = 32
HUB_MAX = 12


def _effective_prep(G: Digraph):
    """Static arrays for the effective kernel (built once per graph).

    Hubs are the up-to-HUB_MAX vertices of largest in-degree (at least
    HUB_MIN_INDEG): their incoming frontier pairs are kept in typed,
    degree-bucketed arc partitions so that flipping a hub costs O(1).
    """
    cache = G._kernel_cache or {}
    if "effective" in cache:
        return cache["effective"]
    n = G.n
    out_ptr = G.out_ptr.astype(np.int64)
    out_idx = G.out_idx.astype(np.int64)
    out_deg = np.diff(out_ptr)
    invd = np.zeros(n, dtype=np.float64)
    nz = out_deg > 0
    invd[nz] = 1.0 / out_deg[nz]

    in_deg = np.diff(G.in_ptr)
    cand = np.nonzero(in_deg >= HUB_MIN_INDEG)[0]
    if cand.size > HUB_MAX:
        order = np.lexsort((cand, -in_deg[cand]))
        cand = cand[order[:HUB_MAX]]
    hub_vert = np.sort(cand).astype(np.int64)
    is_hub = np.zeros(n, dtype=np.uint8)
    is_hub[hub_vert] = 1
    hub_of = np.full(n, -1, dtype=np.int64)
    hub_of[hub_vert] = np.arange(hub_vert.shape[0])

    src = np.repeat(np.arange(n), out_deg)
    hub_target = is_hub[out_idx] == 1
    nsmall_out = out_deg - np.bincount(src[hub_target], minlength=n)
    nsmall_out = nsmall_out.astype(np.int64)

    # arcs into hubs, grouped per hub then per out-degree bucket
    arc_src_l, arc_tgt_l, arc_bkt_l = [], [], []
    hb_ptr = [0]
    bkt_ptr = [0]
    bkt_sall, bkt_invmax = [], []
    for h in hub_vert:
        nbrs = G.in_neighbors(int(h)).astype(np.int64)
        b_of = np.log2(out_deg[nbrs]).astype(np.int64)
        order = np.lexsort((nbrs, b_of))
        nbrs = nbrs[order]
        b_of = b_of[order]
        start = 0
        while start < nbrs.shape[0]:
            stop = start
            while stop < nbrs.shape[0] and b_of[stop] == b_of[start]:
                stop += 1
            members = nbrs[start:stop]
            arc_src_l.append(members)
            arc_tgt_l.append(np.full(members.shape[0], h, dtype=np.int64))
            arc_bkt_l.append(np.full(members.shape[0], len(bkt_sall),
                                     dtype=np.int64))
            bkt_sall.append(float(invd[members].sum()))
            bkt_invmax.append(float(invd[members].max()))
            bkt_ptr.append(bkt_ptr[-1] + members.shape[0])
            start = stop
        hb_ptr.append(len(bkt_sall))
    if arc_src_l:
        arc_src = np.concatenate(arc_src_l)
        arc_tgt = np.concatenate(arc_tgt_l)
        arc_bkt = np.concatenate(arc_bkt_l)
    else:
        arc_src = np.zeros(0, dtype=np.int64)
        arc_tgt = np.zeros(0, dtype=np.int64)
        arc_bkt = np.zeros(0, dtype=np.int64)

    # per-spawner lists of hub-arc ids
    if arc_src.size:
        order = np.argsort(arc_src, kind="stable")
        aidx = order.astype(np.int64)
        counts = np.bincount(arc_src, minlength=n)
    else:
        aidx = np.zeros(0, dtype=np.int64)
        counts = np.zeros(n, dtype=np.int64)
    aptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)

    # in-neighbour lists restricted to small targets (hub rows empty)
    inn_ptr = np.zeros(n + 1, dtype=np.int64)
    inn_chunks = []
    for v in range(n):
        if is_hub[v]:
            inn_ptr[v + 1] = inn_ptr[v]
        else:
            nb = G.in_neighbors(v).astype(np.int64)
            inn_chunks.append(nb)
            inn_ptr[v + 1] = inn_ptr[v] + nb.shape[0]
    inn_idx = (np.concatenate(inn_chunks) if inn_chunks
               else np.zeros(0, dtype=np.int64))

    prep = (out_ptr, out_idx, invd, is_hub, hub_of, hub_vert, nsmall_out,
            np.asarray(hb_ptr, dtype=np.int64),
            np.asarray(bkt_ptr, dtype=np.int64),
            np.asarray(bkt_sall, dtype=np.float64),
            np.asarray(bkt_invmax, dtype=np.float64),
            arc_src, arc_tgt, arc_bkt, aptr, aidx, inn_ptr, inn_idx)
    cache["effective"] = prep
    G._kernel_cache = cache
    return prep


def _lumped_prep(G: Digraph):
    """Verified twin-class model, cached; False means not lumpable."""
    cache = G._kernel_cache or {}
    if "lumped" not in cache:
        from ._lumped import lumped_model
        model = lumped_model(G)
        if model is not None:
            size_cum = np.concatenate(
                [[0], np.cumsum(model.sizes)]).astype(np.int64)
            cache["lumped"] = (model, size_cum)
        else:
            cache["lumped"] = False
        G._kernel_cache = cache
    return cache["lumped"]


def _lumped_counts(model, G: Digraph, initial: Iterable[int]) -> np.ndarray:
    counts = np.zeros(model.sizes.shape[0], dtype=np.int64)
    for v in initial:
        v = int(v)
        if v < 0 or v >= G.n:
            raise GraphError(f"initial vertex {v} out of range")
        counts[model.class_of[v]] += 1
    return counts


def _init_mask(G: Digraph, initial: Iterable[int]) -> np.ndarray:
    mask = np.zeros(G.n, dtype=np.uint8)
    for v in initial:
        v = int(v)
        if v < 0 or v >= G.n:
            raise GraphError(f"initial vertex {v} out of range")
        mask[v] = 1
    return mask


def _v3_arrays(G: Digraph, track: bool):
    if not track:
        return np.zeros(1, dtype=np.uint8), False
    if not G.labels or "V3" not in G.labels:
        raise GraphError("graph carries no V3 labels")
    return G.label_mask("V3").astype(np.uint8), True


# ---------------------------------------------------------------------------
# public runs
# ---------------------------------------------------------------------------

def run_to_absorption(G: Digraph, r: float, initial: Iterable[int], seed: int,
                      step_cap: Optional[int] = None,
                      _v3_target: int = -1, _track_v3: bool = False,
                      _replicate: int = 0) -> SimOutcome:
    """Iterate faithful Moran steps until extinction, fixation, or the cap."""
    if not r > 0:
        raise GraphError(f"fitness must be positive, got r={r}")
    cap = default_step_cap(G.n, r) if step_cap is None else int(step_cap)
    out_ptr, out_idx = _naive_prep(G)
    mask = _init_mask(G, initial)
    v3_mask, track = _v3_arrays(G, _track_v3)
    code, steps, eff, max_v3, hit = K.naive_run(
        out_ptr, out_idx, float(r), mask, seed, _replicate, cap,
        v3_mask, _v3_target, track)
    return SimOutcome(result=_CODE_NAMES[int(code)], steps=int(steps),
                      effective_steps=int(eff),
                      max_v3_mutants=int(max_v3) if track else None,
                      v3_hit=bool(hit) if track else None)


def run_effective(G: Digraph, r: float, initial: Iterable[int], seed: int,
                  effective_step_cap: Optional[int] = None,
                  lumping: bool = True,
                  _v3_target: int = -1, _track_v3: bool = False,
                  _replicate: int = 0, _audit: bool = False) -> SimOutcome:
    """Sample only state-changing events; same absorption law as the stepper.

    Steps are reported as effective (state-changing) events only. On graphs
    whose verified twin-class decomposition is small (cliques, stars, dense
    incubators), the identical jump chain is run on per-class mutant counts
    instead of vertices — ``lumping=False`` forces the general frontier
    kernel. ``_audit`` recomputes all frontier bookkeeping from scratch
    after every event (test hook; raises on any inconsistency).
    """
    if not r > 0:
        raise GraphError(f"fitness must be positive, got r={r}")
    cap = (default_step_cap(G.n, r) if effective_step_cap is None
           else int(effective_step_cap))
    v3_mask, track = _v3_arrays(G, _track_v3)
    if lumping and not _audit:
        lp = _lumped_prep(G)
        if lp and (not track or lp[0].v3_class is not None):
            from ._lumped import lumped_run
            model, _ = lp
            counts = _lumped_counts(model, G, initial)
            v3c = (model.v3_class if model.v3_class is not None
                   else np.zeros(model.sizes.shape[0], dtype=np.uint8))
            code, eff, max_v3, hit = lumped_run(
                float(r), counts, seed, _replicate, cap,
                model.sizes, model.adj, model.within, model.inv_deg,
                v3c, _v3_target, track)
            return SimOutcome(result=_CODE_NAMES[int(code)], steps=int(eff),
                              effective_steps=int(eff),
                              max_v3_mutants=int(max_v3) if track else None,
                              v3_hit=bool(hit) if track else None)
    prep = _effective_prep(G)
    init_list = np.array(sorted({int(v) for v in initial}), dtype=np.int64)
    if init_list.size and (init_list[0] < 0 or init_list[-1] >= G.n):
        raise GraphError("initial vertex out of range")
    code, eff, max_v3, hit = K.effective_run(
        float(r), init_list, seed, _replicate, cap, *prep,
        v3_mask, _v3_target, track, _audit)
    if int(code) == K.RESULT_AUDIT_FAILED:
        raise RuntimeError("effective kernel bookkeeping audit failed")
    return SimOutcome(result=_CODE_NAMES[int(code)], steps=int(eff),
                      effective_steps=int(eff),
                      max_v3_mutants=int(max_v3) if track else None,
                      v3_hit=bool(hit) if track else None)


def estimate_extinction(G: Digraph, r: float, replicates: int, seed: int,
                        init: Union[str, Iterable[int]] = "uniform",
                        kernel: str = "effective",
                        step_cap: Optional[int] = None,
                        lumping: bool = True) -> Estimate:
    """Extinction frequency over independent replicates with a Wilson 95% CI.

    ``init="uniform"`` draws one initial mutant uniformly per replicate
    (the uniform-start extinction probability); an explicit vertex set runs
    every replicate from that set. The estimate is flagged when more than
    0.1% of replicates were censored by the step cap. The effective kernel
    dispatches to the exact twin-class chain where it verifies (see
    ``run_effective``); ``lumping=False`` forces the frontier kernel.
    """
    if replicates < 1:
        raise GraphError("need at least one replicate")
    if not r > 0:
        raise GraphError(f"fitness must be positive, got r={r}")
    cap = default_step_cap(G.n, r) if step_cap is None else int(step_cap)
    uniform = isinstance(init, str)
    if uniform and init != "uniform":
        raise GraphError(f"unknown init mode {init!r}")
    if kernel == "naive":
        out_ptr, out_idx = _naive_prep(G)
        mask = (np.zeros(G.n, dtype=np.uint8) if uniform
                else _init_mask(G, init))
        ext, fix, cen = K.naive_estimate(out_ptr, out_idx, float(r), mask,
                                         uniform, replicates, seed, cap)
    elif kernel == "effective":
        lp = _lumped_prep(G) if lumping else False
        if lp:
            from ._lumped import lumped_estimate
            model, size_cum = lp
            counts = (np.zeros(model.sizes.shape[0], dtype=np.int64)
                      if uniform else _lumped_counts(model, G, init))
            ext, fix, cen = lumped_estimate(
                float(r), counts, uniform, replicates, seed, cap,
                model.sizes, model.adj, model.within, model.inv_deg,
                size_cum)
        else:
            prep = _effective_prep(G)
            init_list = (np.zeros(0, dtype=np.int64) if uniform
                         else np.array(sorted({int(v) for v in init}),
                                       dtype=np.int64))
            if init_list.size and (init_list[0] < 0 or init_list[-1] >= G.n):
                raise GraphError("initial vertex out of range")
            ext, fix, cen = K.effective_estimate(float(r), init_list, uniform,
                                                 replicates, seed, cap, *prep)
    else:
        raise GraphError(f"unknown kernel {kernel!r}")
    lo, hi = wilson_interval(int(ext), replicates)
    return Estimate(point=ext / replicates, ci_low=lo, ci_high=hi,
                    replicates=replicates, extinct=int(ext), fixed=int(fix),
                    censored=int(cen), seed=seed, kernel=kernel,
                    flagged=cen > 0.001 * replicates)


def track_v3_trajectory(G: Digraph, r: float, initial: Iterable[int],
                        seed: int, target: int, kernel: str = "effective",
                        step_cap: Optional[int] = None) -> SimOutcome:
    """Run to absorption recording the peak core occupancy |X ∩ V3|.

    ``v3_hit`` reports whether the count ever reached ``target`` (true at
    time zero when the initial set already contains that many core
    vertices). Requires V1/V2/V3 labels on the graph.
    """
    if kernel == "naive":
        return run_to_absorption(G, r, initial, seed, step_cap,
                                 _v3_target=int(target), _track_v3=True)
    if kernel == "effective":
        return run_effective(G, r, initial, seed, step_cap,
                             _v3_target=int(target), _track_v3=True)
    raise GraphError(f"unknown kernel {kernel!r}")
