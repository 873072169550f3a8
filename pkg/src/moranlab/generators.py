"""Graph family constructors: incubators, random regular cores, baselines.

An incubator is k stars (leaf blocks V1, centres V2) attached by a biregular
bipartite layer to a regular expander core V3. Sizes are driven by the
fitness r through beta = 26*ceil(r^2/(r-1)) and a branching factor
b <= sqrt(k). The dense case b = sqrt(k) makes the core a clique and the
bipartite layer complete; it is the only case buildable at desk scale,
because uniform regular-graph sampling (configuration model with whole-sample
rejection) is hopeless for the core degrees beta*b^2 - 1 >= 103 that any
sparse incubator demands.

Ceilings like ceil(r*sqrt(beta)*b) are computed in exact rational arithmetic
so vertex counts never depend on floating-point rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .exact import CapacityError
from .graphs import Digraph, GraphError


class GenerationError(RuntimeError):
    """Random generation exhausted its retry budget."""


def beta_of(r: float) -> int:
    """Core-size multiplier 26*ceil(r^2/(r-1)), exact for the given float r."""
    if not r > 1:
        raise GraphError(f"need r > 1, got r={r}")
    rq = Fraction(r)
    return 26 * math.ceil(rq * rq / (rq - 1))


def _ceil_sqrt(x: Fraction) -> int:
    """Smallest integer c with c^2 >= x (x >= 0), computed exactly."""
    t = -(-x.numerator // x.denominator)  # ceil(x); c^2 >= x iff c^2 >= ceil(x)
    if t <= 0:
        return 0
    return math.isqrt(t - 1) + 1


def _leaf_block_size(r: float, beta: int, b: int) -> int:
    """ceil(r * sqrt(beta) * b), exactly."""
    rq = Fraction(r)
    return _ceil_sqrt(rq * rq * beta * b * b)


@dataclass(frozen=True)
class IncubatorSpec:
    """Parameters of an incubator build: fitness r, star count k, branching b."""

    r: float
    k: int
    b: int
    seed: int = 0
    beta: int = field(init=False)

    def __post_init__(self):
        if not self.r > 1:
            raise GraphError(f"need r > 1, got r={self.r}")
        if self.k < 1:
            raise GraphError(f"need k >= 1, got k={self.k}")
        if not 1 <= self.b <= math.isqrt(self.k):
            raise GraphError(
                f"branching factor must satisfy 1 <= b <= floor(sqrt(k)); "
                f"got b={self.b}, k={self.k}")
        object.__setattr__(self, "beta", beta_of(self.r))

    @property
    def leaf_block(self) -> int:
        return _leaf_block_size(self.r, self.beta, self.b)

    @property
    def part_sizes(self) -> Tuple[int, int, int]:
        return (self.k * self.leaf_block, self.k, self.beta * self.k)


def incubator_counts(spec: IncubatorSpec) -> Tuple[int, int]:
    """Exact vertex and edge counts of the incubator for this spec."""
    c = spec.leaf_block
    k, beta, b = spec.k, spec.beta, spec.b
    n = k * c + k + beta * k
    m = k * c + beta * k * b * b + (k * beta * (beta * b * b - 1)) // 2
    return n, m


def incubator_count_bounds(spec: IncubatorSpec) -> dict:
    """Sandwich bounds on n, m and density; applicable only when b >= beta/r."""
    n, m = incubator_counts(spec)
    k, beta, b, r = spec.k, spec.beta, spec.b, spec.r
    base = k * r * math.sqrt(beta) * b
    return {
        "applicable": b >= beta / r,
        "n": n, "m": m,
        "n_low": base, "n_high": 2 * base,
        "m_low": beta * beta * k * b * b / 2.0, "m_high": float(beta * beta * k * b * b),
        "density_low": beta ** 1.5 * b / (4.0 * r),
        "density_high": beta ** 1.5 * b / r,
    }


# ---------------------------------------------------------------------------
# random regular graphs (configuration model, uniform over simple graphs)
# ---------------------------------------------------------------------------

def random_regular_graph(n: int, d: int, seed: int,
                         max_attempts: int = 5000) -> Digraph:
    """Uniform simple d-regular graph via pairing with whole-sample rejection.

    Each attempt pairs the n*d stubs uniformly; any loop or repeated pair
    rejects the entire sample, which makes accepted samples exactly uniform
    over simple d-regular graphs. Rejection is exponential in d^2, so dense
    degrees exhaust the attempt budget and raise.
    """
    if n < 1 or d < 0 or d > n - 1:
        raise GraphError(f"need 0 <= d <= n-1, got n={n}, d={d}")
    if (n * d) % 2 != 0:
        raise GraphError(f"n*d must be even, got n={n}, d={d}")
    if d == 0:
        return Digraph(n, [], directed=False)
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    for _ in range(max_attempts):
        rng.shuffle(stubs)
        u = stubs[0::2]
        v = stubs[1::2]
        if np.any(u == v):
            continue
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        key = lo * n + hi
        if np.unique(key).size != key.size:
            continue
        return Digraph(n, np.stack([lo, hi], axis=1), directed=False)
    raise GenerationError(
        f"no simple {d}-regular pairing on {n} vertices in {max_attempts} "
        f"attempts; degree too dense for whole-sample rejection")


# ---------------------------------------------------------------------------
# small-set expansion certification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpanderCertificate:
    """Outcome of a small-set expansion check on a d-regular graph.

    Sets of size up to n^(1/3) must have edge-boundary ratio >= d/4.
    Brute force reports the exact minimizing set; the spectral route
    certifies (d - lambda_bar)*(n-s)/n >= d/4 with lambda_bar the second
    eigenvalue magnitude plus a 1e-6 safety inflation, and can only pass
    or decline, never exhibit a violating set.
    """

    mode: str
    passed: bool
    degree: int
    checked_size_limit: int
    witness_set: Optional[Tuple[int, ...]] = None
    witness_ratio: Optional[float] = None
    certified_ratio_floor: Optional[float] = None
    lambda_bar: Optional[float] = None


def _cbrt_floor(n: int) -> int:
    s = max(1, int(round(n ** (1.0 / 3.0))))
    while (s + 1) ** 3 <= n:
        s += 1
    while s ** 3 > n and s > 1:
        s -= 1
    return s


def _regular_degree(G: Digraph) -> int:
    if G.directed:
        raise GraphError("certification is defined for undirected graphs")
    degs = G.out_degrees()
    if degs.size == 0:
        return 0
    if int(degs.max()) != int(degs.min()):
        raise GraphError("graph is not regular")
    return int(degs[0])

def _subset_count(n: int, smax: int) -> int:
    return sum(math.comb(n, s) for s in range(1, smax + 1))


def certify_small_set_expander(G: Digraph, mode: str = "auto",
                               budget: int = 300_000) -> ExpanderCertificate:
    d = _regular_degree(G)
    n = G.n
    smax = _cbrt_floor(n)

    if mode == "auto":
        mode = "brute_force" if _subset_count(n, smax) <= budget else "spectral"

    if mode == "brute_force":
        if _subset_count(n, smax) > budget:
            raise CapacityError(
                f"brute force needs {_subset_count(n, smax)} subsets "
                f"(budget {budget}); use spectral mode")
        from itertools import combinations
        adj_bits = [0] * n
        for v in range(n):
            for w in G.out_neighbors(v):
                adj_bits[v] |= 1 << int(w)
        best_bnd, best_size, best_set = None, 1, None
        passed = True
        for s in range(1, smax + 1):
            for S in combinations(range(n), s):
                mask = 0
                for v in S:
                    mask |= 1 << v
                inside2 = sum((adj_bits[v] & mask).bit_count() for v in S)
                bnd = s * d - inside2          # inside2 double-counts
                if 4 * bnd < d * s:
                    passed = False
                if best_bnd is None or bnd * best_size < best_bnd * s:
                    best_bnd, best_size, best_set = bnd, s, S
        return ExpanderCertificate(
            mode="brute_force", passed=passed, degree=d,
            checked_size_limit=smax, witness_set=best_set,
            witness_ratio=best_bnd / best_size)

    if mode == "spectral":
        A = np.zeros((n, n))
        src = np.repeat(np.arange(n), np.diff(G.out_ptr))
        A[src, G.out_idx] = 1.0
        w = np.linalg.eigvalsh(A)
        lam = max(w[-2], -w[0]) + 1e-6 if n >= 2 else 0.0
        floor = (d - lam) * (n - smax) / n
        passed = all((d - lam) * (n - s) / n >= d / 4.0
                     for s in range(1, smax + 1))
        return ExpanderCertificate(
            mode="spectral", passed=passed, degree=d,
            checked_size_limit=smax, certified_ratio_floor=float(floor),
            lambda_bar=float(lam))

    raise GraphError(f"unknown certification mode {mode!r}")


# ---------------------------------------------------------------------------
# incubator builders
# ---------------------------------------------------------------------------

CORE_RETRY_BUDGET = 100


def _core_graph(core_n: int, core_d: int, seed: int,
                cert_budget: int) -> Digraph:
    """Certified regular core: clique shortcut when the degree forces K_n."""
    if (core_n * core_d) % 2 != 0:
        raise GraphError(
            f"core infeasible: n*d = {core_n}*{core_d} is odd")
    if core_d == core_n - 1:
        iu, ju = np.triu_indices(core_n, k=1)
        H = Digraph(core_n, np.stack([iu, ju], axis=1), directed=False)
        cert = certify_small_set_expander(H, mode="auto", budget=cert_budget)
        if not cert.passed:
            raise GenerationError("complete core failed certification")
        return H
    for attempt in range(CORE_RETRY_BUDGET):
        H = random_regular_graph(core_n, core_d, seed=seed + attempt)
        cert = certify_small_set_expander(H, mode="auto", budget=cert_budget)
        if cert.passed:
            return H
    raise GenerationError(
        f"no certified {core_d}-regular expander on {core_n} vertices "
        f"within {CORE_RETRY_BUDGET} resamples")


def build_incubator(spec: IncubatorSpec, cert_budget: int = 300_000) -> Digraph:
    """Labelled undirected incubator satisfying all structural conditions.

    V1 holds k disjoint leaf blocks of size ceil(r*sqrt(beta)*b), each block
    starred to one V2 centre. The V2-V3 layer assigns centre j the core
    vertices {(j*beta*b^2 + t) mod beta*k}, which is exactly biregular with
    degrees (beta*b^2, b^2). The core is a certified expander of degree
    beta*b^2 - 1 (a clique in the dense case b^2 = k).
    """
    k, b, beta, r = spec.k, spec.b, spec.beta, spec.r
    c = spec.leaf_block
    n1, n2, n3 = spec.part_sizes
    v2_base = n1
    v3_base = n1 + n2
    n = n1 + n2 + n3

    leaves = np.arange(n1, dtype=np.int64)
    star_edges = np.stack([leaves, v2_base + leaves // c], axis=1)

    deg23 = beta * b * b
    j = np.repeat(np.arange(k, dtype=np.int64), deg23)
    t = np.tile(np.arange(deg23, dtype=np.int64), k)
    mid_edges = np.stack([v2_base + j, v3_base + (j * deg23 + t) % n3], axis=1)
    core_deg_check = np.bincount((j * deg23 + t) % n3, minlength=n3)
    if core_deg_check.min() != b * b or core_deg_check.max() != b * b:
        raise GraphError("internal: centre-core layer is not biregular")

    core = _core_graph(n3, deg23 - 1, spec.seed, cert_budget)
    core_edges = core.edge_list() + v3_base

    edges = np.concatenate([star_edges, mid_edges, core_edges], axis=0)
    labels = {
        "V1": range(n1),
        "V2": range(v2_base, v2_base + n2),
        "V3": range(v3_base, n),
    }
    G = Digraph(n, edges, directed=False, labels=labels)

    n_expect, m_expect = incubator_counts(spec)
    if (G.n, G.m) != (n_expect, m_expect):
        raise GraphError(
            f"internal: built ({G.n}, {G.m}), expected ({n_expect}, {m_expect})")
    return G


def build_dense_incubator(r: float, k: int, seed: int = 0) -> Digraph:
    """Incubator with b = sqrt(k): complete centre-core layer, clique core."""
    root = math.isqrt(k)
    if root * root != k:
        raise GraphError(f"dense incubator needs a perfect-square k, got {k}")
    return build_incubator(IncubatorSpec(r=r, k=k, b=root, seed=seed))


# ---------------------------------------------------------------------------
# baseline families
# ---------------------------------------------------------------------------

def baseline_graph(kind: str, n: int) -> Digraph:
    """Named comparison graph: star (centre 0), complete, cycle, or path."""
    if kind == "star":
        if n < 2:
            raise GraphError("star needs n >= 2")
        return Digraph(n, [(0, i) for i in range(1, n)])
    if kind == "complete":
        if n < 2:
            raise GraphError("complete graph needs n >= 2")
        iu, ju = np.triu_indices(n, k=1)
        return Digraph(n, np.stack([iu, ju], axis=1))
    if kind == "cycle":
        if n < 3:
            raise GraphError("cycle needs n >= 3")
        return Digraph(n, [(i, (i + 1) % n) for i in range(n)])
    if kind == "path":
        if n < 2:
            raise GraphError("path needs n >= 2")
        return Digraph(n, [(i, i + 1) for i in range(n - 1)])
    raise GraphError(f"unknown baseline kind {kind!r}")
