"""Exact absorption analysis of the Moran process on small graphs.

Solves the absorbing Markov chain over all 2^n mutant configurations for
extinction probabilities and expected absorption times. This is the oracle
against which simulation kernels and closed-form bounds are checked, so the
solver verifies its own residuals (<= 1e-12) after every solve.

States are subset bitmasks. From configuration S, a vertex v is chosen with
probability proportional to its fitness (r for mutants, 1 otherwise) out of
the total weight W(S) = n + (r-1)|S|, then overwrites a uniform out-neighbour
with its own type. W(S) cancels from the harmonic system for absorption
probabilities; it enters the expected-time system as the right-hand side.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graphs import Digraph, GraphError, is_strongly_connected

DEFAULT_STATE_CAP = 14
_RESIDUAL_TOL = 1e-12


class CapacityError(RuntimeError):
    """State space or enumeration budget exceeded."""


@dataclass(frozen=True)
class ExactResult:
    """Exact extinction probabilities for one (graph, fitness) pair.

    ``ell_by_state[S]`` is the extinction probability from the configuration
    whose bitmask is S; singleton and mean values are precomputed views.
    ``expected_steps_by_state`` is populated when times were requested.
    """

    r: float
    n: int
    per_vertex_extinction: np.ndarray
    mean_extinction: float
    ell_by_state: np.ndarray
    expected_steps_by_state: Optional[np.ndarray] = None

    def extinction_of(self, S: Iterable[int]) -> float:
        return float(self.ell_by_state[_mask_of(S, self.n)])

    def expected_steps_of(self, S: Iterable[int]) -> float:
        if self.expected_steps_by_state is None:
            raise ValueError("solve was run without expected times")
        return float(self.expected_steps_by_state[_mask_of(S, self.n)])

    def to_json(self) -> str:
        doc = {
            "r": self.r,
            "n": self.n,
            "extinction_by_vertex": {str(v): float(p) for v, p in
                                     enumerate(self.per_vertex_extinction)},
            "mean_extinction": self.mean_extinction,
        }
        return json.dumps(doc, sort_keys=True)


def _mask_of(S: Iterable[int], n: int) -> int:
    mask = 0
    for v in S:
        v = int(v)
        if v < 0 or v >= n:
            raise GraphError(f"vertex {v} out of range")
        mask |= 1 << v
    return mask


def _rate_entries(G: Digraph, r: float):
    """COO entries of the state-change rate matrix R (W(S) factored out).

    R[S, S'] sums fitness(u)/d_out(u) over vertices u whose spawn moves S
    to S' != S. No-op events never appear; they cancel from both systems.
    """
    n = G.n
    ns = 1 << n
    states = np.arange(ns, dtype=np.int64)
    rows, cols, vals = [], [], []
    inv_deg = 1.0 / np.maximum(np.diff(G.out_ptr), 1)
    for u in range(n):
        bit_u = 1 << u
        for w in G.out_neighbors(u):
            w = int(w)
            bit_w = 1 << w
            u_in = (states & bit_u) != 0
            w_in = (states & bit_w) != 0
            gain = u_in & ~w_in           # mutant u spawns onto w
            rows.append(states[gain])
            cols.append(states[gain] | bit_w)
            vals.append(np.full(gain.sum(), r * inv_deg[u]))
            loss = ~u_in & w_in           # non-mutant u spawns onto w
            rows.append(states[loss])
            cols.append(states[loss] & ~bit_w)
            vals.append(np.full(loss.sum(), inv_deg[u]))
    return (np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), ns)


def _solve_checked(A, b, dense: bool):
    if dense:
        Ad = A.toarray() if sp.issparse(A) else A
        x = np.linalg.solve(Ad, b)
        resid = np.abs(Ad @ x - b).max()
        if resid > _RESIDUAL_TOL:
            x += np.linalg.solve(Ad, b - Ad @ x)
            resid = np.abs(Ad @ x - b).max()
    else:
        lu = spla.splu(sp.csc_matrix(A))
        x = lu.solve(b)
        resid = np.abs(A @ x - b).max()
        if resid > _RESIDUAL_TOL:
            x += lu.solve(b - A @ x)
            resid = np.abs(A @ x - b).max()
    scale = max(1.0, np.abs(b).max())
    if resid > _RESIDUAL_TOL * scale:
        raise RuntimeError(f"linear solve residual {resid:.3e} above tolerance")
    return x


def _absorption_solve(G: Digraph, r: float, state_cap: int, with_times: bool):
    n = G.n
    if n > state_cap:
        raise CapacityError(
            f"n={n} exceeds state cap {state_cap} (2^n states needed)")
    if not is_strongly_connected(G):
        raise GraphError("exact solver requires a strongly connected graph")
    if not (r > 0) or not math.isfinite(r):
        raise GraphError(f"fitness must be finite and positive, got r={r}")

    rows, cols, vals, ns = _rate_entries(G, r)
    full = ns - 1
    # M = D - R with D the off-diagonal rowsum: harmonic system M f = 0.
    diag = np.bincount(rows, weights=vals, minlength=ns)
    M = sp.coo_matrix(
        (np.concatenate([-vals, diag]),
         (np.concatenate([rows, np.arange(ns)]),
          np.concatenate([cols, np.arange(ns)]))),
        shape=(ns, ns)).tocsr()

    transient = np.arange(1, full)  # every state except empty and full
    A = M[transient][:, transient]
    dense = n <= 10

    # extinction: f(empty)=1, f(full)=0
    b_ext = -np.asarray(M[transient][:, 0].todense()).ravel()
    ell_t = _solve_checked(A, b_ext, dense)
    ell = np.empty(ns)
    ell[0] = 1.0
    ell[full] = 0.0
    ell[transient] = ell_t

    times = None
    if with_times:
        sizes = np.bitwise_count(np.arange(ns, dtype=np.uint64)).astype(float)
        w_of = n + (r - 1.0) * sizes
        t_t = _solve_checked(A, w_of[transient], dense)
        times = np.empty(ns)
        times[0] = times[full] = 0.0
        times[transient] = t_t
    return ell, times


def exact_extinction(G: Digraph, r: float,
                     state_cap: int = DEFAULT_STATE_CAP,
                     with_times: bool = False) -> ExactResult:
    """Exact extinction probabilities from every configuration.

    Returns the full 2^n state vector plus the singleton values and their
    mean (the uniform-single-mutant extinction probability).
    """
    ell, times = _absorption_solve(G, r, state_cap, with_times)
    singles = np.array([ell[1 << v] for v in range(G.n)])
    return ExactResult(
        r=float(r), n=G.n,
        per_vertex_extinction=singles,
        mean_extinction=float(singles.mean()),
        ell_by_state=ell,
        expected_steps_by_state=times,
    )


def exact_extinction_from_set(G: Digraph, r: float, S: Iterable[int],
                              state_cap: int = DEFAULT_STATE_CAP):
    """Extinction probability and exact expected absorption steps from S."""
    res = exact_extinction(G, r, state_cap=state_cap, with_times=True)
    return res.extinction_of(S), res.expected_steps_of(S)


@dataclass(frozen=True)
class TimeBoundReport:
    r: float
    n: int
    max_expected_steps: float
    argmax_state: int
    bound: float
    satisfied: bool


def expected_time_vs_bound(G: Digraph, r: float,
                           state_cap: int = DEFAULT_STATE_CAP) -> TimeBoundReport:
    """Worst-case expected absorption time against the r*n^4/(r-1) ceiling."""
    if not r > 1:
        raise GraphError("the absorption-time ceiling needs r > 1")
    res = exact_extinction(G, r, state_cap=state_cap, with_times=True)
    times = res.expected_steps_by_state
    argmax = int(np.argmax(times))
    worst = float(times[argmax])
    bound = r * G.n ** 4 / (r - 1.0)
    return TimeBoundReport(r=float(r), n=G.n, max_expected_steps=worst,
                           argmax_state=argmax, bound=bound,
                           satisfied=worst <= bound)


@dataclass(frozen=True)
class MonotonicityReport:
    ok: bool
    r_low: float
    r_high: float
    ell_low: float
    ell_high: float


def monotonicity_check(G: Digraph, r_low: float, r_high: float,
                       state_cap: int = DEFAULT_STATE_CAP,
                       tol: float = 1e-10) -> MonotonicityReport:
    """Extinction probability must not increase with fitness."""
    if not (0 < r_low <= r_high):
        raise GraphError("need 0 < r_low <= r_high")
    lo = exact_extinction(G, r_low, state_cap=state_cap).mean_extinction
    hi = exact_extinction(G, r_high, state_cap=state_cap).mean_extinction
    return MonotonicityReport(ok=hi <= lo + tol, r_low=float(r_low),
                              r_high=float(r_high), ell_low=lo, ell_high=hi)
