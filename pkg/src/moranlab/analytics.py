"""Closed-form bounds, vertex danger, and auxiliary birth-death chains.

Everything here is exact arithmetic or a dense linear solve on a small
chain; Monte Carlo lives in the engine. Checks against exact extinction
probabilities are hypothesis-gated: a check whose hypothesis is never met
on the given graph is reported as vacuous, never as a silent pass.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .graphs import Digraph, GraphError, is_strongly_connected
from .exact import exact_extinction

_TOL = 1e-12


# ---------------------------------------------------------------------------
# vertex danger
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DangerProfile:
    """Per-vertex danger: sum over in-neighbours u of 1/d_out(u).

    Accumulated exactly as rationals (out-degrees are small integers), so
    invariant checks like Q_v >= 1/n on strongly connected digraphs stay
    exact. ``q`` is the float view, ``q_exact`` the rationals.
    """

    q: np.ndarray
    q_exact: Tuple[Fraction, ...]

    def __getitem__(self, v: int) -> float:
        return float(self.q[v])


def danger(G: Digraph) -> DangerProfile:
    degs = G.out_degrees()
    if np.any(degs == 0):
        v = int(np.argmin(degs))
        raise GraphError(f"vertex {v} has out-degree 0; danger undefined")
    inv = [Fraction(1, int(d)) for d in degs]
    q_exact = tuple(
        sum((inv[int(u)] for u in G.in_neighbors(v)), start=Fraction(0))
        for v in range(G.n))
    return DangerProfile(q=np.array([float(x) for x in q_exact]),
                         q_exact=q_exact)


def danger_extinction_floor(G: Digraph, r: float, v: int) -> float:
    """Lower bound Q_v/(r+Q_v) on the extinction probability from {v}."""
    if not r > 0:
        raise GraphError("fitness must be positive")
    qv = danger(G).q[v]
    return float(qv / (r + qv))


# ---------------------------------------------------------------------------
# closed-form extinction bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundValue:
    name: str
    value: float
    kind: str                 # "lower" or "upper"
    asymptotic: bool          # upper bounds hold only for large branching
    note: str = ""


def theorem_bounds(n: int, m: int, r: float) -> Dict[str, BoundValue]:
    """All five closed-form extinction bounds at the given (n, m, r).

    Lower bounds hold for every strongly connected digraph (sqrt floor) or
    every connected graph (cbrt and edge-density floors). The two ceilings
    are asymptotic: they require incubators with branching factor above an
    r-dependent constant far beyond desk scale, so they are evaluated but
    must never be asserted against small instances.
    """
    if not r > 1:
        raise GraphError("bounds are stated for r > 1")
    if n < 2 or m < 1:
        raise GraphError("need n >= 2 and m >= 1")
    asym = "holds only for branching factor above an r-dependent constant"
    return {
        "digraph_sqrt_floor": BoundValue(
            "digraph_sqrt_floor", 1.0 / (5.0 * r * math.sqrt(n)), "lower", False,
            "strict floor for strongly connected digraphs"),
        "undirected_cbrt_floor": BoundValue(
            "undirected_cbrt_floor", 1.0 / (42.0 * r ** (4.0 / 3.0) * n ** (1.0 / 3.0)),
            "lower", False, "strict floor for connected graphs"),
        "edge_density_floor": BoundValue(
            "edge_density_floor", n / (288.0 * r * r * m), "lower", False,
            "floor for connected graphs with m edges"),
        "dense_incubator_ceiling": BoundValue(
            "dense_incubator_ceiling", 71.0 / (r * (r - 1.0) ** 2 * n) ** (1.0 / 3.0),
            "upper", True, asym),
        "sparse_incubator_ceiling": BoundValue(
            "sparse_incubator_ceiling", 2.0 ** 14 * r * n / ((r - 1.0) ** 2 * m),
            "upper", True, asym),
    }


@dataclass(frozen=True)
class BoundReport:
    bound_name: str
    graph_id: str
    n: int
    m: int
    r: float
    bound_value: float
    measured_value: float
    satisfied: bool
    slack: float
    note: str = ""

    def csv_row(self) -> str:
        return (f"{self.bound_name},{self.graph_id},{self.n},{self.m},{self.r},"
                f"{self.bound_value:.12g},{self.measured_value:.12g},"
                f"{int(self.satisfied)},{self.slack:.12g}")

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


BOUND_REPORT_CSV_HEADER = "bound_name,graph_id,n,m,r,bound,measured,satisfied,slack"


def _lower_bound_reports(G: Digraph, gid: str, r: float, ell: float,
                         time_report=None) -> List[BoundReport]:
    bounds = theorem_bounds(G.n, max(G.m, 1), r)
    out = []
    sqrt_floor = bounds["digraph_sqrt_floor"].value
    out.append(BoundReport("digraph_sqrt_floor", gid, G.n, G.m, r,
                           sqrt_floor, ell, ell > sqrt_floor, ell - sqrt_floor))
    if not G.directed:
        cbrt = bounds["undirected_cbrt_floor"].value
        out.append(BoundReport("undirected_cbrt_floor", gid, G.n, G.m, r,
                               cbrt, ell, ell > cbrt, ell - cbrt))
        dens = bounds["edge_density_floor"].value
        out.append(BoundReport("edge_density_floor", gid, G.n, G.m, r,
                               dens, ell, ell >= dens, ell - dens))
    if time_report is not None:
        out.append(BoundReport("absorption_time_ceiling", gid, G.n, G.m, r,
                               time_report.bound, time_report.max_expected_steps,
                               time_report.satisfied,
                               time_report.bound - time_report.max_expected_steps))
    return out


def verify_lower_bounds_exhaustive(max_n: int = 7,
                                   r_list: Sequence[float] = (1.5, 2.0, 5.0),
                                   digraph_samples: int = 0,
                                   seed: int = 0,
                                   with_time_bound: bool = False,
                                   state_cap: int = 14) -> List[BoundReport]:
    """Check the extinction floors on every small connected graph.

    Enumerates all connected undirected graphs up to ``max_n`` (one per
    isomorphism class) and, optionally, a seeded sample of strongly
    connected digraphs; solves each exactly and reports every applicable
    floor. With ``with_time_bound`` the expected-absorption-time ceiling
    r*n^4/(r-1) is reported too (reusing the same solve).
    """
    from .smallgraphs import connected_graphs, random_strongly_connected_digraphs
    from .exact import expected_time_vs_bound

    for r in r_list:
        if not r > 1:
            raise GraphError(f"floors require r > 1, got r={r}")

    reports: List[BoundReport] = []
    graphs = [(f"atlas-{i}", G) for i, G in
              enumerate(connected_graphs(2, max_n))]
    if digraph_samples:
        graphs += [(f"digraph-{i}", G) for i, G in enumerate(
            random_strongly_connected_digraphs(digraph_samples, max_n, seed))]
    for gid, G in graphs:
        for r in r_list:
            if with_time_bound:
                tb = expected_time_vs_bound(G, r, state_cap=state_cap)
            else:
                tb = None
            ell = exact_extinction(G, r, state_cap=state_cap).mean_extinction
            reports.extend(_lower_bound_reports(G, gid, r, ell, tb))
    return reports


# ---------------------------------------------------------------------------
# gambler's ruin and the auxiliary chains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GamblersRuin:
    hit_prob: float
    expected_steps_bound: Optional[float]


def gamblers_ruin(p: float, z: int, a: int) -> GamblersRuin:
    """Biased walk absorbed at 0 and a, started at z, up-probability p.

    Returns the probability of reaching a, and (for p > 1/2) the
    closed-form ceiling (a/(p-q)) * hit_prob on the expected number of
    transitions before absorption. p = 1/2 is rejected: the closed form
    divides by p - q and no caller needs the balanced case.
    """
    if not (0 < p < 1):
        raise GraphError(f"need 0 < p < 1, got p={p}")
    if p == 0.5:
        raise GraphError("p = 1/2 is excluded (balanced walk has no q/p form)")
    if a < 1 or not (0 <= z <= a):
        raise GraphError(f"need 0 <= z <= a and a >= 1, got z={z}, a={a}")
    q = 1.0 - p
    ratio = q / p
    hit = (1.0 - ratio ** z) / (1.0 - ratio ** a)
    bound = (a / (p - q)) * hit if p > 0.5 else None
    return GamblersRuin(hit_prob=float(hit), expected_steps_bound=bound)


@dataclass(frozen=True)
class BirthDeathChain:
    """Finite birth-death chain, possibly with a one-shot failure state.

    ``kind`` is one of "gambler", "hazard" (per-step failure hazard, used to
    track a fragile seed population) or "reflecting" (soft-reflecting at 0,
    forced down from the top). States are listed in ``states``; "FAIL" names
    the failure state. ``transition`` is row-stochastic to 1e-12.
    """

    kind: str
    states: Tuple
    transition: np.ndarray
    start: int                      # index into states
    params: Dict[str, float] = field(default_factory=dict)

    def index_of(self, state) -> int:
        return self.states.index(state)

    def row_sum_error(self) -> float:
        return float(np.abs(self.transition.sum(axis=1) - 1.0).max())


def _chain_params(r: float, k: int, b: int):
    from .generators import beta_of
    if not r > 1:
        raise GraphError("chains are defined for r > 1")
    if k < 1 or b < 1:
        raise GraphError("need k >= 1 and b >= 1")
    beta = beta_of(r)
    gamma = int(math.floor((k * beta) ** (1.0 / 3.0)))
    while (gamma + 1) ** 3 <= k * beta:   # guard against float cube roots
        gamma += 1
    while gamma ** 3 > k * beta:
        gamma -= 1
    r_prime = (1.0 + r) / 2.0
    return beta, gamma, r_prime


def build_chain(kind: str, r: float, k: int, b: int, z: int = 0) -> BirthDeathChain:
    """Construct the seed-growth ("hazard") or core-growth ("reflecting") chain.

    Both live on mutant counts 0..gamma(+1) with gamma = floor((k*beta)^(1/3))
    and biased up/down split r'/(1+r') vs 1/(1+r'), r' = (1+r)/2. The hazard
    chain adds an absorbing failure state reached with probability
    6/(r*sqrt(beta)*b) from 0 and 10/(r*beta*b^2) from interior states, and
    absorbs at gamma+1. The reflecting chain soft-reflects at 0 and moves
    down from gamma with probability 1.
    """
    beta, gamma, rp = _chain_params(r, k, b)
    up = rp / (1.0 + rp)
    down = 1.0 / (1.0 + rp)
    params = {"r": r, "k": k, "b": b, "beta": beta, "gamma": gamma,
              "r_prime": rp}

    if kind == "hazard":
        fail0 = 6.0 / (r * math.sqrt(beta) * b)
        faili = 10.0 / (r * beta * b * b)
        for name, val in (("fail-from-0", fail0), ("fail-from-interior", faili)):
            if not 0.0 <= val <= 1.0:
                raise GraphError(f"hazard entry {name} = {val} outside [0, 1]")
        states = ("FAIL",) + tuple(range(gamma + 2))
        ns = len(states)
        P = np.zeros((ns, ns))
        P[0, 0] = 1.0                                # FAIL absorbs
        P[1, 0] = fail0                              # state 0
        P[1, 1] = (1.0 - fail0) * down
        P[1, 2] = (1.0 - fail0) * up
        for i in range(1, gamma + 1):                # states 1..gamma
            row = i + 1
            P[row, 0] = faili
            P[row, row - 1] = (1.0 - faili) * down
            P[row, row + 1] = (1.0 - faili) * up
        P[gamma + 2, gamma + 2] = 1.0                # top absorbs
        start = 1                                    # numeric state 0
    elif kind == "reflecting":
        if not 0 <= z <= gamma:
            raise GraphError(f"start z={z} outside 0..gamma={gamma}")
        states = tuple(range(gamma + 1))
        ns = len(states)
        P = np.zeros((ns, ns))
        P[0, 0] = down
        P[0, 1] = up
        for i in range(1, gamma):
            P[i, i - 1] = down
            P[i, i + 1] = up
        P[gamma, gamma - 1] = 1.0
        start = z
    else:
        raise GraphError(f"unknown chain kind {kind!r}")

    err = np.abs(P.sum(axis=1) - 1.0).max()
    if err > _TOL:
        raise GraphError(f"row sums off by {err:.2e}")
    P.setflags(write=False)
    return BirthDeathChain(kind=kind, states=states, transition=P,
                           start=start, params=params)


@dataclass(frozen=True)
class ChainHitting:
    hit_prob: float
    expected_hits_at_0: float
    expected_time: float
    reference: Dict[str, float]


def chain_hitting_analysis(chain: BirthDeathChain, target_state) -> ChainHitting:
    """First-passage analysis of a finite chain toward a target state.

    The target is made absorbing; dense linear solves then give the exact
    probability of reaching it (rather than any other absorbing state), the
    expected number of visits to numeric state 0 before absorption
    (counting time 0), and the expected time to absorption. For the two
    named chains the matching closed-form reference bounds are attached,
    flagged with whether their branching hypothesis holds.
    """
    P = np.array(chain.transition)
    ns = P.shape[0]
    try:
        t_idx = chain.index_of(target_state)
    except ValueError:
        raise GraphError(f"target {target_state!r} not a state of the chain")
    if np.abs(P.sum(axis=1) - 1.0).max() > 1e-9:
        raise GraphError("malformed chain: rows do not sum to 1")

    P[t_idx, :] = 0.0
    P[t_idx, t_idx] = 1.0
    absorbing = np.where(np.isclose(np.diag(P), 1.0))[0]
    transient = np.setdiff1d(np.arange(ns), absorbing)

    hit = np.zeros(ns)
    hit[t_idx] = 1.0
    visits0 = np.zeros(ns)
    time = np.zeros(ns)
    if transient.size:
        Q = P[np.ix_(transient, transient)]
        A = np.eye(transient.size) - Q
        hit[transient] = np.linalg.solve(A, P[transient, t_idx])
        time[transient] = np.linalg.solve(A, np.ones(transient.size))
        zero_idx = chain.index_of(0) if 0 in chain.states else None
        if zero_idx is not None and zero_idx in transient:
            e0 = np.zeros(transient.size)
            e0[list(transient).index(zero_idx)] = 1.0
            visits0[transient] = np.linalg.solve(A, e0)
        elif zero_idx is not None:
            visits0[zero_idx] = 1.0

    s = chain.start
    ref: Dict[str, float] = {}
    p = chain.params
    if p:
        rp = p["r_prime"]
        floor_b = ((1.0 / math.log2(rp)) + 1.0) ** 3
        if chain.kind == "hazard":
            ref["hit_prob_floor"] = 1.0 - 25.0 / (
                math.sqrt(p["beta"]) * p["b"] * (p["r"] - 1.0))
            ref["hypothesis_met"] = float(p["b"] >= max(floor_b, 120.0))
        elif chain.kind == "reflecting":
            ref["visits_at_0_ceiling"] = 2.0 * rp / (rp - 1.0)
            ref["time_ceiling"] = 6.0 * math.floor(p["b"] ** (1.0 / 3.0)) * rp / (rp - 1.0)
            ref["hypothesis_met"] = float(p["b"] >= floor_b)

    return ChainHitting(hit_prob=float(hit[s]),
                        expected_hits_at_0=float(visits0[s]),
                        expected_time=float(time[s]),
                        reference=ref)


# ---------------------------------------------------------------------------
# danger-based inequality suite
# ---------------------------------------------------------------------------

@dataclass
class CheckGroup:
    name: str
    checked: int = 0
    passed: int = 0
    vacuous: bool = False
    failures: List[str] = field(default_factory=list)

    def record(self, ok: bool, desc: str) -> None:
        self.checked += 1
        if ok:
            self.passed += 1
        else:
            self.failures.append(desc)

    def finalize(self) -> None:
        self.vacuous = self.checked == 0


@dataclass
class DangerLemmaReport:
    r: float
    n: int
    groups: Dict[str, CheckGroup]

    @property
    def ok(self) -> bool:
        return all(not g.failures for g in self.groups.values())

    def summary(self) -> str:
        parts = []
        for g in self.groups.values():
            tag = "vacuous" if g.vacuous else f"{g.passed}/{g.checked}"
            parts.append(f"{g.name}={tag}")
        return " ".join(parts)


def verify_danger_lemmas(G: Digraph, r: float, state_cap: int = 14,
                         set_family: Optional[Iterable[Iterable[int]]] = None
                         ) -> DangerLemmaReport:
    """Exact check of the danger inequalities, hypothesis-gated.

    Per-vertex floor Q_v/(r+Q_v) is checked everywhere. The two-mutant
    retention bound needs ell(u) <= 1/2; the per-vertex danger ceiling
    needs ell(u) <= 1/4; the set-danger bounds need every member below
    1/4. Sets default to singletons, all pairs, and the low-extinction
    sets used by the heavy-set construction.
    """
    if not r > 0:
        raise GraphError("fitness must be positive")
    res = exact_extinction(G, r, state_cap=state_cap)
    ell = res.ell_by_state
    singles = res.per_vertex_extinction
    q = danger(G).q
    n = G.n

    groups = {name: CheckGroup(name) for name in
              ("vertex_floor", "pair_retention", "danger_ceiling",
               "set_danger_outdeg", "set_danger_mean")}

    g = groups["vertex_floor"]
    for v in range(n):
        floor = q[v] / (r + q[v])
        g.record(singles[v] >= floor - _TOL,
                 f"v={v}: ell={singles[v]:.6g} < floor={floor:.6g}")

    if r >= 1:
        g = groups["pair_retention"]
        for u in range(n):
            if singles[u] > 0.5:
                continue
            for v in G.out_neighbors(u):
                v = int(v)
                pair = ell[(1 << u) | (1 << v)]
                rhs = (1.0 - 3.0 * r / (2.0 * r + q[v])) * singles[u]
                g.record(pair >= rhs - _TOL,
                         f"u={u},v={v}: ell(uv)={pair:.6g} < {rhs:.6g}")

        g = groups["danger_ceiling"]
        if n >= 2:
            for u in range(n):
                if singles[u] > 0.25:
                    continue
                nbrs = G.out_neighbors(u)
                rhs = (4.0 * r * singles[u] / len(nbrs)) * sum(
                    r / (2.0 * r + q[int(v)]) for v in nbrs)
                g.record(q[u] <= rhs + _TOL,
                         f"u={u}: Q={q[u]:.6g} > {rhs:.6g}")

        if set_family is None:
            fam = [[v] for v in range(n)]
            fam += [[u, v] for u in range(n) for v in range(u + 1, n)]
            ell_g = res.mean_extinction
            A = [v for v in range(n) if singles[v] <= 2.0 * ell_g]
            A_prime = [v for v in A if q[v] < 32.0 * r * r * ell_g * ell_g]
            fam += [A, A_prime]
        else:
            fam = [list(S) for S in set_family]
        for S in fam:
            if not S:
                continue
            alpha = max(singles[v] for v in S)
            if alpha > 0.25:
                continue
            total_q = sum(q[v] for v in S)
            out_nbhd = set()
            for v in S:
                out_nbhd.update(int(w) for w in G.out_neighbors(v))
            rhs1 = 4.0 * r * r * alpha * len(out_nbhd)
            groups["set_danger_outdeg"].record(
                total_q <= rhs1 + _TOL,
                f"S={sorted(S)}: sumQ={total_q:.6g} > {rhs1:.6g}")
            rhs2 = 4.0 * r * r * n * alpha * res.mean_extinction
            groups["set_danger_mean"].record(
                total_q <= rhs2 + _TOL,
                f"S={sorted(S)}: sumQ={total_q:.6g} > {rhs2:.6g}")

    for g in groups.values():
        g.finalize()
    return DangerLemmaReport(r=float(r), n=n, groups=groups)


# ---------------------------------------------------------------------------
# heavy set construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeavySetReport:
    hypothesis_met: bool
    ell_g: float
    B: Tuple[int, ...]
    sum_degree: int
    sum_degree_floor: float
    min_degree: int
    min_degree_floor: float
    ok: bool


def heavy_set(G: Digraph, r: float, state_cap: int = 14) -> HeavySetReport:
    """High-total-degree neighbourhood forced by low extinction probability.

    For connected undirected G with exact mean extinction <= 1/8, takes the
    low-extinction vertices A, thins them to A' by a danger threshold, and
    returns B = N(A'). B must be nonempty with total degree at least
    n/(144 r^2 ell) and minimum degree at least 1/(32 r^2 ell^2). Above the
    1/8 threshold a hypothesis-not-met report is returned instead.
    """
    if G.directed:
        raise GraphError("heavy_set is defined for undirected graphs")
    if not is_strongly_connected(G):
        raise GraphError("graph must be connected")
    if not r > 1:
        raise GraphError("heavy_set needs r > 1")
    res = exact_extinction(G, r, state_cap=state_cap)
    ell_g = res.mean_extinction
    if ell_g > 0.125:
        return HeavySetReport(False, ell_g, (), 0, 0.0, 0, 0.0, False)
    singles = res.per_vertex_extinction
    q = danger(G).q
    A = [v for v in range(G.n) if singles[v] <= 2.0 * ell_g]
    A_prime = [v for v in A if q[v] < 32.0 * r * r * ell_g * ell_g]
    B = sorted({int(w) for v in A_prime for w in G.out_neighbors(v)})
    degs = G.out_degrees()
    sum_deg = int(sum(degs[v] for v in B))
    min_deg = int(min((degs[v] for v in B), default=0))
    sum_floor = G.n / (144.0 * r * r * ell_g)
    min_floor = 1.0 / (32.0 * r * r * ell_g * ell_g)
    ok = bool(B) and sum_deg >= sum_floor - _TOL and min_deg >= min_floor - _TOL
    return HeavySetReport(True, ell_g, tuple(B), sum_deg, sum_floor,
                          min_deg, min_floor, ok)
