"""Independent reference implementations used as test oracles.

Everything here is deliberately written from first principles, sharing no
code path with the library: brute-force transition matrices, closed-form
recurrences, and matrix-power iteration. Tests freeze expected values from
these, never from the code under test.
"""

import numpy as np


def complete_graph_extinction(n: int, r: float) -> float:
    """Birth-death recurrence for the complete graph (depends only on |X|)."""
    if r == 1.0:
        return 1.0 - 1.0 / n
    rho = (1.0 - 1.0 / r) / (1.0 - r ** -n)
    return 1.0 - rho


def neutral_undirected_per_vertex(G) -> np.ndarray:
    """r = 1 on undirected graphs: fixation from v is (1/d_v)/sum_u(1/d_u)."""
    d = G.out_degrees().astype(float)
    return 1.0 - (1.0 / d) / np.sum(1.0 / d)


def brute_moran_transition(G, r: float) -> np.ndarray:
    """Full 2^n stochastic matrix straight from the process definition."""
    n = G.n
    ns = 1 << n
    P = np.zeros((ns, ns))
    for S in range(ns):
        size = bin(S).count("1")
        W = n + (r - 1.0) * size
        for v in range(n):
            fit = r if (S >> v) & 1 else 1.0
            p_v = fit / W
            nbrs = G.out_neighbors(v)
            if len(nbrs) == 0:
                P[S, S] += p_v
                continue
            for w in nbrs:
                w = int(w)
                if (S >> v) & 1:
                    T = S | (1 << w)
                else:
                    T = S & ~(1 << w)
                P[S, T] += p_v / len(nbrs)
    return P


def brute_extinction_all_states(G, r: float) -> np.ndarray:
    """Hitting probability of the empty state by dense linear solve."""
    n = G.n
    ns = 1 << n
    P = brute_moran_transition(G, r)
    full = ns - 1
    trans = [s for s in range(ns) if s not in (0, full)]
    A = np.eye(len(trans)) - P[np.ix_(trans, trans)]
    b = P[trans, 0]
    h = np.linalg.solve(A, b)
    out = np.zeros(ns)
    out[0] = 1.0
    out[trans] = h
    return out


def brute_expected_steps_all_states(G, r: float) -> np.ndarray:
    n = G.n
    ns = 1 << n
    P = brute_moran_transition(G, r)
    full = ns - 1
    trans = [s for s in range(ns) if s not in (0, full)]
    A = np.eye(len(trans)) - P[np.ix_(trans, trans)]
    t = np.linalg.solve(A, np.ones(len(trans)))
    out = np.zeros(ns)
    out[trans] = t
    return out


def brute_gambler_hit(p: float, z: int, a: int) -> float:
    """Ruin-walk hit probability of a by absorbing-chain solve."""
    size = a + 1
    P = np.zeros((size, size))
    P[0, 0] = P[a, a] = 1.0
    for i in range(1, a):
        P[i, i + 1] = p
        P[i, i - 1] = 1.0 - p
    trans = list(range(1, a))
    if not trans:
        return 1.0 if z == a else 0.0
    A = np.eye(a - 1) - P[np.ix_(trans, trans)]
    h = np.linalg.solve(A, P[trans, a])
    full = np.zeros(size)
    full[a] = 1.0
    full[trans] = h
    return float(full[z])


def chain_hit_by_power(P: np.ndarray, start: int, target: int,
                       iters: int = 200_000) -> float:
    """Matrix-power oracle: absorb at target, iterate to stationarity."""
    Q = P.copy()
    Q[target, :] = 0.0
    Q[target, target] = 1.0
    dist = np.zeros(P.shape[0])
    dist[start] = 1.0
    step = 1
    while step < iters:
        nxt = dist @ np.linalg.matrix_power(Q, 64)
        if np.abs(nxt - dist).max() < 1e-15:
            dist = nxt
            break
        dist = nxt
        step += 64
    return float(dist[target])


def star_extinction_uniform(leaves: int, r: float) -> float:
    """Exact uniform-start extinction on a star via the (centre, count) chain.

    The star's Moran process is a function of (centre type, mutant leaf
    count) by leaf exchangeability; this builds that chain's 2(L+1) states
    explicitly and solves the hitting system.
    """
    L = leaves
    n = L + 1
    states = [(c, k) for c in (0, 1) for k in range(L + 1)]
    idx = {s: i for i, s in enumerate(states)}
    size = len(states)
    P = np.zeros((size, size))
    for (c, k) in states:
        i = idx[(c, k)]
        W = n + (r - 1.0) * (k + c)
        if c == 1 and k < L:      # mutant centre converts a non-mutant leaf
            P[i, idx[(1, k + 1)]] += (r / W) * (L - k) / L
        if c == 0 and k > 0:      # non-mutant centre converts a mutant leaf
            P[i, idx[(0, k - 1)]] += (1.0 / W) * k / L
        if c == 0 and k > 0:      # a mutant leaf converts the centre
            P[i, idx[(1, k)]] += r * k / W
        if c == 1 and k < L:      # a non-mutant leaf converts the centre
            P[i, idx[(0, k)]] += (L - k) / W
    for i in range(size):
        P[i, i] = 1.0 - P[i].sum()
    ext_state = idx[(0, 0)]
    fix_state = idx[(1, L)]
    trans = [i for i in range(size) if i not in (ext_state, fix_state)]
    A = np.eye(len(trans)) - P[np.ix_(trans, trans)]
    b = P[trans, ext_state]
    h = np.linalg.solve(A, b)
    ell = np.zeros(size)
    ell[ext_state] = 1.0
    ell[trans] = h
    # uniform start: centre with prob 1/n, a leaf with prob L/n
    return float((1.0 * ell[idx[(1, 0)]] + L * ell[idx[(0, 1)]]) / n)
