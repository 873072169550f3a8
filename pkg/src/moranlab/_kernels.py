"""Compiled simulation kernels.

Two kernels with identical absorption law:

* naive — one fitness-weighted spawn per step, no-ops included, O(1)/step.
* effective — samples only state-changing events (the embedded jump chain
  conditioned on change), maintaining the frontier of differing adjacent
  ordered pairs incrementally.

The effective kernel splits frontier pairs by their *target*. A small set of
high-in-degree "hub" vertices keeps its incoming pairs aggregated in typed,
degree-bucketed partitions of in-neighbour arcs: flipping a hub reinterprets
its partition in O(1) instead of touching every in-neighbour. That is what
makes star-like graphs fast, where the centre flips on almost every event.
Pairs aimed at ordinary ("small") vertices are counted per spawner in
``a_small``, updated in O(in-degree of the flipped vertex) per event.

Weight bookkeeping: exact integer pair count F decides absorption; float
totals are recomputed over compact active structures every event (active
spawners, hub buckets), so rounding drift can neither corrupt termination
nor accumulate into the sampled distribution. Spawner choice inside a hub
bucket uses rejection against the bucket's max 1/d_out, with acceptance
at least 1/2 by construction (buckets group powers of two of d_out).

Randomness: SplitMix64 streams keyed by (master_seed, replicate_index), so
replicate trajectories are independent of execution order and parallelism.
"""

import numpy as np
from numba import njit

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_KEY1 = U64(0xD1342543DE82EF95)
_KEY2 = U64(0xA0761D6478BD642F)
_INV53 = 1.0 / 9007199254740992.0

RESULT_EXTINCTION = 0
RESULT_FIXATION = 1
RESULT_CENSORED = 2
RESULT_AUDIT_FAILED = 3


@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@njit(cache=True, inline="always")
def _stream_init(master_seed, replicate):
    return _mix(U64(master_seed) * _KEY1 ^ (U64(replicate) + U64(1)) * _KEY2)


@njit(cache=True, inline="always")
def _next_double(state):
    state = state + _GOLDEN
    z = _mix(state)
    return (z >> U64(11)) * _INV53, state


@njit(cache=True, inline="always")
def _rand_below(state, k):
    u, state = _next_double(state)
    i = int(u * k)
    if i >= k:
        i = k - 1
    return i, state


# ---------------------------------------------------------------------------
# naive kernel
# ---------------------------------------------------------------------------

@njit(cache=True)
def _naive_single(out_ptr, out_idx, r, step_cap, state,
                  typ, mut, non, pos, j,
                  v3_mask, v3_target, track_v3, cur_v3):
    n = typ.shape[0]
    steps = 0
    eff = 0
    max_v3 = cur_v3
    hit = track_v3 and v3_target >= 0 and cur_v3 >= v3_target
    while 0 < j < n and steps < step_cap:
        steps += 1
        w_tot = n + (r - 1.0) * j
        u, state = _next_double(state)
        if u * w_tot < r * j:
            i, state = _rand_below(state, j)
            v = mut[i]
            tv = np.uint8(1)
        else:
            i, state = _rand_below(state, n - j)
            v = non[i]
            tv = np.uint8(0)
        d = out_ptr[v + 1] - out_ptr[v]
        if d == 0:
            continue
        i, state = _rand_below(state, d)
        w = out_idx[out_ptr[v] + i]
        if typ[w] == tv:
            continue
        eff += 1
        if tv == 1:
            idx = pos[w]
            last = non[n - j - 1]
            non[idx] = last
            pos[last] = idx
            mut[j] = w
            pos[w] = j
            j += 1
        else:
            idx = pos[w]
            last = mut[j - 1]
            mut[idx] = last
            pos[last] = idx
            non[n - j] = w
            pos[w] = n - j
            j -= 1
        typ[w] = tv
        if track_v3 and v3_mask[w]:
            cur_v3 += 1 if tv == 1 else -1
            if cur_v3 > max_v3:
                max_v3 = cur_v3
            if v3_target >= 0 and cur_v3 >= v3_target:
                hit = True
    if j == 0:
        code = RESULT_EXTINCTION
    elif j == n:
        code = RESULT_FIXATION
    else:
        code = RESULT_CENSORED
    return code, steps, eff, max_v3, hit, state


@njit(cache=True)
def _naive_init(init_mask, typ, mut, non, pos):
    n = typ.shape[0]
    j = 0
    k = 0
    for v in range(n):
        if init_mask[v]:
            typ[v] = 1
            mut[j] = v
            pos[v] = j
            j += 1
        else:
            typ[v] = 0
            non[k] = v
            pos[v] = k
            k += 1
    return j


@njit(cache=True)
def naive_run(out_ptr, out_idx, r, init_mask, master_seed, replicate,
              step_cap, v3_mask, v3_target, track_v3):
    n = init_mask.shape[0]
    typ = np.empty(n, np.uint8)
    mut = np.empty(n, np.int64)
    non = np.empty(n, np.int64)
    pos = np.empty(n, np.int64)
    j = _naive_init(init_mask, typ, mut, non, pos)
    cur_v3 = 0
    if track_v3:
        for v in range(n):
            if init_mask[v] and v3_mask[v]:
                cur_v3 += 1
    state = _stream_init(master_seed, replicate)
    code, steps, eff, max_v3, hit, state = _naive_single(
        out_ptr, out_idx, r, step_cap, state, typ, mut, non, pos, j,
        v3_mask, v3_target, track_v3, cur_v3)
    return code, steps, eff, max_v3, hit


@njit(cache=True)
def naive_estimate(out_ptr, out_idx, r, init_mask, uniform_init,
                   replicates, master_seed, step_cap):
    n = out_ptr.shape[0] - 1
    typ = np.empty(n, np.uint8)
    mut = np.empty(n, np.int64)
    non = np.empty(n, np.int64)
    pos = np.empty(n, np.int64)
    my_mask = np.zeros(n, np.uint8)
    dummy_v3 = np.zeros(1, np.uint8)
    extinct = 0
    fixed = 0
    censored = 0
    for rep in range(replicates):
        state = _stream_init(master_seed, rep)
        if uniform_init:
            v0, state = _rand_below(state, n)
            for v in range(n):
                my_mask[v] = 0
            my_mask[v0] = 1
            j = _naive_init(my_mask, typ, mut, non, pos)
        else:
            j = _naive_init(init_mask, typ, mut, non, pos)
        code, steps, eff, mv, hi, state = _naive_single(
            out_ptr, out_idx, r, step_cap, state, typ, mut, non, pos, j,
            dummy_v3, -1, False, 0)
        if code == RESULT_EXTINCTION:
            extinct += 1
        elif code == RESULT_FIXATION:
            fixed += 1
        else:
            censored += 1
    return extinct, fixed, censored


# ---------------------------------------------------------------------------
# effective kernel
# ---------------------------------------------------------------------------
#
# Static prep arrays (built in engine._effective_prep):
#   out_ptr/out_idx, invd[v] = 1/d_out   adjacency
#   is_hub[v]        hub membership (uint8)
#   hub_of[v]        hub slot index, -1 if small
#   hub_vert[hi]     vertex of hub slot hi
#   nsmall_out[v]    number of small out-neighbours of v
#   hb_ptr[hi]       bucket range of hub hi: buckets hb_ptr[hi]..hb_ptr[hi+1]
#   bkt_ptr[bb]      arc-slot range of bucket bb
#   bkt_invmax[bb]   max invd over the bucket's spawners
#   arc_src[arc]     spawner of in-arc `arc` (arcs are numbered by their
#                    initial slot; slot_arc permutes them dynamically)
#   arc_tgt[arc]     hub vertex the arc points at
#   arc_bkt[arc]     bucket of the arc
#   aptr/aidx        per-spawner list of its hub-arc ids
#   inn_ptr/inn_idx  in-neighbours, only for small targets (hub rows empty)
#
# Dynamic state per replicate: typ, a_small, active spawner list (act/apos),
#   per-bucket mutant spawner counts cmb and mutant invd sums smb,
#   slot_arc/arc_slot permutation (mutant arcs first within each bucket),
#   exact frontier pair count F, mutant count j.


@njit(cache=True)
def _eff_flip(w, typ, a_small, invd,
              is_hub, hub_of, hub_vert, nsmall_out,
              hb_ptr, bkt_ptr, cmb, smb,
              arc_src, arc_tgt, arc_bkt, slot_arc, arc_slot, aptr, aidx,
              inn_ptr, inn_idx,
              act, apos, act_cnt, F, j):
    oldt = typ[w]

    if is_hub[w] == 1:
        # incoming pairs flip differing-status wholesale: O(#buckets)
        hi = hub_of[w]
        for bb in range(hb_ptr[hi], hb_ptr[hi + 1]):
            sz = bkt_ptr[bb + 1] - bkt_ptr[bb]
            if oldt == 1:
                F += 2 * cmb[bb] - sz
            else:
                F += sz - 2 * cmb[bb]
    else:
        for t in range(inn_ptr[w], inn_ptr[w + 1]):
            x = inn_idx[t]
            if typ[x] == oldt:
                a_small[x] += 1
                F += 1
                if a_small[x] == 1:
                    act[act_cnt] = x
                    apos[x] = act_cnt
                    act_cnt += 1
            else:
                a_small[x] -= 1
                F -= 1
                if a_small[x] == 0:
                    idx = apos[x]
                    last = act[act_cnt - 1]
                    act[idx] = last
                    apos[last] = idx
                    apos[x] = -1
                    act_cnt -= 1

    # outgoing pairs at small targets: complement
    asw = a_small[w]
    nsw = nsmall_out[w] - asw
    a_small[w] = nsw
    F += nsw - asw
    if asw == 0 and nsw > 0:
        act[act_cnt] = w
        apos[w] = act_cnt
        act_cnt += 1
    elif asw > 0 and nsw == 0:
        idx = apos[w]
        last = act[act_cnt - 1]
        act[idx] = last
        apos[last] = idx
        apos[w] = -1
        act_cnt -= 1

    # outgoing pairs at hub targets: move w's arcs between typed sections
    for t in range(aptr[w], aptr[w + 1]):
        arc = aidx[t]
        bb = arc_bkt[arc]
        s = arc_slot[arc]
        if oldt == 0:
            tgt = bkt_ptr[bb] + cmb[bb]
            cmb[bb] += 1
            smb[bb] += invd[w]
        else:
            tgt = bkt_ptr[bb] + cmb[bb] - 1
            cmb[bb] -= 1
            smb[bb] -= invd[w]
        other = slot_arc[tgt]
        slot_arc[tgt] = arc
        slot_arc[s] = other
        arc_slot[arc] = tgt
        arc_slot[other] = s
        F += 1 if typ[arc_tgt[arc]] == oldt else -1

    typ[w] = np.uint8(1 - oldt)
    j += 1 if oldt == 0 else -1
    return act_cnt, F, j


@njit(cache=True)
def _eff_reset(typ, a_small, apos, hint, cmb, smb, slot_arc, arc_slot):
    for v in range(typ.shape[0]):
        typ[v] = 0
        a_small[v] = 0
        apos[v] = -1
        hint[v] = -1
    for b in range(cmb.shape[0]):
        cmb[b] = 0
        smb[b] = 0.0
    for s in range(slot_arc.shape[0]):
        slot_arc[s] = s
        arc_slot[s] = s


@njit(cache=True)
def _eff_audit(typ, a_small, invd, is_hub, hub_vert, hb_ptr, bkt_ptr,
               cmb, smb, slot_arc, arc_src, out_ptr, out_idx, F):
    """Recompute all dynamic bookkeeping from scratch; True iff consistent."""
    n = typ.shape[0]
    f_chk = 0
    for v in range(n):
        a_chk = 0
        for t in range(out_ptr[v], out_ptr[v + 1]):
            w = out_idx[t]
            if typ[w] != typ[v]:
                f_chk += 1
                if is_hub[w] == 0:
                    a_chk += 1
        if a_chk != a_small[v]:
            return False
    if f_chk != F:
        return False
    for hi in range(hub_vert.shape[0]):
        for bb in range(hb_ptr[hi], hb_ptr[hi + 1]):
            c_chk = 0
            s_chk = 0.0
            for s in range(bkt_ptr[bb], bkt_ptr[bb + 1]):
                u = arc_src[slot_arc[s]]
                if typ[u] == 1:
                    c_chk += 1
                    s_chk += invd[u]
                    if s - bkt_ptr[bb] >= cmb[bb]:
                        return False      # mutant arc outside mutant prefix
            if c_chk != cmb[bb]:
                return False
            if abs(s_chk - smb[bb]) > 1e-6:
                return False
    return True


@njit(cache=True, inline="always")
def _bucket_weight(bb, head_is_mut, r, bkt_ptr, bkt_sall, cmb, smb):
    """Weight of the differing section of one bucket (clamped at 0)."""
    if head_is_mut == 1:
        sz = bkt_ptr[bb + 1] - bkt_ptr[bb]
        if sz == cmb[bb]:
            return 0.0
        wgt = bkt_sall[bb] - smb[bb]        # non-mutant spawners, fitness 1
    else:
        if cmb[bb] == 0:
            return 0.0
        wgt = r * smb[bb]                   # mutant spawners, fitness r
    return wgt if wgt > 0.0 else 0.0


@njit(cache=True)
def _eff_totals(r, typ, a_small, invd, act, act_cnt,
                hub_vert, hb_ptr, bkt_ptr, bkt_sall, cmb, smb):
    """Exact recomputation of the running weight totals (cold path)."""
    small_tot = 0.0
    maxw = 0.0
    for t in range(act_cnt):
        u = act[t]
        f = r if typ[u] == 1 else 1.0
        wg = f * a_small[u] * invd[u]
        small_tot += wg
        if wg > maxw:
            maxw = wg
    hub_tot = 0.0
    for hi in range(hub_vert.shape[0]):
        th = typ[hub_vert[hi]]
        for bb in range(hb_ptr[hi], hb_ptr[hi + 1]):
            hub_tot += _bucket_weight(bb, th, r, bkt_ptr, bkt_sall, cmb, smb)
    return small_tot, maxw, hub_tot


@njit(cache=True)
def _eff_single(r, step_cap, state,
                out_ptr, out_idx, invd,
                is_hub, hub_of, hub_vert, nsmall_out,
                hb_ptr, bkt_ptr, bkt_sall, bkt_invmax,
                arc_src, arc_tgt, arc_bkt, aptr, aidx, inn_ptr, inn_idx,
                typ, a_small, act, apos, cmb, smb, slot_arc, arc_slot, hint,
                act_cnt, F, j,
                v3_mask, v3_target, track_v3, cur_v3):
    # Hot loop. The flip bookkeeping is written out inline: routing it
    # through a helper costs ~8x (numba keeps the call, spilling every array
    # struct each event). _eff_flip is the reference twin used on cold paths
    # and _eff_audit cross-checks both in tests.
    #
    # Weight totals (small_tot, hub_tot) and the active-weight ceiling maxw
    # are maintained incrementally and rebuilt exactly on entry, every 2^20
    # events, and whenever a selection pass comes up empty. maxw only ever
    # overestimates between rebuilds, which keeps rejection sampling exact.
    n = typ.shape[0]
    nhubs = hub_vert.shape[0]
    eff = 0
    max_v3 = cur_v3
    hit = track_v3 and v3_target >= 0 and cur_v3 >= v3_target
    small_tot, maxw, hub_tot = _eff_totals(
        r, typ, a_small, invd, act, act_cnt,
        hub_vert, hb_ptr, bkt_ptr, bkt_sall, cmb, smb)
    since_rebuild = 0
    while F > 0 and eff < step_cap:
        since_rebuild += 1
        if since_rebuild >= 1048576:
            small_tot, maxw, hub_tot = _eff_totals(
                r, typ, a_small, invd, act, act_cnt,
                hub_vert, hb_ptr, bkt_ptr, bkt_sall, cmb, smb)
            since_rebuild = 0
        st = small_tot if (small_tot > 0.0 and act_cnt > 0) else 0.0
        ht = hub_tot if hub_tot > 0.0 else 0.0
        if st + ht <= 0.0:
            small_tot, maxw, hub_tot = _eff_totals(
                r, typ, a_small, invd, act, act_cnt,
                hub_vert, hb_ptr, bkt_ptr, bkt_sall, cmb, smb)
            since_rebuild = 0
            st = small_tot if (small_tot > 0.0 and act_cnt > 0) else 0.0
            ht = hub_tot if hub_tot > 0.0 else 0.0
            if st + ht <= 0.0:
                break
        u01, state = _next_double(state)
        x = u01 * (st + ht)
        w = -1
        if x < st or ht <= 0.0:
            # spawner ~ weight among active vertices: rejection against
            # maxw, falling back to an exact scan (which also refreshes
            # the running values)
            sel = -1
            for _trial in range(64):
                t, state = _rand_below(state, act_cnt)
                u = act[t]
                f = r if typ[u] == 1 else 1.0
                wg = f * a_small[u] * invd[u]
                uu, state = _next_double(state)
                if uu * maxw <= wg:
                    sel = u
                    break
            if sel < 0:
                st2 = 0.0
                mx2 = 0.0
                for t in range(act_cnt):
                    u = act[t]
                    f = r if typ[u] == 1 else 1.0
                    wg = f * a_small[u] * invd[u]
                    st2 += wg
                    if wg > mx2:
                        mx2 = wg
                small_tot = st2
                maxw = mx2
                since_rebuild = 0
                u2, state = _next_double(state)
                x2 = u2 * st2
                acc = 0.0
                sel = act[act_cnt - 1]
                for t in range(act_cnt):
                    u = act[t]
                    f = r if typ[u] == 1 else 1.0
                    acc += f * a_small[u] * invd[u]
                    if x2 < acc:
                        sel = u
                        break
            # target: unique differing small out-neighbour via hint, else scan
            if a_small[sel] == 1:
                hcand = hint[sel]
                if hcand >= 0 and is_hub[hcand] == 0 and typ[hcand] != typ[sel]:
                    w = hcand
            if w < 0:
                iw, state = _rand_below(state, a_small[sel])
                cnt = 0
                for t in range(out_ptr[sel], out_ptr[sel + 1]):
                    wv = out_idx[t]
                    if is_hub[wv] == 0 and typ[wv] != typ[sel]:
                        if cnt == iw:
                            w = wv
                            break
                        cnt += 1
        else:
            x -= st
            acc = 0.0
            sel_bb = -1
            sel_h = -1
            done = False
            for hi in range(nhubs):
                th = typ[hub_vert[hi]]
                for bb in range(hb_ptr[hi], hb_ptr[hi + 1]):
                    wb = _bucket_weight(bb, th, r, bkt_ptr, bkt_sall,
                                        cmb, smb)
                    if wb > 0.0:
                        sel_bb = bb
                        sel_h = hub_vert[hi]
                        acc += wb
                        if x < acc:
                            done = True
                            break
                if done:
                    break
            if sel_bb < 0:
                small_tot, maxw, hub_tot = _eff_totals(
                    r, typ, a_small, invd, act, act_cnt,
                    hub_vert, hb_ptr, bkt_ptr, bkt_sall, cmb, smb)
                since_rebuild = 0
                continue
            if typ[sel_h] == 1:
                lo = bkt_ptr[sel_bb] + cmb[sel_bb]
                hi_s = bkt_ptr[sel_bb + 1]
            else:
                lo = bkt_ptr[sel_bb]
                hi_s = bkt_ptr[sel_bb] + cmb[sel_bb]
            span = hi_s - lo
            while True:
                i, state = _rand_below(state, span)
                u_cand = arc_src[slot_arc[lo + i]]
                uu, state = _next_double(state)
                if uu * bkt_invmax[sel_bb] <= invd[u_cand]:
                    break
            w = sel_h
        # --- flip w (keep in sync with _eff_flip) ---
        oldt = typ[w]
        if is_hub[w] == 1:
            hi2 = hub_of[w]
            for bb in range(hb_ptr[hi2], hb_ptr[hi2 + 1]):
                sz = bkt_ptr[bb + 1] - bkt_ptr[bb]
                if oldt == 1:
                    F += 2 * cmb[bb] - sz
                else:
                    F += sz - 2 * cmb[bb]
                hub_tot += _bucket_weight(bb, 1 - oldt, r, bkt_ptr,
                                          bkt_sall, cmb, smb) \
                    - _bucket_weight(bb, oldt, r, bkt_ptr, bkt_sall,
                                     cmb, smb)
        else:
            for t in range(inn_ptr[w], inn_ptr[w + 1]):
                xx = inn_idx[t]
                fx = r if typ[xx] == 1 else 1.0
                if typ[xx] == oldt:
                    a_small[xx] += 1
                    F += 1
                    small_tot += fx * invd[xx]
                    wg = fx * a_small[xx] * invd[xx]
                    if wg > maxw:
                        maxw = wg
                    hint[xx] = w
                    if a_small[xx] == 1:
                        act[act_cnt] = xx
                        apos[xx] = act_cnt
                        act_cnt += 1
                else:
                    a_small[xx] -= 1
                    F -= 1
                    small_tot -= fx * invd[xx]
                    if a_small[xx] == 0:
                        idx = apos[xx]
                        last = act[act_cnt - 1]
                        act[idx] = last
                        apos[last] = idx
                        apos[xx] = -1
                        act_cnt -= 1
        asw = a_small[w]
        nsw = nsmall_out[w] - asw
        a_small[w] = nsw
        F += nsw - asw
        f_old = r if oldt == 1 else 1.0
        f_new = r if oldt == 0 else 1.0
        wg_new = f_new * nsw * invd[w]
        small_tot += wg_new - f_old * asw * invd[w]
        if wg_new > maxw:
            maxw = wg_new
        if asw == 0 and nsw > 0:
            act[act_cnt] = w
            apos[w] = act_cnt
            act_cnt += 1
        elif asw > 0 and nsw == 0:
            idx = apos[w]
            last = act[act_cnt - 1]
            act[idx] = last
            apos[last] = idx
            apos[w] = -1
            act_cnt -= 1
        for t in range(aptr[w], aptr[w + 1]):
            arc = aidx[t]
            bb = arc_bkt[arc]
            s2 = arc_slot[arc]
            th = typ[arc_tgt[arc]]
            hub_tot -= _bucket_weight(bb, th, r, bkt_ptr, bkt_sall, cmb, smb)
            if oldt == 0:
                tgt = bkt_ptr[bb] + cmb[bb]
                cmb[bb] += 1
                smb[bb] += invd[w]
            else:
                tgt = bkt_ptr[bb] + cmb[bb] - 1
                cmb[bb] -= 1
                smb[bb] -= invd[w]
            other = slot_arc[tgt]
            slot_arc[tgt] = arc
            slot_arc[s2] = other
            arc_slot[arc] = tgt
            arc_slot[other] = s2
            hub_tot += _bucket_weight(bb, th, r, bkt_ptr, bkt_sall, cmb, smb)
            F += 1 if th == oldt else -1
        typ[w] = np.uint8(1 - oldt)
        j += 1 if oldt == 0 else -1
        eff += 1
        if track_v3 and v3_mask[w]:
            cur_v3 += 1 if typ[w] == 1 else -1
            if cur_v3 > max_v3:
                max_v3 = cur_v3
            if v3_target >= 0 and cur_v3 >= v3_target:
                hit = True
    if j == 0:
        code = RESULT_EXTINCTION
    elif j == n:
        code = RESULT_FIXATION
    else:
        code = RESULT_CENSORED
    return code, eff, max_v3, hit, state, act_cnt, F, j


@njit(cache=True)
def _eff_single_audited(r, step_cap, state,
                        out_ptr, out_idx, invd,
                        is_hub, hub_of, hub_vert, nsmall_out,
                        hb_ptr, bkt_ptr, bkt_sall, bkt_invmax,
                        arc_src, arc_tgt, arc_bkt, aptr, aidx,
                        inn_ptr, inn_idx,
                        typ, a_small, act, apos, cmb, smb,
                        slot_arc, arc_slot, hint, act_cnt, F, j,
                        v3_mask, v3_target, track_v3, cur_v3):
    """Test hook: one event at a time, full bookkeeping audit after each."""
    eff = 0
    max_v3 = cur_v3
    hit = track_v3 and v3_target >= 0 and cur_v3 >= v3_target
    while F > 0 and eff < step_cap:
        code, de, mv, h1, state, act_cnt, F, j = _eff_single(
            r, 1, state, out_ptr, out_idx, invd,
            is_hub, hub_of, hub_vert, nsmall_out,
            hb_ptr, bkt_ptr, bkt_sall, bkt_invmax,
            arc_src, arc_tgt, arc_bkt, aptr, aidx, inn_ptr, inn_idx,
            typ, a_small, act, apos, cmb, smb, slot_arc, arc_slot, hint,
            act_cnt, F, j, v3_mask, v3_target, track_v3, cur_v3)
        eff += de
        if track_v3:
            cur_v3 = 0
            for v in range(typ.shape[0]):
                if typ[v] == 1 and v3_mask[v] == 1:
                    cur_v3 += 1
            if cur_v3 > max_v3:
                max_v3 = cur_v3
            if v3_target >= 0 and cur_v3 >= v3_target:
                hit = True
        if not _eff_audit(typ, a_small, invd, is_hub, hub_vert, hb_ptr,
                          bkt_ptr, cmb, smb, slot_arc, arc_src,
                          out_ptr, out_idx, F):
            return RESULT_AUDIT_FAILED, eff, max_v3, hit, state, \
                act_cnt, F, j
    n = typ.shape[0]
    if j == 0:
        code = RESULT_EXTINCTION
    elif j == n:
        code = RESULT_FIXATION
    else:
        code = RESULT_CENSORED
    return code, eff, max_v3, hit, state, act_cnt, F, j


@njit(cache=True)
def _eff_seed_initial(init_list, typ, a_small, invd, is_hub, hub_of,
                      hub_vert, nsmall_out, hb_ptr, bkt_ptr, cmb, smb,
                      arc_src, arc_tgt, arc_bkt, slot_arc, arc_slot,
                      aptr, aidx, inn_ptr, inn_idx, act, apos):
    act_cnt = 0
    F = 0
    j = 0
    for i in range(init_list.shape[0]):
        act_cnt, F, j = _eff_flip(
            init_list[i], typ, a_small, invd, is_hub, hub_of, hub_vert,
            nsmall_out, hb_ptr, bkt_ptr, cmb, smb, arc_src, arc_tgt,
            arc_bkt, slot_arc, arc_slot, aptr, aidx, inn_ptr, inn_idx,
            act, apos, act_cnt, F, j)
    return act_cnt, F, j


@njit(cache=True)
def effective_run(r, init_list, master_seed, replicate, step_cap,
                  out_ptr, out_idx, invd, is_hub, hub_of, hub_vert,
                  nsmall_out, hb_ptr, bkt_ptr, bkt_sall, bkt_invmax,
                  arc_src, arc_tgt, arc_bkt, aptr, aidx, inn_ptr, inn_idx,
                  v3_mask, v3_target, track_v3, audit):
    n = invd.shape[0]
    typ = np.empty(n, np.uint8)
    a_small = np.empty(n, np.int64)
    act = np.empty(n + 1, np.int64)
    apos = np.empty(n, np.int64)
    cmb = np.empty(bkt_ptr.shape[0] - 1, np.int64)
    smb = np.empty(bkt_ptr.shape[0] - 1, np.float64)
    slot_arc = np.empty(arc_src.shape[0], np.int64)
    arc_slot = np.empty(arc_src.shape[0], np.int64)
    hint = np.empty(n, np.int64)
    _eff_reset(typ, a_small, apos, hint, cmb, smb, slot_arc, arc_slot)
    act_cnt, F, j = _eff_seed_initial(
        init_list, typ, a_small, invd, is_hub, hub_of, hub_vert, nsmall_out,
        hb_ptr, bkt_ptr, cmb, smb, arc_src, arc_tgt, arc_bkt,
        slot_arc, arc_slot, aptr, aidx, inn_ptr, inn_idx, act, apos)
    cur_v3 = 0
    if track_v3:
        for i in range(init_list.shape[0]):
            if v3_mask[init_list[i]]:
                cur_v3 += 1
    state = _stream_init(master_seed, replicate)
    if audit:
        code, eff, max_v3, hit, state, act_cnt, F, j = _eff_single_audited(
            r, step_cap, state, out_ptr, out_idx, invd,
            is_hub, hub_of, hub_vert, nsmall_out,
            hb_ptr, bkt_ptr, bkt_sall, bkt_invmax,
            arc_src, arc_tgt, arc_bkt, aptr, aidx, inn_ptr, inn_idx,
            typ, a_small, act, apos, cmb, smb, slot_arc, arc_slot, hint,
            act_cnt, F, j, v3_mask, v3_target, track_v3, cur_v3)
    else:
        code, eff, max_v3, hit, state, act_cnt, F, j = _eff_single(
            r, step_cap, state, out_ptr, out_idx, invd,
            is_hub, hub_of, hub_vert, nsmall_out,
            hb_ptr, bkt_ptr, bkt_sall, bkt_invmax,
            arc_src, arc_tgt, arc_bkt, aptr, aidx, inn_ptr, inn_idx,
            typ, a_small, act, apos, cmb, smb, slot_arc, arc_slot, hint,
            act_cnt, F, j, v3_mask, v3_target, track_v3, cur_v3)
    return code, eff, max_v3, hit


@njit(cache=True)
def effective_estimate(r, init_list, uniform_init, replicates, master_seed,
                       step_cap, out_ptr, out_idx, invd, is_hub, hub_of,
                       hub_vert, nsmall_out, hb_ptr, bkt_ptr, bkt_sall,
                       bkt_invmax, arc_src, arc_tgt, arc_bkt, aptr, aidx,
                       inn_ptr, inn_idx):
    n = invd.shape[0]
    typ = np.empty(n, np.uint8)
    a_small = np.empty(n, np.int64)
    act = np.empty(n + 1, np.int64)
    apos = np.empty(n, np.int64)
    cmb = np.empty(bkt_ptr.shape[0] - 1, np.int64)
    smb = np.empty(bkt_ptr.shape[0] - 1, np.float64)
    slot_arc = np.empty(arc_src.shape[0], np.int64)
    arc_slot = np.empty(arc_src.shape[0], np.int64)
    hint = np.empty(n, np.int64)
    dummy_v3 = np.zeros(1, np.uint8)
    one = np.empty(1, np.int64)
    extinct = 0
    fixed = 0
    censored = 0
    for rep in range(replicates):
        state = _stream_init(master_seed, rep)
        _eff_reset(typ, a_small, apos, hint, cmb, smb, slot_arc, arc_slot)
        if uniform_init:
            v0, state = _rand_below(state, n)
            one[0] = v0
            seed_list = one
        else:
            seed_list = init_list
        act_cnt, F, j = _eff_seed_initial(
            seed_list, typ, a_small, invd, is_hub, hub_of, hub_vert,
            nsmall_out, hb_ptr, bkt_ptr, cmb, smb, arc_src, arc_tgt,
            arc_bkt, slot_arc, arc_slot, aptr, aidx, inn_ptr, inn_idx,
            act, apos)
        code, eff, mv, hi, state, act_cnt, F, j = _eff_single(
            r, step_cap, state, out_ptr, out_idx, invd,
            is_hub, hub_of, hub_vert, nsmall_out,
            hb_ptr, bkt_ptr, bkt_sall, bkt_invmax,
            arc_src, arc_tgt, arc_bkt, aptr, aidx, inn_ptr, inn_idx,
            typ, a_small, act, apos, cmb, smb, slot_arc, arc_slot, hint,
            act_cnt, F, j, dummy_v3, -1, False, 0)
        if code == RESULT_EXTINCTION:
            extinct += 1
        elif code == RESULT_FIXATION:
            fixed += 1
        else:
            censored += 1
    return extinct, fixed, censored
