"""Conflict-driven clause learning over flat int32 arrays.

The solver body is written once, in plain numpy-over-arrays style, and
compiled with numba when available.  Setting CIRCSYNTH_JIT=0 (or numba being
absent) runs the exact same source interpreted, which is the reference
behavior the compiled path must reproduce bit for bit.

Internals: two-watched-literal propagation with the watch lists threaded
through the clause arena as singly linked lists, first-UIP clause learning,
VSIDS branching on a binary max-heap, phase saving, Luby restarts, and
LBD-based deletion of learned clauses with arena compaction.  Literals are
encoded as 2*var + sign with 0-based variables.
"""

import os

import numpy as np

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    numba = None
    HAS_NUMBA = False

USE_JIT = HAS_NUMBA and os.environ.get("CIRCSYNTH_JIT", "1").lower() not in ("0", "false", "no", "off")


def _speed_up(func):
    if USE_JIT:
        return numba.njit(cache=True)(func)
    return func


S_UNSAT, S_SAT, S_UNKNOWN = 0, 1, 2

HDR = 5  # clause record: size, flags, lbd, next0, next1, then literals
F_LEARNED = 1
F_DELETED = 2

STAT_NAMES = ("conflicts", "decisions", "propagations", "restarts",
              "learned", "deleted", "gc_runs", "learned_alive")


@_speed_up
def _luby(x):
    """The Luby restart sequence 1,1,2,1,1,2,4,... for 0-based index x."""
    size = 1
    seq = 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    return 1 << seq


@_speed_up
def _sift_up(heap, hpos, activity, i):
    v = heap[i]
    a = activity[v]
    while i > 0:
        parent = (i - 1) >> 1
        u = heap[parent]
        if activity[u] >= a:
            break
        heap[i] = u
        hpos[u] = i
        i = parent
    heap[i] = v
    hpos[v] = i


@_speed_up
def _sift_down(heap, hpos, activity, heap_n, i):
    v = heap[i]
    a = activity[v]
    while True:
        left = 2 * i + 1
        if left >= heap_n:
            break
        right = left + 1
        child = right if right < heap_n and activity[heap[right]] > activity[heap[left]] else left
        u = heap[child]
        if activity[u] <= a:
            break
        heap[i] = u
        hpos[u] = i
        i = child
    heap[i] = v
    hpos[v] = i


@_speed_up
def solve_kernel(num_vars, cl_lits, cl_offsets, units, conflict_budget,
                 luby_base, decay, model_out, stats_out):
    """Run CDCL to completion or budget exhaustion.

    cl_lits/cl_offsets hold the problem clauses (every clause has at least
    two distinct, non-complementary literals, encoded 2*var + sign); units
    holds the unit clauses.  Returns S_SAT, S_UNSAT, or S_UNKNOWN; on SAT the
    assignment is written to model_out.
    """
    n_orig = cl_offsets.shape[0] - 1
    nlit2 = 2 * num_vars

    cap = cl_lits.shape[0] + HDR * n_orig + 1024
    arena = np.zeros(cap, dtype=np.int32)
    top = 0

    watch = np.full(nlit2, -1, dtype=np.int32)
    assigns = np.full(num_vars, -1, dtype=np.int8)
    phase = np.zeros(num_vars, dtype=np.int8)
    level = np.zeros(num_vars, dtype=np.int32)
    reason = np.full(num_vars, -1, dtype=np.int32)
    trail = np.zeros(num_vars, dtype=np.int32)
    trail_lim = np.zeros(num_vars + 1, dtype=np.int32)
    activity = np.zeros(num_vars, dtype=np.float64)
    heap = np.zeros(num_vars, dtype=np.int32)
    hpos = np.zeros(num_vars, dtype=np.int32)
    seen = np.zeros(num_vars, dtype=np.uint8)
    learnt_buf = np.zeros(num_vars + 1, dtype=np.int32)

    for v in range(num_vars):
        heap[v] = v
        hpos[v] = v
    heap_n = num_vars

    trail_n = 0
    qhead = 0
    dl = 0
    var_inc = 1.0

    conflicts = 0
    decisions = 0
    propagations = 0
    restarts = 0
    learned_total = 0
    deleted_total = 0
    gc_runs = 0
    n_learnt_alive = 0
    reduce_limit = 2000
    conflicts_at_restart = 0
    restart_threshold = luby_base * _luby(0)

    status = S_UNKNOWN
    finished = False

    # Load the problem clauses into the arena and attach watches.
    for ci in range(n_orig):
        begin = cl_offsets[ci]
        size = cl_offsets[ci + 1] - begin
        arena[top] = size
        arena[top + 1] = 0
        arena[top + 2] = 0
        for k in range(size):
            arena[top + HDR + k] = cl_lits[begin + k]
        l0 = arena[top + HDR]
        l1 = arena[top + HDR + 1]
        arena[top + 3] = watch[l0]
        watch[l0] = top
        arena[top + 4] = watch[l1]
        watch[l1] = top
        top += HDR + size

    # Enqueue the unit clauses at level 0.
    for ui in range(units.shape[0]):
        u = units[ui]
        v = u >> 1
        val = 1 - (u & 1)
        if assigns[v] == -1:
            assigns[v] = val
            level[v] = 0
            reason[v] = -1
            trail[trail_n] = u
            trail_n += 1
        elif assigns[v] != val:
            status = S_UNSAT
            finished = True
            break

    while not finished:
        # --- unit propagation ---
        confl = -1
        while qhead < trail_n:
            p = trail[qhead]
            qhead += 1
            propagations += 1
            w = p ^ 1
            prev = -1
            prev_slot = 0
            c = watch[w]
            while c != -1:
                flags = arena[c + 1]
                slot = 0 if arena[c + HDR] == w else 1
                nxt = arena[c + 3 + slot]
                if flags & F_DELETED:
                    if prev == -1:
                        watch[w] = nxt
                    else:
                        arena[prev + 3 + prev_slot] = nxt
                    c = nxt
                    continue
                if slot == 0:
                    tmp = arena[c + HDR]
                    arena[c + HDR] = arena[c + HDR + 1]
                    arena[c + HDR + 1] = tmp
                    tmp = arena[c + 3]
                    arena[c + 3] = arena[c + 4]
                    arena[c + 4] = tmp
                other = arena[c + HDR]
                oa = assigns[other >> 1]
                if oa == 1 - (other & 1):
                    prev = c
                    prev_slot = 1
                    c = nxt
                    continue
                size = arena[c]
                found = -1
                for k in range(2, size):
                    lk = arena[c + HDR + k]
                    if assigns[lk >> 1] != (lk & 1):
                        found = k
                        break
                if found >= 0:
                    tmp = arena[c + HDR + 1]
                    arena[c + HDR + 1] = arena[c + HDR + found]
                    arena[c + HDR + found] = tmp
                    if prev == -1:
                        watch[w] = nxt
                    else:
                        arena[prev + 3 + prev_slot] = nxt
                    nw = arena[c + HDR + 1]
                    arena[c + 4] = watch[nw]
                    watch[nw] = c
                    c = nxt
                    continue
                if oa == (other & 1):
                    confl = c
                    break
                v = other >> 1
                assigns[v] = 1 - (other & 1)
                level[v] = dl
                reason[v] = c
                trail[trail_n] = other
                trail_n += 1
                prev = c
                prev_slot = 1
                c = nxt
            if confl != -1:
                break

        if confl != -1:
            conflicts += 1
            if dl == 0:
                status = S_UNSAT
                break

            # --- first-UIP conflict analysis ---
            path_c = 0
            p = -1
            nl = 1
            index = trail_n
            cc = confl
            while True:
                csize = arena[cc]
                kstart = 0 if p == -1 else 1
                for k in range(kstart, csize):
                    q = arena[cc + HDR + k]
                    v = q >> 1
                    if seen[v] == 0 and level[v] > 0:
                        seen[v] = 1
                        activity[v] += var_inc
                        if activity[v] > 1e100:
                            for u in range(num_vars):
                                activity[u] *= 1e-100
                            var_inc *= 1e-100
                        if hpos[v] != -1:
                            _sift_up(heap, hpos, activity, hpos[v])
                        if level[v] >= dl:
                            path_c += 1
                        else:
                            learnt_buf[nl] = q
                            nl += 1
                index -= 1
                while seen[trail[index] >> 1] == 0:
                    index -= 1
                p = trail[index]
                v = p >> 1
                cc = reason[v]
                seen[v] = 0
                path_c -= 1
                if path_c <= 0:
                    break
            learnt_buf[0] = p ^ 1
            for k in range(1, nl):
                seen[learnt_buf[k] >> 1] = 0
            var_inc /= decay

            # Backtrack level: highest level among the non-asserting literals.
            if nl == 1:
                bt = 0
            else:
                max_i = 1
                for k in range(2, nl):
                    if level[learnt_buf[k] >> 1] > level[learnt_buf[max_i] >> 1]:
                        max_i = k
                tmp = learnt_buf[1]
                learnt_buf[1] = learnt_buf[max_i]
                learnt_buf[max_i] = tmp
                bt = level[learnt_buf[1] >> 1]

            # LBD of the learned clause: number of distinct decision levels.
            lbd = 0
            for k in range(nl):
                lv = level[learnt_buf[k] >> 1]
                fresh = True
                for k2 in range(k):
                    if level[learnt_buf[k2] >> 1] == lv:
                        fresh = False
                        break
                if fresh:
                    lbd += 1

            # --- backtrack ---
            lim = trail_lim[bt]
            i = trail_n - 1
            while i >= lim:
                enc = trail[i]
                v = enc >> 1
                phase[v] = assigns[v]
                assigns[v] = -1
                reason[v] = -1
                if hpos[v] == -1:
                    heap[heap_n] = v
                    hpos[v] = heap_n
                    heap_n += 1
                    _sift_up(heap, hpos, activity, hpos[v])
                i -= 1
            trail_n = lim
            qhead = lim
            dl = bt

            # --- install the learned clause and assert its first literal ---
            if nl == 1:
                u = learnt_buf[0]
                v = u >> 1
                assigns[v] = 1 - (u & 1)
                level[v] = 0
                reason[v] = -1
                trail[trail_n] = u
                trail_n += 1
            else:
                need = top + HDR + nl
                if need > arena.shape[0]:
                    ncap = arena.shape[0]
                    while ncap < need:
                        ncap *= 2
                    bigger = np.zeros(ncap, dtype=np.int32)
                    bigger[:top] = arena[:top]
                    arena = bigger
                cref = top
                arena[cref] = nl
                arena[cref + 1] = F_LEARNED
                arena[cref + 2] = lbd
                for k in range(nl):
                    arena[cref + HDR + k] = learnt_buf[k]
                l0 = arena[cref + HDR]
                l1 = arena[cref + HDR + 1]
                arena[cref + 3] = watch[l0]
                watch[l0] = cref
                arena[cref + 4] = watch[l1]
                watch[l1] = cref
                top += HDR + nl
                learned_total += 1
                n_learnt_alive += 1
                u = learnt_buf[0]
                v = u >> 1
                assigns[v] = 1 - (u & 1)
                level[v] = dl
                reason[v] = cref
                trail[trail_n] = u
                trail_n += 1

            if conflict_budget >= 0 and conflicts >= conflict_budget:
                status = S_UNKNOWN
                break
            continue

        # --- no conflict ---
        if trail_n == num_vars:
            status = S_SAT
            for v in range(num_vars):
                model_out[v] = assigns[v]
            break

        if conflicts - conflicts_at_restart >= restart_threshold:
            restarts += 1
            conflicts_at_restart = conflicts
            restart_threshold = luby_base * _luby(restarts)
            if dl > 0:
                lim = trail_lim[0]
                i = trail_n - 1
                while i >= lim:
                    enc = trail[i]
                    v = enc >> 1
                    phase[v] = assigns[v]
                    assigns[v] = -1
                    reason[v] = -1
                    if hpos[v] == -1:
                        heap[heap_n] = v
                        hpos[v] = heap_n
                        heap_n += 1
                        _sift_up(heap, hpos, activity, hpos[v])
                    i -= 1
                trail_n = lim
                qhead = lim
                dl = 0

        if n_learnt_alive >= reduce_limit:
            # --- mark useless learned clauses deleted ---
            crefs = np.empty(n_learnt_alive, dtype=np.int64)
            keys = np.empty(n_learnt_alive, dtype=np.int64)
            cnt = 0
            pos = 0
            while pos < top:
                size = arena[pos]
                flags = arena[pos + 1]
                if (flags & F_LEARNED) and not (flags & F_DELETED):
                    crefs[cnt] = pos
                    keys[cnt] = np.int64(arena[pos + 2]) * 1000000 + size
                    cnt += 1
                pos += HDR + size
            order = np.argsort(keys[:cnt], kind="mergesort")
            target = cnt // 2
            removed = 0
            j = cnt - 1
            while j >= 0 and removed < target:
                c = int(crefs[order[j]])
                size = arena[c]
                lbd_c = arena[c + 2]
                j -= 1
                if size <= 2 or lbd_c <= 2:
                    continue
                l0 = arena[c + HDR]
                v0 = l0 >> 1
                if assigns[v0] != -1 and reason[v0] == c:
                    continue
                arena[c + 1] |= F_DELETED
                removed += 1
            n_learnt_alive -= removed
            deleted_total += removed
            reduce_limit += 1000

            # --- compact the arena, leaving forwarding pointers behind ---
            fresh = np.zeros(arena.shape[0], dtype=np.int32)
            ntop = 0
            pos = 0
            while pos < top:
                size = arena[pos]
                flags = arena[pos + 1]
                if flags & F_DELETED:
                    arena[pos + 3] = -2
                else:
                    fresh[ntop] = size
                    fresh[ntop + 1] = flags
                    fresh[ntop + 2] = arena[pos + 2]
                    for k in range(size):
                        fresh[ntop + HDR + k] = arena[pos + HDR + k]
                    arena[pos + 3] = ntop
                    ntop += HDR + size
                pos += HDR + size
            for t in range(trail_n):
                v = trail[t] >> 1
                if reason[v] >= 0:
                    reason[v] = arena[reason[v] + 3]
            for w in range(nlit2):
                watch[w] = -1
            pos = 0
            while pos < ntop:
                size = fresh[pos]
                l0 = fresh[pos + HDR]
                l1 = fresh[pos + HDR + 1]
                fresh[pos + 3] = watch[l0]
                watch[l0] = pos
                fresh[pos + 4] = watch[l1]
                watch[l1] = pos
                pos += HDR + size
            arena = fresh
            top = ntop
            gc_runs += 1

        # --- decide ---
        next_var = -1
        while heap_n > 0:
            v = heap[0]
            heap_n -= 1
            last = heap[heap_n]
            heap[0] = last
            hpos[last] = 0
            hpos[v] = -1
            if heap_n > 0:
                _sift_down(heap, hpos, activity, heap_n, 0)
            if assigns[v] == -1:
                next_var = v
                break
        decisions += 1
        trail_lim[dl] = trail_n
        dl += 1
        enc = 2 * next_var + (1 - phase[next_var])
        assigns[next_var] = phase[next_var]
        level[next_var] = dl
        reason[next_var] = -1
        trail[trail_n] = enc
        trail_n += 1

    stats_out[0] = conflicts
    stats_out[1] = decisions
    stats_out[2] = propagations
    stats_out[3] = restarts
    stats_out[4] = learned_total
    stats_out[5] = deleted_total
    stats_out[6] = gc_runs
    stats_out[7] = n_learnt_alive
    return status
