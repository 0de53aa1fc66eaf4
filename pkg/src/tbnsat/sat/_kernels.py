"""Array-based CDCL core.

All solver state lives in flat numpy arrays so the same code runs under
numba or as plain Python.  Literals are ``2*v + sign`` with 0-based ``v``
and ``sign == 1`` for negation.  Clause ``c`` occupies
``lits[cstart[c] : cstart[c] + clen[c]]``; its two watched literals are
always at offsets 0 and 1.  Each clause owns two watch nodes (``2c`` and
``2c+1``) threaded into per-literal singly linked lists.

``search`` is resumable: it returns YIELD/GROW at the top of its loop with
all state stored, so the caller can check wall time or enlarge storage and
call it again.
"""
import numpy as np

from .._jit import njit

# scalar slots in the int64 state vector
NV = 0
NC = 1
NL = 2
QHEAD = 3
TRAIL = 4
DL = 5
HSIZE = 6
OK = 7
CONFLICTS = 8
DECISIONS = 9
PROPS = 10
NLEARNT = 11
MAXLEARNT = 12
LUBY_IDX = 13
CONF_RESTART = 14
BUDGET = 15
STAMP = 16
RESTARTS = 17
NDELETED_LITS = 18
N_SCALARS = 20

# float slots
VAR_INC = 0
CLA_INC = 1
N_FLOATS = 2

# return codes
UNKNOWN = 0
YIELD = 1
GROW = 2
SAT = 10
UNSAT = 20

UNDEF = 2
RESTART_BASE = 100
VAR_DECAY = 0.95
CLA_DECAY = 0.999


@njit
def lit_value(assign, lit):
    a = assign[lit >> 1]
    if a == UNDEF:
        return UNDEF
    return a ^ (lit & 1)


@njit
def enqueue(S, assign, level, reason, trail, lit, from_clause):
    v = lit >> 1
    assign[v] = 1 - (lit & 1)
    level[v] = S[DL]
    reason[v] = from_clause
    trail[S[TRAIL]] = lit
    S[TRAIL] += 1


# ---------------------------------------------------------------- heap


@njit
def heap_up(heap, heap_pos, activity, i):
    v = heap[i]
    act = activity[v]
    while i > 0:
        parent = (i - 1) >> 1
        pv = heap[parent]
        if activity[pv] >= act:
            break
        heap[i] = pv
        heap_pos[pv] = i
        i = parent
    heap[i] = v
    heap_pos[v] = i


@njit
def heap_down(heap, heap_pos, activity, size, i):
    v = heap[i]
    act = activity[v]
    while True:
        child = 2 * i + 1
        if child >= size:
            break
        right = child + 1
        if right < size and activity[heap[right]] > activity[heap[child]]:
            child = right
        cv = heap[child]
        if activity[cv] <= act:
            break
        heap[i] = cv
        heap_pos[cv] = i
        i = child
    heap[i] = v
    heap_pos[v] = i


@njit
def heap_insert(S, heap, heap_pos, activity, v):
    if heap_pos[v] >= 0:
        return
    i = S[HSIZE]
    heap[i] = v
    heap_pos[v] = i
    S[HSIZE] = i + 1
    heap_up(heap, heap_pos, activity, i)


@njit
def heap_pop(S, heap, heap_pos, activity):
    size = S[HSIZE]
    v = heap[0]
    heap_pos[v] = -1
    size -= 1
    S[HSIZE] = size
    if size > 0:
        last = heap[size]
        heap[0] = last
        heap_pos[last] = 0
        heap_down(heap, heap_pos, activity, size, 0)
    return v


@njit
def bump_var(S, F, heap, heap_pos, activity, v):
    activity[v] += F[VAR_INC]
    if activity[v] > 1e100:
        for i in range(S[NV]):
            activity[i] *= 1e-100
        F[VAR_INC] *= 1e-100
    p = heap_pos[v]
    if p >= 0:
        heap_up(heap, heap_pos, activity, p)


@njit
def bump_clause(S, F, cact, clearnt, c):
    cact[c] += F[CLA_INC]
    if cact[c] > 1e20:
        for i in range(S[NC]):
            if clearnt[i]:
                cact[i] *= 1e-20
        F[CLA_INC] *= 1e-20


# ---------------------------------------------------------------- clauses


@njit
def attach(lits, cstart, whead, wnext, c):
    st = cstart[c]
    a = lits[st]
    b = lits[st + 1]
    wnext[2 * c] = whead[a]
    whead[a] = 2 * c
    wnext[2 * c + 1] = whead[b]
    whead[b] = 2 * c + 1


@njit
def store_clause(S, lits, cstart, clen, clearnt, cdel, clbd, cact, whead, wnext, buf, n, learnt, lbd):
    c = S[NC]
    st = S[NL]
    for i in range(n):
        lits[st + i] = buf[i]
    cstart[c] = st
    clen[c] = n
    clearnt[c] = learnt
    cdel[c] = 0
    clbd[c] = lbd
    cact[c] = 0.0
    S[NC] = c + 1
    S[NL] = st + n
    attach(lits, cstart, whead, wnext, c)
    return c


@njit
def add_clauses_root(S, F, lits, cstart, clen, clearnt, cdel, clbd, cact, whead, wnext,
                     assign, level, reason, trail, trail_lim, lit_stamp, buf,
                     flat, offsets):
    """Add original clauses at decision level 0.  Caller guarantees capacity."""
    ncl = offsets.shape[0] - 1
    for ci in range(ncl):
        if S[OK] == 0:
            return
        S[STAMP] += 1
        stamp = S[STAMP]
        n = 0
        sat = False
        for k in range(offsets[ci], offsets[ci + 1]):
            l = flat[k]
            if lit_stamp[l] == stamp:
                continue
            if lit_stamp[l ^ 1] == stamp:
                sat = True
                break
            lit_stamp[l] = stamp
            val = lit_value(assign, l)
            if val == 1:
                sat = True
                break
            if val == 0:
                continue
            buf[n] = l
            n += 1
        if sat:
            continue
        if n == 0:
            S[OK] = 0
            return
        if n == 1:
            enqueue(S, assign, level, reason, trail, buf[0], -1)
            confl = propagate(S, lits, cstart, clen, cdel, whead, wnext, assign, level, reason, trail)
            if confl >= 0:
                S[OK] = 0
                return
            continue
        store_clause(S, lits, cstart, clen, clearnt, cdel, clbd, cact, whead, wnext, buf, n, 0, 0)


# ---------------------------------------------------------------- propagation


@njit
def propagate(S, lits, cstart, clen, cdel, whead, wnext, assign, level, reason, trail):
    while S[QHEAD] < S[TRAIL]:
        p = trail[S[QHEAD]]
        S[QHEAD] += 1
        S[PROPS] += 1
        f = p ^ 1
        prev = -1
        node = whead[f]
        while node != -1:
            nxt = wnext[node]
            c = node >> 1
            if cdel[c]:
                if prev == -1:
                    whead[f] = nxt
                else:
                    wnext[prev] = nxt
                node = nxt
                continue
            st = cstart[c]
            if lits[st] == f:
                lits[st] = lits[st + 1]
                lits[st + 1] = f
            first = lits[st]
            fv = lit_value(assign, first)
            if fv == 1:
                prev = node
                node = nxt
                continue
            moved = False
            end = st + clen[c]
            for k in range(st + 2, end):
                lk = lits[k]
                if lit_value(assign, lk) != 0:
                    lits[st + 1] = lk
                    lits[k] = f
                    if prev == -1:
                        whead[f] = nxt
                    else:
                        wnext[prev] = nxt
                    wnext[node] = whead[lk]
                    whead[lk] = node
                    moved = True
                    break
            if moved:
                node = nxt
                continue
            if fv == 0:
                S[QHEAD] = S[TRAIL]
                return c
            enqueue(S, assign, level, reason, trail, first, c)
            prev = node
            node = nxt
    return -1


@njit
def cancel_until(S, assign, trail, trail_lim, phase, heap, heap_pos, activity, lvl):
    if S[DL] <= lvl:
        return
    stop = trail_lim[lvl]
    for i in range(S[TRAIL] - 1, stop - 1, -1):
        lit = trail[i]
        v = lit >> 1
        phase[v] = 1 - (lit & 1)
        assign[v] = UNDEF
        heap_insert(S, heap, heap_pos, activity, v)
    S[TRAIL] = stop
    S[QHEAD] = stop
    S[DL] = lvl


# ---------------------------------------------------------------- learning


@njit
def analyze(S, F, lits, cstart, clen, clearnt, cact, assign, level, reason, trail,
            seen, heap, heap_pos, activity, buf, aux, lvl_stamp, confl):
    """First-UIP analysis.  Fills ``buf`` and returns (length, backjump level, lbd)."""
    path = 0
    p = -1
    n = 1
    idx = S[TRAIL] - 1
    dl = S[DL]
    while True:
        if clearnt[confl]:
            bump_clause(S, F, cact, clearnt, confl)
        st = cstart[confl]
        j0 = 0 if p == -1 else 1
        for j in range(st + j0, st + clen[confl]):
            q = lits[j]
            v = q >> 1
            if seen[v] == 0 and level[v] > 0:
                bump_var(S, F, heap, heap_pos, activity, v)
                seen[v] = 1
                if level[v] >= dl:
                    path += 1
                else:
                    buf[n] = q
                    n += 1
        while seen[trail[idx] >> 1] == 0:
            idx -= 1
        p = trail[idx]
        idx -= 1
        confl = reason[p >> 1]
        seen[p >> 1] = 0
        path -= 1
        if path <= 0:
            break
    buf[0] = p ^ 1

    # local minimisation: drop literals implied by other clause literals
    for i in range(1, n):
        aux[i] = buf[i]
    m = 1
    for i in range(1, n):
        q = buf[i]
        r = reason[q >> 1]
        keep = True
        if r >= 0:
            keep = False
            st = cstart[r]
            for j in range(st + 1, st + clen[r]):
                v = lits[j] >> 1
                if seen[v] == 0 and level[v] > 0:
                    keep = True
                    break
        if keep:
            buf[m] = q
            m += 1
    for i in range(1, n):
        seen[aux[i] >> 1] = 0
    n = m

    bt = 0
    if n > 1:
        best = 1
        for i in range(2, n):
            if level[buf[i] >> 1] > level[buf[best] >> 1]:
                best = i
        tmp = buf[1]
        buf[1] = buf[best]
        buf[best] = tmp
        bt = level[buf[1] >> 1]

    S[STAMP] += 1
    stamp = S[STAMP]
    lbd = 0
    for i in range(n):
        lv = level[buf[i] >> 1]
        if lvl_stamp[lv] != stamp:
            lvl_stamp[lv] = stamp
            lbd += 1
    return n, bt, lbd


@njit
def luby(i):
    # i-th element (0-based) of the Luby sequence 1,1,2,1,1,2,4,...
    size = 1
    seq = 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


@njit
def reduce_db(S, lits, cstart, clen, clearnt, cdel, clbd, cact, assign, reason):
    nc = S[NC]
    cand = np.empty(nc, dtype=np.int64)
    m = 0
    for c in range(nc):
        if clearnt[c] and not cdel[c] and clen[c] > 2 and clbd[c] > 2:
            v = lits[cstart[c]] >> 1
            if reason[v] == c and assign[v] != UNDEF:
                continue
            cand[m] = c
            m += 1
    if m == 0:
        return
    score = np.empty(m, dtype=np.float64)
    maxact = 1e-300
    for i in range(m):
        if cact[cand[i]] > maxact:
            maxact = cact[cand[i]]
    for i in range(m):
        c = cand[i]
        score[i] = clbd[c] + 0.5 * (1.0 - cact[c] / maxact)
    order = np.argsort(-score, kind="mergesort")
    for i in range(m // 2):
        c = cand[order[i]]
        cdel[c] = 1
        S[NLEARNT] -= 1
        S[NDELETED_LITS] += clen[c]


@njit
def pick_branch(S, assign, phase, heap, heap_pos, activity):
    while S[HSIZE] > 0:
        v = heap_pop(S, heap, heap_pos, activity)
        if assign[v] == UNDEF:
            return 2 * v + (1 - phase[v])
    return -1


@njit
def search(S, F, lits, cstart, clen, clearnt, cdel, clbd, cact, whead, wnext,
           assign, level, reason, trail, trail_lim, phase, seen, heap, heap_pos,
           activity, buf, aux, lvl_stamp, assumps, yield_every):
    """Run CDCL until SAT/UNSAT/budget, or YIELD/GROW for the caller."""
    if S[OK] == 0:
        return UNSAT
    nassump = assumps.shape[0]
    cap_lits = lits.shape[0]
    cap_cls = clen.shape[0]
    steps = 0
    while True:
        if cap_lits - S[NL] < S[NV] + 2 or cap_cls - S[NC] < 2:
            return GROW
        if steps >= yield_every:
            return YIELD
        steps += 1
        confl = propagate(S, lits, cstart, clen, cdel, whead, wnext, assign, level, reason, trail)
        if confl >= 0:
            S[CONFLICTS] += 1
            S[CONF_RESTART] += 1
            if S[DL] == 0:
                S[OK] = 0
                return UNSAT
            n, bt, lbd = analyze(S, F, lits, cstart, clen, clearnt, cact, assign, level, reason,
                                 trail, seen, heap, heap_pos, activity, buf, aux, lvl_stamp, confl)
            cancel_until(S, assign, trail, trail_lim, phase, heap, heap_pos, activity, bt)
            if n == 1:
                enqueue(S, assign, level, reason, trail, buf[0], -1)
            else:
                c = store_clause(S, lits, cstart, clen, clearnt, cdel, clbd, cact, whead, wnext,
                                 buf, n, 1, lbd)
                bump_clause(S, F, cact, clearnt, c)
                S[NLEARNT] += 1
                enqueue(S, assign, level, reason, trail, buf[0], c)
            F[VAR_INC] /= VAR_DECAY
            F[CLA_INC] /= CLA_DECAY
            if S[BUDGET] >= 0:
                S[BUDGET] -= 1
                if S[BUDGET] < 0:
                    cancel_until(S, assign, trail, trail_lim, phase, heap, heap_pos, activity, 0)
                    return UNKNOWN
            continue

        if S[CONF_RESTART] >= RESTART_BASE * luby(S[LUBY_IDX]):
            S[CONF_RESTART] = 0
            S[LUBY_IDX] += 1
            S[RESTARTS] += 1
            cancel_until(S, assign, trail, trail_lim, phase, heap, heap_pos, activity, 0)
            continue
        if S[NLEARNT] - S[TRAIL] >= S[MAXLEARNT]:
            reduce_db(S, lits, cstart, clen, clearnt, cdel, clbd, cact, assign, reason)
            S[MAXLEARNT] = S[MAXLEARNT] + S[MAXLEARNT] // 10

        nxt = -1
        while S[DL] < nassump:
            a = assumps[S[DL]]
            av = lit_value(assign, a)
            if av == 1:
                trail_lim[S[DL]] = S[TRAIL]
                S[DL] += 1
            elif av == 0:
                cancel_until(S, assign, trail, trail_lim, phase, heap, heap_pos, activity, 0)
                return UNSAT
            else:
                nxt = a
                break
        if nxt == -1:
            nxt = pick_branch(S, assign, phase, heap, heap_pos, activity)
            if nxt == -1:
                return SAT
            S[DECISIONS] += 1
        trail_lim[S[DL]] = S[TRAIL]
        S[DL] += 1
        enqueue(S, assign, level, reason, trail, nxt, -1)


@njit
def compact(S, lits, cstart, clen, clearnt, cdel, clbd, cact, whead, wnext, reason, trail):
    """Drop deleted clauses, pack literal storage and rebuild the watch lists."""
    nc = S[NC]
    newid = np.full(nc, -1, dtype=np.int64)
    pos = 0
    k = 0
    for c in range(nc):
        if cdel[c]:
            continue
        st = cstart[c]
        n = clen[c]
        for i in range(n):
            lits[pos + i] = lits[st + i]
        cstart[k] = pos
        clen[k] = n
        clearnt[k] = clearnt[c]
        cdel[k] = 0
        clbd[k] = clbd[c]
        cact[k] = cact[c]
        newid[c] = k
        pos += n
        k += 1
    S[NC] = k
    S[NL] = pos
    S[NDELETED_LITS] = 0
    for i in range(S[TRAIL]):
        v = trail[i] >> 1
        if reason[v] >= 0:
            reason[v] = newid[reason[v]]
    for i in range(whead.shape[0]):
        whead[i] = -1
    for c in range(k):
        attach(lits, cstart, whead, wnext, c)
