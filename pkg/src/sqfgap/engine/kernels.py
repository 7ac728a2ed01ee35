"""numba kernels behind :mod:`sqfgap.engine`.

State lives in flat int64 arrays so that the same compiled functions serve
both the one-event-at-a-time stepping API and the full-range search loop.
Slot ``n - 1`` of ``p2``/``nsqf`` is a sentinel holding INT64_MAX, which ends
every sorted walk without bounds checks.
"""

import numpy as np
from numba import njit

INT64_MAX = np.iinfo(np.int64).max

# longest run the engine will follow before refusing (known gaps stop at 18)
MAXRUN = 64
OFF = MAXRUN + 1
RING = 256
RING_MASK = RING - 1
COLLECT = 1024

# scalar state
SC_N = 0
SC_HEAD = 1
SC_RING_N = 2
SC_LAST_EXAM = 3
SC_RUN_S = 4
SC_RUN_E = 5
SC_JUMP = 6
SC_POPPED = 7
SC_EV_KIND = 8
SC_EV_POS = 9
SC_EV_START = 10
SC_EV_LEN = 11
SC_SIZE = 16

# configuration
CF_LEVEL = 0
CF_BASE = 1
CF_MCLOSE = 2
CF_L = 3
CF_IDX = 4
CF_START = 5
CF_END = 6
CF_N = 7
CF_SIZE = 8

# statistics
ST_UPDATES = 0
ST_MOVES = 1
ST_SKIPS = 2
ST_CANDIDATES = 3
ST_TESTS = 4
ST_TRIAL = 5
ST_JUMPED = 6
ST_DEC_MOVES = 8
ST_DEC_UPDATES = 18
ST_SIZE = 32

EV_NONE = 0
EV_NONSQF = 1
EV_SKIP = 2
EV_TESTED = 3
EV_PASSED = 4
EV_DEDUP = 5
EV_DONE = 6


@njit(cache=True)
def _decile(cfg, x):
    s = cfg[CF_START]
    e = cfg[CF_END]
    if x < s or x >= e:
        return -1
    w = (e - s + 9) // 10
    return (x - s) // w


@njit(cache=True)
def _push_record(rec_s, rec_l, nrec, s, length):
    if nrec == rec_s.shape[0]:
        grow_s = np.empty(2 * nrec + 16, dtype=np.int64)
        grow_l = np.empty(2 * nrec + 16, dtype=np.int64)
        grow_s[:nrec] = rec_s[:nrec]
        grow_l[:nrec] = rec_l[:nrec]
        rec_s = grow_s
        rec_l = grow_l
    rec_s[nrec] = s
    rec_l[nrec] = length
    return rec_s, rec_l, nrec + 1


@njit(cache=True)
def _shift_up(p2, nsqf, i, n):
    """Move slot i (just increased) up the ascending array; ties order by p2.
    Returns the number of slots passed."""
    v = nsqf[i]
    q = p2[i]
    j = i
    while j + 1 < n and (nsqf[j + 1] < v or (nsqf[j + 1] == v and p2[j + 1] < q)):
        nsqf[j] = nsqf[j + 1]
        p2[j] = p2[j + 1]
        j += 1
    nsqf[j] = v
    p2[j] = q
    return j - i


@njit(cache=True)
def reinsert_sorted(p2, nsqf, i, n, st, dec):
    moved = _shift_up(p2, nsqf, i, n)
    st[ST_MOVES] += moved
    if dec >= 0:
        st[ST_DEC_MOVES + dec] += moved


@njit(cache=True)
def _trial_nonsqf(y, sqasc, st):
    for k in range(sqasc.shape[0]):
        q = sqasc[k]
        if q > y:
            return False
        st[ST_TRIAL] += 1
        if y % q == 0:
            return True
    return False


# ---------------------------------------------------------------- V1 and V2


@njit(cache=True)
def _pop_full(p2, nsqf, sc, st, cfg, v):
    n = cfg[CF_N]
    dec = _decile(cfg, v)
    while nsqf[0] == v:
        nsqf[0] += p2[0]
        st[ST_UPDATES] += 1
        if dec >= 0:
            st[ST_DEC_UPDATES + dec] += 1
        reinsert_sorted(p2, nsqf, 0, n, st, dec)
    sc[SC_N] = v
    sc[SC_POPPED] = 1
    st[ST_CANDIDATES] += 1


@njit(cache=True)
def _close_run(sqasc, sc, st, cfg, rec_s, rec_l, nrec):
    rs = sc[SC_RUN_S]
    re = sc[SC_RUN_E]
    L = cfg[CF_L]
    if sc[SC_JUMP] >= 0 and rs == sc[SC_JUMP] + 1 and re - rs + 1 >= L:
        # the run begins right after a jump: its true start may lie in skipped ground
        y = rs - 1
        while y >= 1 and _trial_nonsqf(y, sqasc, st):
            rs = y
            y -= 1
            if re - rs + 1 > MAXRUN:
                raise ValueError("run longer than MAXRUN")
    sc[SC_RUN_S] = -1
    sc[SC_RUN_E] = -1
    length = re - rs + 1
    if length >= L and cfg[CF_START] <= rs < cfg[CF_END]:
        sc[SC_EV_START] = rs
        sc[SC_EV_LEN] = length
        return _push_record(rec_s, rec_l, nrec, rs, length)
    return rec_s, rec_l, nrec


@njit(cache=True)
def _jump(p2, nsqf, sc, st, cfg):
    idx = cfg[CF_IDX]
    n = cfg[CF_N]
    new_n = nsqf[idx] - cfg[CF_L]
    st[ST_SKIPS] += 1
    st[ST_JUMPED] += new_n - sc[SC_N]
    for i in range(idx):
        if nsqf[i] <= new_n:
            nsqf[i] = (new_n // p2[i] + 1) * p2[i]
    for i in range(idx - 1, -1, -1):
        reinsert_sorted(p2, nsqf, i, n, st, -1)
    sc[SC_N] = new_n
    sc[SC_JUMP] = new_n
    sc[SC_POPPED] = 0
    return new_n + 1


@njit(cache=True)
def run_full(p2, nsqf, sqasc, sc, st, cfg, max_events, rec_s, rec_l, nrec):
    """V1 (every non-square-free number, sorted arrays) and V2 (plus skipping).

    Returns ``(rec_s, rec_l, nrec, done)``.
    """
    level = cfg[CF_LEVEL]
    L = cfg[CF_L]
    idx = cfg[CF_IDX]
    end = cfg[CF_END]
    ev = 0
    while ev < max_events:
        sc[SC_EV_START] = 0
        sc[SC_EV_LEN] = 0
        v = nsqf[0]
        rs = sc[SC_RUN_S]
        re = sc[SC_RUN_E]
        if re >= 0 and v == re + 1:
            _pop_full(p2, nsqf, sc, st, cfg, v)
            sc[SC_RUN_E] = v
            if v - rs + 1 > MAXRUN:
                raise ValueError("run longer than MAXRUN")
            sc[SC_EV_KIND] = EV_NONSQF
            sc[SC_EV_POS] = v
            ev += 1
            continue
        if re >= 0:
            rec_s, rec_l, nrec = _close_run(sqasc, sc, st, cfg, rec_s, rec_l, nrec)
        if v >= end:
            sc[SC_EV_KIND] = EV_DONE
            sc[SC_EV_POS] = v
            return rec_s, rec_l, nrec, True
        if level == 2 and sc[SC_POPPED] == 1 and nsqf[idx] > v + L:
            sc[SC_EV_KIND] = EV_SKIP
            sc[SC_EV_POS] = _jump(p2, nsqf, sc, st, cfg)
            ev += 1
            continue
        _pop_full(p2, nsqf, sc, st, cfg, v)
        sc[SC_RUN_S] = v
        sc[SC_RUN_E] = v
        sc[SC_EV_KIND] = EV_NONSQF
        sc[SC_EV_POS] = v
        ev += 1
    return rec_s, rec_l, nrec, False


# ---------------------------------------------------------------- V3 .. V7


@njit(cache=True)
def _base_hit(y, x, sqb, negmod, modc, base, level, st):
    if level >= 4:
        col = y - x + OFF
        for i in range(base):
            if modc[i] == negmod[i, col]:
                return True
        return False
    for i in range(base):
        st[ST_TRIAL] += 1
        if y % sqb[i] == 0:
            return True
    return False


@njit(cache=True)
def head_value(nsqf, nxt, sc, cfg):
    if cfg[CF_LEVEL] >= 6:
        return nsqf[sc[SC_HEAD]]
    return nsqf[cfg[CF_BASE]]


@njit(cache=True)
def examine(p2, nsqf, nxt, sqb, negmod, modc, ring, sc, st, cfg, collect):
    """Maximal non-square-free run through the current head position.

    Left of the head only base squares and previously popped large multiples
    (kept in ``ring``) can hit; right of it the pending large multiples are
    read off the ordered structure.
    """
    level = cfg[CF_LEVEL]
    base = cfg[CF_BASE]
    chain = level >= 6
    x = head_value(nsqf, nxt, sc, cfg)
    if level >= 4:
        for i in range(base):
            modc[i] = x % sqb[i]
        st[ST_TRIAL] += base
    cnt = sc[SC_RING_N]
    lowest = cnt - RING
    if lowest < 0:
        lowest = 0
    rp = cnt - 1
    l = x
    y = x - 1
    while y >= 1:
        if x - y > MAXRUN:
            raise ValueError("run longer than MAXRUN")
        hit = _base_hit(y, x, sqb, negmod, modc, base, level, st)
        if not hit:
            while rp >= lowest and ring[rp & RING_MASK] > y:
                rp -= 1
            hit = rp >= lowest and ring[rp & RING_MASK] == y
        if not hit:
            break
        l = y
        y -= 1
    ncol = 0
    ptr = sc[SC_HEAD] if chain else base
    r = x
    y = x + 1
    while True:
        if y - x > MAXRUN:
            raise ValueError("run longer than MAXRUN")
        while nsqf[ptr] <= y:
            if ncol == collect.shape[0]:
                raise ValueError("too many pending multiples near the head")
            collect[ncol] = ptr
            ncol += 1
            ptr = nxt[ptr] if chain else ptr + 1
        hit = _base_hit(y, x, sqb, negmod, modc, base, level, st)
        if not hit:
            for c in range(ncol):
                s = collect[c]
                if (y - nsqf[s]) % p2[s] == 0:
                    hit = True
                    break
        if not hit:
            break
        r = y
        y += 1
    return l, r


@njit(cache=True)
def test_at_head(p2, nsqf, nxt, sqb, negmod, modc, ring, sc, st, cfg, collect):
    """Closeness screen, de-duplication, then :func:`examine`. Returns an event kind."""
    L = cfg[CF_L]
    m = cfg[CF_MCLOSE]
    x = head_value(nsqf, nxt, sc, cfg)
    if m >= 2:
        if cfg[CF_LEVEL] >= 6:
            i = sc[SC_HEAD]
            for _ in range(m - 1):
                i = nxt[i]
            y = nsqf[i]
        else:
            y = nsqf[cfg[CF_BASE] + m - 1]
        if y > x + L - 1:
            st[ST_SKIPS] += 1
            return EV_PASSED
    if x <= sc[SC_LAST_EXAM]:
        return EV_DEDUP
    st[ST_TESTS] += 1
    l, r = examine(p2, nsqf, nxt, sqb, negmod, modc, ring, sc, st, cfg, collect)
    sc[SC_LAST_EXAM] = r
    if r - l + 1 >= L and cfg[CF_START] <= l < cfg[CF_END]:
        sc[SC_EV_START] = l
        sc[SC_EV_LEN] = r - l + 1
    return EV_TESTED


@njit(cache=True)
def _relink(p2, nsqf, nxt, h, base):
    """Advance head slot h by its own square and relink it (no data moves).
    Returns ``(links followed, new head)``.

    With p2 ascending, slot h-1 is already known to sort before the new
    value, so the walk starts there instead of at the front.
    """
    newv = nsqf[h] + p2[h]
    nsqf[h] = newv
    nh = nxt[h]
    steps = 0
    if h - 1 >= base:
        i = h - 1
    else:
        # compare with the old successor first; that comparison counts as a move
        steps = 1
        if newv < nsqf[nh] or (newv == nsqf[nh] and h < nh):
            return 1, h
        i = nh
    while True:
        j = nxt[i]
        steps += 1
        if nsqf[j] < newv or (nsqf[j] == newv and j < h):
            i = j
        else:
            break
    nxt[h] = nxt[i]
    nxt[i] = h
    return steps, nh


@njit(cache=True)
def run_split(p2, nsqf, nxt, sqb, negmod, modc, ring, sc, st, cfg, collect,
              max_events, rec_s, rec_l, nrec):
    """V3..V7: small squares form a base checked by arithmetic, large ones are
    kept ordered (sorted array below V6, chained list from V6) and every large
    multiple becomes a candidate position."""
    level = cfg[CF_LEVEL]
    base = cfg[CF_BASE]
    n = cfg[CF_N]
    chain = level >= 6
    m = cfg[CF_MCLOSE]
    reach = cfg[CF_L] - 1
    stop = cfg[CF_END] + MAXRUN
    # decile bookkeeping without a division per candidate
    s0 = cfg[CF_START]
    e0 = cfg[CF_END]
    width = (e0 - s0 + 9) // 10
    dec = _decile(cfg, head_value(nsqf, nxt, sc, cfg))
    dec_hi = s0 if dec < 0 else s0 + (dec + 1) * width
    ev = 0
    while ev < max_events:
        sc[SC_EV_START] = 0
        sc[SC_EV_LEN] = 0
        x = nsqf[sc[SC_HEAD]] if chain else nsqf[base]
        if x >= stop:
            sc[SC_EV_KIND] = EV_DONE
            sc[SC_EV_POS] = x
            return rec_s, rec_l, nrec, True
        st[ST_CANDIDATES] += 1
        # closeness screen inline; only survivors pay for the full test
        if m >= 2:
            if chain:
                i = sc[SC_HEAD]
                for _ in range(m - 1):
                    i = nxt[i]
                y = nsqf[i]
            else:
                y = nsqf[base + m - 1]
            close = y <= x + reach
        else:
            close = True
        if close:
            kind = test_at_head(p2, nsqf, nxt, sqb, negmod, modc, ring, sc, st, cfg, collect)
            if sc[SC_EV_LEN] > 0:
                rec_s, rec_l, nrec = _push_record(rec_s, rec_l, nrec, sc[SC_EV_START],
                                                  sc[SC_EV_LEN])
        else:
            st[ST_SKIPS] += 1
            kind = EV_PASSED
        cnt = sc[SC_RING_N]
        if cnt == 0 or ring[(cnt - 1) & RING_MASK] != x:
            ring[cnt & RING_MASK] = x
            sc[SC_RING_N] = cnt + 1
        if x >= dec_hi:
            dec = _decile(cfg, x)
            dec_hi = e0 + MAXRUN + 1 if dec < 0 and x >= e0 else (
                s0 if dec < 0 else s0 + (dec + 1) * width)
        upd = 0
        mov = 0
        if chain:
            h = sc[SC_HEAD]
            while nsqf[h] == x:
                steps, h = _relink(p2, nsqf, nxt, h, base)
                upd += 1
                mov += steps
            sc[SC_HEAD] = h
        else:
            while nsqf[base] == x:
                nsqf[base] += p2[base]
                upd += 1
                mov += _shift_up(p2, nsqf, base, n)
        st[ST_UPDATES] += upd
        st[ST_MOVES] += mov
        if dec >= 0:
            st[ST_DEC_UPDATES + dec] += upd
            st[ST_DEC_MOVES + dec] += mov
        sc[SC_N] = x
        sc[SC_EV_KIND] = kind
        sc[SC_EV_POS] = x
        ev += 1
    return rec_s, rec_l, nrec, False
