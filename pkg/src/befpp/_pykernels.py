"""Pure-Python simulation kernels.

Same algorithms and the same counter-based draws as the compiled ``_core``
module, so both backends return bit-identical results.  Used when the
extension is unavailable or ``BEFPP_PURE_PYTHON=1`` is set.
"""
import heapq
import math

import numpy as np

from .rng import bits, index_hash, replica_key, to_unit

GEOM, UNIT, EXPO = 0, 1, 2


def _incr(variant, param, base, k):
    if variant == UNIT:
        return 1.0
    u = to_unit(bits(base, k))
    if variant == GEOM:
        if param == -math.inf:
            return 1.0
        return 1.0 + math.floor(math.log(u) / param)
    return -math.log(u) / param


class _Env:
    """Lazily hashed vertex environment of one replica."""

    def __init__(self, a, b, keys, ncols):
        self.a, self.b = a, b
        self.p_east = b / (a + b)
        self.cb = [index_hash(keys[0], i) for i in range(ncols)]
        self.vb = [index_hash(keys[1], i) for i in range(ncols)]
        self.hb = [index_hash(keys[2], i) for i in range(ncols)]

    def coin(self, i, j):
        return to_unit(bits(self.cb[i], j)) < self.p_east

    def ev(self, i, j):
        return -math.log(to_unit(bits(self.vb[i], j))) / self.a

    def eh(self, i, j):
        return -math.log(to_unit(bits(self.hb[i], j))) / self.b


def fpp_event(a, b, t_end, N, keys, event_cap, snapshot):
    env = _Env(a, b, keys, N + 2)
    cluster = {}
    heights = np.full(N + 1, -1, dtype=np.int64)
    heap = []

    def walk(i, j, tau):
        while i <= N and (i, j) not in cluster:
            cluster[(i, j)] = tau
            if j > heights[i]:
                heights[i] = j
            if env.coin(i, j):
                fire = tau + env.ev(i, j)
                if fire <= t_end:
                    heapq.heappush(heap, (fire, i, j))
                i += 1
            else:
                if i < N:
                    fire = tau + env.eh(i, j)
                    if fire <= t_end:
                        heapq.heappush(heap, (fire, i, j))
                j += 1

    walk(0, 0, 0.0)
    events = 0
    while heap:
        fire, i, j = heapq.heappop(heap)
        events += 1
        if events > event_cap:
            return heights, events, None, True
        if env.coin(i, j):
            walk(i, j + 1, fire)
        else:
            walk(i + 1, j, fire)
    snap = None
    if snapshot:
        items = sorted(cluster.items())
        snap = (np.array([k[0] for k, _ in items], dtype=np.int64),
                np.array([k[1] for k, _ in items], dtype=np.int64),
                np.array([v for _, v in items], dtype=float))
    return heights, events, snap, False


def fpp_dp(a, b, t_end, N, keys, row_cap):
    env = _Env(a, b, keys, N + 1)
    inf = math.inf
    heights = np.zeros(N + 1, dtype=np.int64)
    cur = [0.0] * (N + 1)
    for n in range(1, N + 1):
        cur[n] = cur[n - 1] + (0.0 if env.coin(n - 1, 0) else env.eh(n - 1, 0))
    m = 0
    while True:
        m += 1
        if m >= row_cap:
            return heights, True
        prev = cur
        cur = [inf] * (N + 1)
        alive = False
        left = inf
        for n in range(N + 1):
            up = prev[n]
            if up <= t_end and env.coin(n, m - 1):
                up += env.ev(n, m - 1)
            elif up > t_end:
                up = inf
            if n > 0 and left <= t_end and not env.coin(n - 1, m):
                left += env.eh(n - 1, m)
            val = up if up < left else left
            cur[n] = val
            if val <= t_end:
                heights[n] = m
                alive = True
            left = val
        if not alive:
            return heights, False


def push_init(variant, param, count, key_init):
    pos = np.empty(count, dtype=float)
    p = 0.0
    for j in range(count):
        base = index_hash(key_init, j + 1)
        if variant == UNIT:
            p = float(j + 1)
        elif variant == GEOM:
            # occupied site on Z>=0 plus one
            p = (0.0 if j == 0 else p) + _incr(GEOM, param, base, 0)
        else:
            p = p + _incr(EXPO, param, base, 0)
        pos[j] = p
    return pos


def push_clocks(rate, count, key_ring):
    nxt = np.empty(count, dtype=float)
    for j in range(count):
        nxt[j] = -math.log(to_unit(bits(index_hash(key_ring, j + 1), 0))) / rate
    return nxt, np.ones(count, dtype=np.int64), np.zeros(count, dtype=np.int64)


def push_event(variant, param, rate, t_end, pos, nxt, ring_idx, jump_idx, key_ring, key_jump, check_order=False):
    count = len(pos)
    rb = [index_hash(key_ring, j + 1) for j in range(count)]
    jb = [index_hash(key_jump, j + 1) for j in range(count)]
    heap = [(nxt[j], j) for j in range(count)]
    heapq.heapify(heap)
    events = 0
    while heap and heap[0][0] <= t_end:
        tm, j = heapq.heappop(heap)
        events += 1
        pos[j] += _incr(variant, param, jb[j], jump_idx[j])
        jump_idx[j] += 1
        i = j + 1
        while i < count and pos[i - 1] >= pos[i]:
            pos[i] = pos[i - 1] + _incr(variant, param, jb[i], jump_idx[i])
            jump_idx[i] += 1
            i += 1
        if check_order and count > 1 and not np.all(np.diff(pos) > 0):
            raise AssertionError("ordering violated")
        nxt[j] = tm - math.log(to_unit(bits(rb[j], ring_idx[j]))) / rate
        ring_idx[j] += 1
        heapq.heappush(heap, (nxt[j], j))
    return events


def push_traj(variant, param, rate, t_end, pos, nxt, ring_idx, jump_idx, key_ring, key_jump):
    """Particle-by-particle recursion: each particle only needs its pusher's move list."""
    count = len(pos)
    prev_t, prev_p = [], []
    moves = 0
    for j in range(count):
        rb = index_hash(key_ring, j + 1)
        jb = index_hash(key_jump, j + 1)
        cur = pos[j]
        r = nxt[j]
        ri, ji = int(ring_idx[j]), int(jump_idx[j])
        my_t, my_p = [], []
        k = 0
        npv = len(prev_t)
        while True:
            tp = prev_t[k] if k < npv else math.inf
            if tp < r and tp <= t_end:
                if prev_p[k] >= cur:
                    cur = prev_p[k] + _incr(variant, param, jb, ji)
                    ji += 1
                    my_t.append(tp)
                    my_p.append(cur)
                k += 1
            elif r <= t_end:
                cur += _incr(variant, param, jb, ji)
                ji += 1
                my_t.append(r)
                my_p.append(cur)
                r -= math.log(to_unit(bits(rb, ri))) / rate
                ri += 1
            else:
                break
        pos[j], nxt[j], ring_idx[j], jump_idx[j] = cur, r, ri, ji
        moves += len(my_t)
        prev_t, prev_p = my_t, my_p
    return moves


def fpp_batch(method, a, b, t_end, N, col, heads, r0, r1, cap):
    out = np.zeros(r1 - r0, dtype=np.int64)
    for r in range(r0, r1):
        keys = [replica_key(h, r) for h in heads]
        if method == "dp":
            prof, flag = fpp_dp(a, b, t_end, N, keys, cap)
        else:
            prof, _, _, flag = fpp_event(a, b, t_end, N, keys, cap, False)
        if flag:
            return out, True
        out[r - r0] = prof[col]
    return out, False


def push_batch(variant, param, rate, t_end, count, heads, r0, r1):
    out = np.empty(r1 - r0, dtype=float)
    for r in range(r0, r1):
        ki, kr, kj = (replica_key(h, r) for h in heads)
        pos = push_init(variant, param, count, ki)
        nxt, ri, ji = push_clocks(rate, count, kr)
        push_traj(variant, param, rate, t_end, pos, nxt, ri, ji, kr, kj)
        out[r - r0] = pos[-1]
    return out
