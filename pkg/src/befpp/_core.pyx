# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernels; mirrors _pykernels draw for draw."""
from libc.math cimport log, floor, INFINITY
from libc.stdint cimport uint64_t, int64_t
from libcpp.vector cimport vector
from libcpp.queue cimport priority_queue
from libcpp.pair cimport pair
from libcpp.unordered_map cimport unordered_map

import numpy as np

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t C_INDEX = 0xD1B54A32D192ED03ULL
cdef uint64_t C_COUNTER = 0x8CB92BA72F3D8DD7ULL
cdef double INV53 = 1.0 / 9007199254740992.0
cdef int64_t LOW32 = 0xFFFFFFFF

DEF GEOM = 0
DEF UNIT = 1
DEF EXPO = 2


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t index_hash(uint64_t key, int64_t i) noexcept nogil:
    return mix64(key ^ mix64(<uint64_t>i * GOLDEN + C_INDEX))


cdef inline double unit(uint64_t base, int64_t k) noexcept nogil:
    cdef uint64_t x = mix64(base ^ mix64(<uint64_t>k + C_COUNTER))
    return (<double>(x >> 11) + 0.5) * INV53


cdef inline double incr(int variant, double param, uint64_t base, int64_t k) noexcept nogil:
    cdef double u
    if variant == UNIT:
        return 1.0
    u = unit(base, k)
    if variant == GEOM:
        if param == -INFINITY:
            return 1.0
        return 1.0 + floor(log(u) / param)
    return -log(u) / param


cdef class _Env:
    cdef vector[uint64_t] cb, vb, hb
    cdef double a, b, p_east

    def __cinit__(self, double a, double b, keys, int64_t ncols):
        self.a = a
        self.b = b
        self.p_east = b / (a + b)
        self.cb.resize(ncols)
        self.vb.resize(ncols)
        self.hb.resize(ncols)
        self.reset(<uint64_t>keys[0], <uint64_t>keys[1], <uint64_t>keys[2])

    cdef void reset(self, uint64_t kc, uint64_t kv, uint64_t kh) noexcept nogil:
        cdef int64_t i
        for i in range(<int64_t>self.cb.size()):
            self.cb[i] = index_hash(kc, i)
            self.vb[i] = index_hash(kv, i)
            self.hb[i] = index_hash(kh, i)

    cdef inline bint coin(self, int64_t i, int64_t j) noexcept nogil:
        return unit(self.cb[i], j) < self.p_east

    cdef inline double ev(self, int64_t i, int64_t j) noexcept nogil:
        return -log(unit(self.vb[i], j)) / self.a

    cdef inline double eh(self, int64_t i, int64_t j) noexcept nogil:
        return -log(unit(self.hb[i], j)) / self.b


ctypedef pair[double, int64_t] Item


cdef inline int64_t vkey(int64_t i, int64_t j) noexcept nogil:
    return (i << 32) | j


cdef void _walk(_Env env, int64_t i, int64_t j, double tau, int64_t N, double t_end,
                unordered_map[int64_t, double]& cluster, priority_queue[Item]& heap,
                int64_t[:] heights) noexcept nogil:
    cdef double fire
    while i <= N and cluster.count(vkey(i, j)) == 0:
        cluster[vkey(i, j)] = tau
        if j > heights[i]:
            heights[i] = j
        if env.coin(i, j):
            fire = tau + env.ev(i, j)
            if fire <= t_end:
                heap.push(Item(-fire, vkey(i, j)))
            i += 1
        else:
            if i < N:
                fire = tau + env.eh(i, j)
                if fire <= t_end:
                    heap.push(Item(-fire, vkey(i, j)))
            j += 1


cdef int64_t _event_run(_Env env, int64_t N, double t_end, int64_t event_cap,
                        unordered_map[int64_t, double]& cluster, priority_queue[Item]& heap,
                        int64_t[:] heights) noexcept nogil:
    """Grow the cluster to t_end; returns the event count, or -1 when the cap is hit."""
    cdef int64_t events = 0, code, i, j
    cdef double fire
    cluster.clear()
    while not heap.empty():
        heap.pop()
    for i in range(N + 1):
        heights[i] = -1
    _walk(env, 0, 0, 0.0, N, t_end, cluster, heap, heights)
    while not heap.empty():
        fire = -heap.top().first
        code = heap.top().second
        heap.pop()
        events += 1
        if events > event_cap:
            return -1
        i = code >> 32
        j = code & LOW32
        if env.coin(i, j):
            _walk(env, i, j + 1, fire, N, t_end, cluster, heap, heights)
        else:
            _walk(env, i + 1, j, fire, N, t_end, cluster, heap, heights)
    return events


def fpp_event(double a, double b, double t_end, int64_t N, keys, int64_t event_cap, bint snapshot):
    cdef _Env env = _Env(a, b, keys, N + 2)
    cdef unordered_map[int64_t, double] cluster
    cdef priority_queue[Item] heap
    heights_arr = np.full(N + 1, -1, dtype=np.int64)
    cdef int64_t[:] heights = heights_arr
    cdef int64_t events
    with nogil:
        events = _event_run(env, N, t_end, event_cap, cluster, heap, heights)
    if events < 0:
        return heights_arr, event_cap + 1, None, True
    snap = None
    if snapshot:
        xs = np.empty(cluster.size(), dtype=np.int64)
        ys = np.empty(cluster.size(), dtype=np.int64)
        ts = np.empty(cluster.size(), dtype=float)
        k = 0
        for kv in cluster:
            xs[k] = kv.first >> 32
            ys[k] = kv.first & LOW32
            ts[k] = kv.second
            k += 1
        order = np.lexsort((ys, xs))
        snap = (xs[order], ys[order], ts[order])
    return heights_arr, events, snap, False


cdef bint _dp_run(_Env env, int64_t N, double t_end, int64_t row_cap,
                  vector[double]& prev, vector[double]& cur, int64_t[:] heights) noexcept nogil:
    """Row-by-row passage times; returns True when the row cap was hit."""
    cdef int64_t n, m = 0
    cdef double up, left, val
    cdef bint alive
    for n in range(N + 1):
        heights[n] = 0
    cur[0] = 0.0
    for n in range(1, N + 1):
        cur[n] = cur[n - 1] + (0.0 if env.coin(n - 1, 0) else env.eh(n - 1, 0))
    while True:
        m += 1
        if m >= row_cap:
            return True
        prev.swap(cur)
        alive = False
        left = INFINITY
        for n in range(N + 1):
            up = prev[n]
            if up <= t_end and env.coin(n, m - 1):
                up += env.ev(n, m - 1)
            elif up > t_end:
                up = INFINITY
            if n > 0 and left <= t_end and not env.coin(n - 1, m):
                left += env.eh(n - 1, m)
            val = up if up < left else left
            cur[n] = val
            if val <= t_end:
                heights[n] = m
                alive = True
            left = val
        if not alive:
            return False


def fpp_dp(double a, double b, double t_end, int64_t N, keys, int64_t row_cap):
    cdef _Env env = _Env(a, b, keys, N + 1)
    heights_arr = np.zeros(N + 1, dtype=np.int64)
    cdef int64_t[:] heights = heights_arr
    cdef vector[double] prev, cur
    cdef bint truncated
    cur.resize(N + 1)
    prev.resize(N + 1)
    with nogil:
        truncated = _dp_run(env, N, t_end, row_cap, prev, cur, heights)
    return heights_arr, truncated


cdef inline uint64_t replica_key(uint64_t h0, int64_t r) noexcept nogil:
    return mix64(h0 ^ mix64(<uint64_t>r + C_INDEX))


def fpp_batch(str method, double a, double b, double t_end, int64_t N, int64_t col, heads,
              int64_t r0, int64_t r1, int64_t cap):
    """Height at column ``col`` for replicas r0..r1-1; ``heads`` are per-label stream heads.

    Returns (heights, flag) where flag marks a hit event or row cap.
    """
    cdef uint64_t hc = <uint64_t>heads[0], hv = <uint64_t>heads[1], hh = <uint64_t>heads[2]
    cdef _Env env = _Env(a, b, (0, 0, 0), N + 2)
    cdef unordered_map[int64_t, double] cluster
    cdef priority_queue[Item] heap
    cdef vector[double] prev, cur
    prof_arr = np.zeros(N + 1, dtype=np.int64)
    cdef int64_t[:] prof = prof_arr
    out_arr = np.zeros(r1 - r0, dtype=np.int64)
    cdef int64_t[:] out = out_arr
    cdef int64_t r
    cdef bint use_dp = method == "dp", flag = False
    cur.resize(N + 1)
    prev.resize(N + 1)
    with nogil:
        for r in range(r0, r1):
            env.reset(replica_key(hc, r), replica_key(hv, r), replica_key(hh, r))
            if use_dp:
                if _dp_run(env, N, t_end, cap, prev, cur, prof):
                    flag = True
                    break
            else:
                if _event_run(env, N, t_end, cap, cluster, heap, prof) < 0:
                    flag = True
                    break
            out[r - r0] = prof[col]
    return out_arr, flag


def push_init(int variant, double param, int64_t count, uint64_t key_init):
    pos_arr = np.empty(count, dtype=float)
    cdef double[:] pos = pos_arr
    with nogil:
        _init_run(variant, param, key_init, pos)
    return pos_arr


cdef void _init_run(int variant, double param, uint64_t key_init, double[:] pos) noexcept nogil:
    cdef double p = 0.0
    cdef int64_t j
    for j in range(pos.shape[0]):
        if variant == UNIT:
            p = <double>(j + 1)
        else:
            p = p + incr(variant, param, index_hash(key_init, j + 1), 0)
        pos[j] = p


cdef void _clock_run(double rate, uint64_t key_ring, double[:] nxt, int64_t[:] ri, int64_t[:] ji) noexcept nogil:
    cdef int64_t j
    for j in range(nxt.shape[0]):
        nxt[j] = -log(unit(index_hash(key_ring, j + 1), 0)) / rate
        ri[j] = 1
        ji[j] = 0


def push_clocks(double rate, int64_t count, uint64_t key_ring):
    nxt_arr = np.empty(count, dtype=float)
    ri_arr = np.empty(count, dtype=np.int64)
    ji_arr = np.empty(count, dtype=np.int64)
    cdef double[:] nxt = nxt_arr
    cdef int64_t[:] ri = ri_arr
    cdef int64_t[:] ji = ji_arr
    with nogil:
        _clock_run(rate, key_ring, nxt, ri, ji)
    return nxt_arr, ri_arr, ji_arr


ctypedef pair[double, int64_t] Ring


def push_event(int variant, double param, double rate, double t_end, double[:] pos, double[:] nxt,
               int64_t[:] ring_idx, int64_t[:] jump_idx, uint64_t key_ring, uint64_t key_jump,
               bint check_order=False):
    cdef int64_t count = pos.shape[0]
    cdef vector[uint64_t] rb, jb
    cdef priority_queue[Ring] heap
    cdef int64_t j, i, events = 0
    cdef double tm
    cdef bint bad = False
    for j in range(count):
        rb.push_back(index_hash(key_ring, j + 1))
        jb.push_back(index_hash(key_jump, j + 1))
    with nogil:
        for j in range(count):
            heap.push(Ring(-nxt[j], -j))
        while not heap.empty() and -heap.top().first <= t_end:
            tm = -heap.top().first
            j = -heap.top().second
            heap.pop()
            events += 1
            pos[j] += incr(variant, param, jb[j], jump_idx[j])
            jump_idx[j] += 1
            i = j + 1
            while i < count and pos[i - 1] >= pos[i]:
                pos[i] = pos[i - 1] + incr(variant, param, jb[i], jump_idx[i])
                jump_idx[i] += 1
                i += 1
            if check_order:
                for i in range(1, count):
                    if pos[i] <= pos[i - 1]:
                        bad = True
                if bad:
                    break
            nxt[j] = tm - log(unit(rb[j], ring_idx[j])) / rate
            ring_idx[j] += 1
            heap.push(Ring(-nxt[j], -j))
    if bad:
        raise AssertionError("ordering violated")
    return events


cdef int64_t _traj_run(int variant, double param, double rate, double t_end, double[:] pos, double[:] nxt,
                       int64_t[:] ring_idx, int64_t[:] jump_idx, uint64_t key_ring, uint64_t key_jump,
                       vector[double]& prev_t, vector[double]& prev_p,
                       vector[double]& my_t, vector[double]& my_p) noexcept nogil:
    cdef int64_t count = pos.shape[0]
    cdef int64_t j, k, npv, ri, ji, moves = 0
    cdef uint64_t rb, jb
    cdef double cur, r, tp
    prev_t.clear()
    prev_p.clear()
    for j in range(count):
        rb = index_hash(key_ring, j + 1)
        jb = index_hash(key_jump, j + 1)
        cur = pos[j]
        r = nxt[j]
        ri = ring_idx[j]
        ji = jump_idx[j]
        my_t.clear()
        my_p.clear()
        k = 0
        npv = prev_t.size()
        while True:
            tp = prev_t[k] if k < npv else INFINITY
            if tp < r and tp <= t_end:
                if prev_p[k] >= cur:
                    cur = prev_p[k] + incr(variant, param, jb, ji)
                    ji += 1
                    my_t.push_back(tp)
                    my_p.push_back(cur)
                k += 1
            elif r <= t_end:
                cur += incr(variant, param, jb, ji)
                ji += 1
                my_t.push_back(r)
                my_p.push_back(cur)
                r -= log(unit(rb, ri)) / rate
                ri += 1
            else:
                break
        pos[j] = cur
        nxt[j] = r
        ring_idx[j] = ri
        jump_idx[j] = ji
        moves += my_t.size()
        prev_t.swap(my_t)
        prev_p.swap(my_p)
    return moves


def push_traj(int variant, double param, double rate, double t_end, double[:] pos, double[:] nxt,
              int64_t[:] ring_idx, int64_t[:] jump_idx, uint64_t key_ring, uint64_t key_jump):
    cdef vector[double] a, b, c, d
    cdef int64_t moves
    with nogil:
        moves = _traj_run(variant, param, rate, t_end, pos, nxt, ring_idx, jump_idx,
                          key_ring, key_jump, a, b, c, d)
    return moves


def push_batch(int variant, double param, double rate, double t_end, int64_t count, heads,
               int64_t r0, int64_t r1):
    """Final position of the last of ``count`` particles for replicas r0..r1-1."""
    cdef uint64_t hi = <uint64_t>heads[0], hr = <uint64_t>heads[1], hj = <uint64_t>heads[2]
    pos_arr = np.empty(count, dtype=float)
    nxt_arr = np.empty(count, dtype=float)
    ri_arr = np.empty(count, dtype=np.int64)
    ji_arr = np.empty(count, dtype=np.int64)
    cdef double[:] pos = pos_arr
    cdef double[:] nxt = nxt_arr
    cdef int64_t[:] ri = ri_arr
    cdef int64_t[:] ji = ji_arr
    out_arr = np.empty(r1 - r0, dtype=float)
    cdef double[:] out = out_arr
    cdef vector[double] a, b, c, d
    cdef int64_t r
    cdef uint64_t kr
    with nogil:
        for r in range(r0, r1):
            _init_run(variant, param, replica_key(hi, r), pos)
            kr = replica_key(hr, r)
            _clock_run(rate, kr, nxt, ri, ji)
            _traj_run(variant, param, rate, t_end, pos, nxt, ri, ji, kr, replica_key(hj, r), a, b, c, d)
            out[r - r0] = pos[count - 1]
    return out_arr
