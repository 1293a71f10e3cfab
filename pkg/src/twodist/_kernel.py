"""Compiled branch-and-bound kernel over packed ``uint64`` adjacency rows.

Same algorithm as the pure-Python solver in :mod:`twodist.search`: greedy
colouring bounds, branching on the highest colours first, iterative instead
of recursive.  Vertex ``v`` lives in word ``v >> 6``, bit ``v & 63``.
"""
from __future__ import annotations

import time

import numpy as np
from numba import njit, objmode

_CTZ_TABLE = np.zeros(64, dtype=np.int64)
for _i in range(64):
    _CTZ_TABLE[((1 << _i) * 0x03F79D71B4CB0A89 & (2**64 - 1)) >> 58] = _i

CHECK_INTERVAL = 4096


def pack_rows(rows: list[int], n: int) -> np.ndarray:
    words = max(1, (n + 63) // 64)
    out = np.zeros((n, words), dtype=np.uint64)
    mask = (1 << 64) - 1
    for i, r in enumerate(rows):
        for w in range(words):
            out[i, w] = (r >> (64 * w)) & mask
    return out


def pack_set(bits: int, n: int) -> np.ndarray:
    return pack_rows([bits], n)[0]


@njit(cache=True)
def _ctz(low, table):
    return table[(low * np.uint64(0x03F79D71B4CB0A89)) >> np.uint64(58)]


@njit(cache=True)
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(cache=True)
def _colour_sort(adj, p, kmin, order, colours, u, q, table):
    n_words = adj.shape[1]
    left = 0
    for w in range(n_words):
        u[w] = p[w]
        left += _popcount(p[w])
    colour = 0
    count = 0
    while left > 0:
        colour += 1
        for w in range(n_words):
            q[w] = u[w]
        for w in range(n_words):
            while q[w] != 0:
                low = q[w] & (~q[w] + np.uint64(1))
                v = w * 64 + _ctz(low, table)
                q[w] ^= low
                u[w] ^= low
                left -= 1
                for x in range(w, n_words):
                    q[x] &= ~adj[v, x]
                if colour > kmin:
                    order[count] = v
                    colours[count] = colour
                    count += 1
    return count


@njit(cache=True)
def branch_and_bound(adj, cand, base, lower, deadline, shared, table):
    """Largest clique inside ``cand`` whose size plus ``base`` exceeds ``lower``.

    ``deadline`` is an absolute ``time.perf_counter`` value (<= 0: none).
    ``shared[0]`` carries the best total size across workers.  Returns
    (clique vertices, nodes explored, completed flag); the clique is empty
    when nothing beats ``lower``.
    """
    n, n_words = adj.shape
    max_depth = 1
    for v in range(n):
        d = 0
        for w in range(n_words):
            d += _popcount(adj[v, w])
        if d + 2 > max_depth:
            max_depth = d + 2
    if max_depth > n + 1:
        max_depth = n + 1
    p = np.zeros((max_depth, n_words), dtype=np.uint64)
    order = np.zeros((max_depth, n), dtype=np.int32)
    colours = np.zeros((max_depth, n), dtype=np.int32)
    pos = np.zeros(max_depth, dtype=np.int64)
    clique = np.zeros(max_depth, dtype=np.int32)
    best_clique = np.zeros(max_depth, dtype=np.int32)
    u = np.zeros(n_words, dtype=np.uint64)
    q = np.zeros(n_words, dtype=np.uint64)
    best = lower
    best_len = 0
    nodes = 0
    completed = True

    empty = True
    for w in range(n_words):
        p[0, w] = cand[w]
        if cand[w] != 0:
            empty = False
    if empty:
        return best_clique[:0], nodes, completed
    nodes += 1
    cnt = _colour_sort(adj, p[0], best - base, order[0], colours[0], u, q, table)
    pos[0] = cnt - 1
    d = 0
    while d >= 0:
        i = pos[d]
        if i < 0 or base + d + colours[d, i] <= best:
            d -= 1
            if d >= 0:
                v = order[d, pos[d]]
                p[d, v >> 6] &= ~(np.uint64(1) << np.uint64(v & 63))
                pos[d] -= 1
            continue
        v = order[d, i]
        clique[d] = v
        nonempty = False
        for w in range(n_words):
            x = p[d, w] & adj[v, w]
            p[d + 1, w] = x
            if x != 0:
                nonempty = True
        nodes += 1
        if nodes % CHECK_INTERVAL == 0:
            if shared[0] > best:
                best = shared[0]
            if deadline > 0:
                with objmode(now="float64"):
                    now = time.perf_counter()
                if now > deadline:
                    completed = False
                    break
        if not nonempty:
            if base + d + 1 > best:
                best = base + d + 1
                best_len = d + 1
                for j in range(d + 1):
                    best_clique[j] = clique[j]
                if shared[0] < best:
                    shared[0] = best
            p[d, v >> 6] &= ~(np.uint64(1) << np.uint64(v & 63))
            pos[d] -= 1
            continue
        d += 1
        cnt = _colour_sort(adj, p[d], best - base - d, order[d], colours[d], u, q, table)
        pos[d] = cnt - 1
    return best_clique[:best_len].copy(), nodes, completed


def run(adj: np.ndarray, cand: np.ndarray, base: int, lower: int,
        deadline: float | None, shared: np.ndarray | None = None):
    if shared is None:
        shared = np.zeros(1, dtype=np.int64)
    clique, nodes, completed = branch_and_bound(
        adj, cand, base, lower, -1.0 if deadline is None else deadline, shared, _CTZ_TABLE
    )
    return [int(v) for v in clique], int(nodes), bool(completed)
