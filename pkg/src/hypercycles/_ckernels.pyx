# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Mirrors ``_pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free
from libc.string cimport memset

from .errors import WorkBudgetExceeded

ctypedef unsigned long long u64

BACKEND = "cython"

cnp.import_array()


cdef struct CycleState:
    int n
    int k
    int r
    const int *ptr
    const int *idx
    const int *edges
    int *used
    int *core
    int *chosen
    long long steps
    long long budget
    bint first_only
    bint over


cdef inline bint _fits(CycleState *s, int e, int a, int b) nogil:
    cdef int t, v
    for t in range(s.r):
        v = s.edges[e * s.r + t]
        if s.used[v] and v != a and v != b:
            return False
    return True


cdef inline bint _contains(CycleState *s, int e, int x) nogil:
    cdef int t
    for t in range(s.r):
        if s.edges[e * s.r + t] == x:
            return True
    return False


cdef int _extend(CycleState *s, int i, list out) except -1:
    cdef int x = s.core[i]
    cdef int x1 = s.core[0]
    cdef int p, e, t, v, y
    if i == s.k - 1:
        if s.core[1] > x:
            return False
        for p in range(s.ptr[x], s.ptr[x + 1]):
            e = s.idx[p]
            s.steps += 1
            if _contains(s, e, x1) and _fits(s, e, x, x1):
                s.chosen[i] = e
                out.append(tuple(sorted([s.chosen[t] for t in range(s.k)])))
                if s.first_only:
                    return True
        return False
    for p in range(s.ptr[x], s.ptr[x + 1]):
        e = s.idx[p]
        s.steps += 1
        if s.steps > s.budget:
            s.over = True
            return True
        if not _fits(s, e, x, x):
            continue
        for t in range(s.r):
            s.used[s.edges[e * s.r + t]] += 1
        s.chosen[i] = e
        for t in range(s.r):
            y = s.edges[e * s.r + t]
            if y != x and y > x1:
                s.core[i + 1] = y
                if _extend(s, i + 1, out):
                    return True
        for t in range(s.r):
            s.used[s.edges[e * s.r + t]] -= 1
    return False


def enumerate_cycles(inc_ptr, inc_idx, edge_array, int n, int k, long long budget,
                     bint first_only=False):
    cdef cnp.ndarray[int, ndim=1, mode="c"] ptr = np.ascontiguousarray(inc_ptr, dtype=np.intc)
    cdef cnp.ndarray[int, ndim=1, mode="c"] idx = np.ascontiguousarray(inc_idx, dtype=np.intc)
    cdef cnp.ndarray[int, ndim=2, mode="c"] edges = np.ascontiguousarray(edge_array, dtype=np.intc)
    cdef CycleState s
    cdef list out = []
    cdef int x1
    s.n = n
    s.k = k
    s.r = edges.shape[1] if edges.shape[0] else 1
    s.ptr = <const int *> ptr.data
    s.idx = <const int *> idx.data
    s.edges = <const int *> edges.data
    s.steps = 0
    s.budget = budget
    s.first_only = first_only
    s.over = False
    s.used = <int *> malloc(max(n, 1) * sizeof(int))
    s.core = <int *> malloc(k * sizeof(int))
    s.chosen = <int *> malloc(k * sizeof(int))
    memset(s.used, 0, max(n, 1) * sizeof(int))
    try:
        if edges.shape[0]:
            for x1 in range(n):
                s.core[0] = x1
                s.used[x1] += 1
                found = _extend(&s, 0, out)
                s.used[x1] -= 1
                if found:
                    break
    finally:
        free(s.used)
        free(s.core)
        free(s.chosen)
    if s.over:
        raise WorkBudgetExceeded(
            f"cycle enumeration exceeded {budget} partial extensions",
            steps=s.steps, partial=out)
    return out, s.steps


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef inline int _popcount(u64 x) nogil:
    return __builtin_popcountll(x)


cdef struct HSState:
    int m
    int ncopies
    u64 *alive      # ncopies * (depth+1) workspace
    int *counts
    int best
    u64 best_mask
    long long nodes
    long long budget
    bint complete


cdef int _packing(u64 *alive, int nalive, u64 allowed) nogil:
    cdef u64 union = 0, part
    cdef int t, count = 0
    for t in range(nalive):
        part = alive[t] & allowed
        if part & union == 0:
            union |= part
            count += 1
    return count


cdef void _hs_search(HSState *s, int depth, u64 chosen, int nchosen, u64 allowed,
                     int nalive) nogil:
    cdef u64 *alive = s.alive + <long long> depth * s.ncopies
    cdef u64 *nxt = s.alive + <long long> (depth + 1) * s.ncopies
    cdef int t, b, top, cnt, nnext
    cdef u64 x, bit
    s.nodes += 1
    if s.nodes > s.budget:
        s.complete = False
        return
    if nalive == 0:
        if nchosen < s.best:
            s.best = nchosen
            s.best_mask = chosen
        return
    for t in range(nalive):
        if alive[t] & allowed == 0:
            return
    if nchosen + _packing(alive, nalive, allowed) >= s.best:
        return
    for b in range(s.m):
        s.counts[b] = 0
    for t in range(nalive):
        x = alive[t] & allowed
        while x:
            s.counts[__builtin_ctzll(x)] += 1
            x &= x - 1
    top = 0
    cnt = -1
    for b in range(s.m):
        if s.counts[b] > cnt:
            cnt = s.counts[b]
            top = b
    bit = (<u64> 1) << top
    nnext = 0
    for t in range(nalive):
        if alive[t] & bit == 0:
            nxt[nnext] = alive[t]
            nnext += 1
    _hs_search(s, depth + 1, chosen | bit, nchosen + 1, allowed & ~bit, nnext)
    if not s.complete:
        return
    for t in range(nalive):
        nxt[t] = alive[t]
    _hs_search(s, depth + 1, chosen, nchosen, allowed & ~bit, nalive)


def min_hitting_set(copy_masks, int m, long long node_budget):
    if m > 64:
        raise ValueError("at most 64 ground elements")
    cdef list copies = [int(c) for c in copy_masks]
    cdef int nc = len(copies)
    cdef HSState s
    cdef int t
    cdef u64 full = (~(<u64> 0)) if m == 64 else (((<u64> 1) << m) - 1)
    cdef u64 best_mask = 0
    # greedy incumbent, identical to the Python fallback
    rest = list(copies)
    while rest:
        counts = [0] * m
        for c in rest:
            x = c
            while x:
                low = x & -x
                counts[low.bit_length() - 1] += 1
                x ^= low
        top = max(range(m), key=lambda i: (counts[i], -i))
        best_mask |= (<u64> 1) << top
        rest = [c for c in rest if not c >> top & 1]
    s.m = m
    s.ncopies = max(nc, 1)
    s.best = _popcount(best_mask)
    s.best_mask = best_mask
    s.nodes = 0
    s.budget = node_budget
    s.complete = True
    if nc == 0:
        return s.best, int(s.best_mask), 0, True
    s.alive = <u64 *> malloc(<long long> (m + 2) * s.ncopies * sizeof(u64))
    s.counts = <int *> malloc(m * sizeof(int))
    try:
        for t in range(nc):
            s.alive[t] = <u64> copies[t]
        with nogil:
            _hs_search(&s, 0, 0, 0, full, nc)
    finally:
        free(s.alive)
        free(s.counts)
    return s.best, int(s.best_mask), s.nodes, bool(s.complete)


def free_subset_stats(copy_masks, int m):
    if m > 40:
        raise ValueError("exhaustive scan limited to 40 ground elements")
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] arr = np.array([int(c) for c in copy_masks], dtype=np.uint64)
    cdef u64 *cm = <u64 *> arr.data
    cdef int nc = arr.shape[0]
    cdef u64 sub, top = (<u64> 1) << m, best_mask = 0
    cdef int t, pc, best = -1
    cdef long long count = 0
    cdef bint ok
    with nogil:
        sub = 0
        while sub < top:
            ok = True
            for t in range(nc):
                if sub & cm[t] == cm[t]:
                    ok = False
                    break
            if ok:
                count += 1
                pc = _popcount(sub)
                if pc > best:
                    best = pc
                    best_mask = sub
            sub += 1
    return best, int(best_mask), count


def coverage_violations(copy_masks, container_masks, int m):
    if m > 40:
        raise ValueError("exhaustive scan limited to 40 ground elements")
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] carr = np.array([int(c) for c in copy_masks], dtype=np.uint64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] karr = np.array([int(c) for c in container_masks], dtype=np.uint64)
    cdef u64 *cm = <u64 *> carr.data
    cdef u64 *km = <u64 *> karr.data
    cdef int nc = carr.shape[0], nk = karr.shape[0]
    cdef u64 sub, top = (<u64> 1) << m
    cdef long long first = -1, bad = 0, count = 0
    cdef int t
    cdef bint ok, cov
    with nogil:
        sub = 0
        while sub < top:
            ok = True
            for t in range(nc):
                if sub & cm[t] == cm[t]:
                    ok = False
                    break
            if ok:
                count += 1
                cov = False
                for t in range(nk):
                    if sub & ~km[t] == 0:
                        cov = True
                        break
                if not cov:
                    bad += 1
                    if first < 0:
                        first = <long long> sub
            sub += 1
    return bad, first, count
