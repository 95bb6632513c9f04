"""Brute-force reference implementations, independent of the library's search code."""

from itertools import combinations, permutations

import numpy as np


def cyclic_order_ok(edges, r):
    """Some cyclic order has consecutive edges meeting in one vertex, others disjoint."""
    k = len(edges)
    sets = [frozenset(e) for e in edges]
    if len(set().union(*sets)) != k * (r - 1):
        return False
    first, rest = 0, range(1, k)
    for perm in permutations(rest):
        order = (first, *perm)
        if perm and perm[0] > perm[-1]:
            continue  # reflection already tried
        good = True
        for i in range(k):
            for j in range(i + 1, k):
                common = len(sets[order[i]] & sets[order[j]])
                adjacent = j == i + 1 or (i == 0 and j == k - 1)
                if common != (1 if adjacent else 0):
                    good = False
                    break
            if not good:
                break
        if good:
            return True
    return False


def cycle_copies(edges, r, k):
    """All k-subsets of edge indexes forming a linear cycle: vertex-count filter, then order search."""
    e = len(edges)
    if e < k:
        return set()
    vmask = np.array([sum(1 << v for v in ed) for ed in edges], dtype=np.int64)
    combos = np.array(list(combinations(range(e), k)), dtype=np.int64)
    union = np.bitwise_or.reduce(vmask[combos], axis=1)
    counts = np.array([bin(int(u)).count("1") for u in union])
    keep = combos[counts == k * (r - 1)]
    return {tuple(int(i) for i in c) for c in keep if cyclic_order_ok([edges[i] for i in c], r)}


def _popcount(a):
    a = a.copy()
    c = np.zeros(a.shape, dtype=np.int64)
    while a.any():
        c += (a & np.uint64(1)).astype(np.int64)
        a >>= np.uint64(1)
    return c


def free_mask_array(copy_masks, m):
    subs = np.arange(1 << m, dtype=np.uint64)
    free = np.ones(len(subs), dtype=bool)
    for c in copy_masks:
        c = np.uint64(c)
        free &= (subs & c) != c
    return subs, free


def max_free_subset(copy_masks, m):
    """Largest subset of ``0..m-1`` containing no copy, by scanning all ``2^m``."""
    subs, free = free_mask_array(copy_masks, m)
    return int(_popcount(subs[free]).max())


def uncovered_free_subsets(copy_masks, container_masks, m):
    subs, free = free_mask_array(copy_masks, m)
    subs = subs[free]
    covered = np.zeros(len(subs), dtype=bool)
    for c in container_masks:
        covered |= (subs & ~np.uint64(c)) == 0
    return int(free.sum()), subs[~covered]


def random_edges(rng, n, r, e):
    """``e`` distinct random r-subsets of ``range(n)``."""
    pool = list(combinations(range(n), r))
    e = min(e, len(pool))
    pick = rng.choice(len(pool), size=e, replace=False)
    return [pool[i] for i in sorted(pick)]
