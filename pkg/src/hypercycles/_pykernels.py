"""Pure-Python implementations of the hot kernels.

Same signatures and results as the compiled ``_ckernels`` module; selected by
:mod:`hypercycles.kernels` when the extension is unavailable.
"""

from __future__ import annotations

import numpy as np

from .errors import WorkBudgetExceeded

BACKEND = "python"


def enumerate_cycles(inc_ptr, inc_idx, edge_array, n, k, budget, first_only=False):
    """All copies of the linear k-cycle, as sorted tuples of edge indexes.

    Core-path search: x_1 is the smallest core vertex, x_2 < x_k fixes the
    direction, so every copy is produced exactly once. Returns
    ``(copies, steps)``.
    """
    edges = [tuple(int(v) for v in row) for row in edge_array]
    inc = [list(inc_idx[inc_ptr[v]:inc_ptr[v + 1]]) for v in range(n)]
    used = [0] * n
    core = [0] * k
    chosen = [0] * k
    copies = []
    steps = 0

    def fits(e, allowed):
        for v in edges[e]:
            if used[v] and v not in allowed:
                return False
        return True

    def extend(i):
        # chosen[0..i-1] placed; core[i] is the current endpoint
        nonlocal steps
        x = core[i]
        if i == k - 1:
            x1 = core[0]
            if core[1] > x:
                return False
            for e in inc[x]:
                steps += 1
                if x1 in edges[e] and fits(e, (x, x1)):
                    chosen[i] = e
                    copies.append(tuple(sorted(chosen)))
                    if first_only:
                        return True
            return False
        for e in inc[x]:
            steps += 1
            if steps > budget:
                raise WorkBudgetExceeded(
                    f"cycle enumeration exceeded {budget} partial extensions",
                    steps=steps, partial=copies)
            if not fits(e, (x,)):
                continue
            for v in edges[e]:
                used[v] += 1
            chosen[i] = e
            for y in edges[e]:
                if y != x and y > core[0]:
                    core[i + 1] = y
                    if extend(i + 1):
                        return True
            for v in edges[e]:
                used[v] -= 1
        return False

    for x1 in range(n):
        core[0] = x1
        used[x1] += 1
        found = extend(0)
        used[x1] -= 1
        if found:
            break
    return copies, steps


def _popcount(x):
    return bin(x).count("1")


def _greedy_packing(alive, allowed):
    union = 0
    count = 0
    for c in alive:
        part = c & allowed
        if part & union == 0:
            union |= part
            count += 1
    return count


def min_hitting_set(copy_masks, m, node_budget):
    """Minimum set of ground elements meeting every copy mask.

    Branch on the element of largest multiplicity among un-hit copies
    (include, then exclude); prune with a greedy pairwise-disjoint packing.
    Returns ``(size, mask, nodes, complete)``.
    """
    copies = [int(c) for c in copy_masks]
    full = (1 << m) - 1

    # initial incumbent: greedy max-multiplicity hitting set
    best_mask = 0
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
        best_mask |= 1 << top
        rest = [c for c in rest if not c >> top & 1]
    best = [_popcount(best_mask), best_mask]
    nodes = 0
    complete = True

    def search(chosen, nchosen, allowed, alive):
        nonlocal nodes, complete
        nodes += 1
        if nodes > node_budget:
            complete = False
            return
        if not alive:
            if nchosen < best[0]:
                best[0], best[1] = nchosen, chosen
            return
        for c in alive:
            if c & allowed == 0:
                return
        if nchosen + _greedy_packing(alive, allowed) >= best[0]:
            return
        counts = [0] * m
        for c in alive:
            x = c & allowed
            while x:
                low = x & -x
                counts[low.bit_length() - 1] += 1
                x ^= low
        top = max(range(m), key=lambda i: (counts[i], -i))
        bit = 1 << top
        search(chosen | bit, nchosen + 1, allowed & ~bit, [c for c in alive if not c & bit])
        if not complete:
            return
        search(chosen, nchosen, allowed & ~bit, alive)

    if copies:
        search(0, 0, full, copies)
    return best[0], best[1], nodes, complete


def _mask_array(masks):
    return np.array([int(c) for c in masks], dtype=np.uint64)


def _free_flags(copy_masks, m):
    subsets = np.arange(1 << m, dtype=np.uint64)
    free = np.ones(1 << m, dtype=bool)
    for c in _mask_array(copy_masks):
        free &= (subsets & c) != c
    return subsets, free


def free_subset_stats(copy_masks, m):
    """Scan all ``2**m`` subsets; return ``(max_free_size, a_max_mask, free_count)``."""
    subsets, free = _free_flags(copy_masks, m)
    sizes = np.zeros(1 << m, dtype=np.int64)
    for b in range(m):
        sizes += ((subsets >> np.uint64(b)) & np.uint64(1)).astype(np.int64)
    sizes[~free] = -1
    best = int(np.argmax(sizes))
    return int(sizes[best]), best, int(free.sum())


def coverage_violations(copy_masks, container_masks, m):
    """Count copy-free subsets of ``0..m-1`` not inside any container.

    Returns ``(violations, first_violation_or_-1, free_count)``.
    """
    subsets, free = _free_flags(copy_masks, m)
    covered = np.zeros(1 << m, dtype=bool)
    for c in _mask_array(container_masks):
        covered |= (subsets & ~c) == 0
    bad = np.flatnonzero(free & ~covered)
    first = int(bad[0]) if len(bad) else -1
    return int(len(bad)), first, int(free.sum())
