"""Linear cycles ``C_k^(r)``: construction, detection, enumeration and extension."""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import PreconditionError, WorkBudgetExceeded
from .hypergraph import Hypergraph, HypergraphError

DEFAULT_WORK_BUDGET = 10**8
BUDGET_ENV = "HYPERCYCLES_WORK_BUDGET"


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(float(raw)) if raw else DEFAULT_WORK_BUDGET


@dataclass(frozen=True)
class CycleTemplate:
    """The abstract linear cycle on ``k(r-1)`` vertices.

    Core vertices are ``0..k-1`` (edge i holds cores i and i+1 mod k); the
    pendants of edge i are ``k + i(r-2) .. k + (i+1)(r-2) - 1``.
    """

    k: int
    r: int

    def __post_init__(self):
        if self.k < 3 or self.r < 2:
            raise PreconditionError(f"need k >= 3 and r >= 2, got k={self.k}, r={self.r}")

    @property
    def num_vertices(self) -> int:
        return self.k * (self.r - 1)

    @property
    def edges(self) -> list[tuple[int, ...]]:
        k, r = self.k, self.r
        out = []
        for i in range(k):
            pend = range(k + i * (r - 2), k + (i + 1) * (r - 2))
            out.append(tuple(sorted((i, (i + 1) % k, *pend))))
        return out

    def hypergraph(self, n: int | None = None) -> Hypergraph:
        return Hypergraph(self.r, n or self.num_vertices, self.edges)


def is_linear_cycle(edges: Iterable[Iterable[int]], r: int) -> bool:
    """True iff the edges form one copy of ``C_k^(r)`` with ``k = len(edges) >= 3``.

    Checks: every vertex lies in at most two edges, every two edges share at
    most one vertex, and the "shares a vertex" relation is a single k-cycle.
    Those force exactly k degree-two vertices, hence ``k(r-1)`` vertices.
    """
    es = [frozenset(e) for e in edges]
    k = len(es)
    if k < 3 or len(set(es)) != k or any(len(e) != r for e in es):
        return False
    deg = Counter(v for e in es for v in e)
    if any(d > 2 for d in deg.values()):
        return False
    nbrs: list[list[int]] = [[] for _ in range(k)]
    for a, b in combinations(range(k), 2):
        common = len(es[a] & es[b])
        if common > 1:
            return False
        if common == 1:
            nbrs[a].append(b)
            nbrs[b].append(a)
    if any(len(nb) != 2 for nb in nbrs):
        return False
    # 2-regular: connected iff one cycle through all k edges
    prev, cur, steps = 0, nbrs[0][0], 1
    while cur != 0:
        prev, cur = cur, nbrs[cur][0] if nbrs[cur][0] != prev else nbrs[cur][1]
        steps += 1
    return steps == k and len(deg) == k * (r - 1)


def core_cycle(edges: Sequence[Sequence[int]]) -> list[int]:
    """Core vertices of a linear cycle in canonical cyclic order.

    Starts at the smallest core vertex and walks toward its smaller core
    neighbour.
    """
    es = [tuple(e) for e in edges]
    deg = Counter(v for e in es for v in e)
    cores = sorted(v for v, d in deg.items() if d == 2)
    adj: dict[int, list[int]] = {v: [] for v in cores}
    for e in es:
        c = [v for v in e if deg[v] == 2]
        if len(c) != 2:
            raise ValueError("edges are not a linear cycle")
        adj[c[0]].append(c[1])
        adj[c[1]].append(c[0])
    start = cores[0]
    order = [start]
    prev, cur = start, min(adj[start])
    while cur != start:
        order.append(cur)
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
        prev, cur = cur, nxt
    return order


@dataclass
class CycleFamily:
    """A set of copies of ``C_k^(r)`` in ``host``.

    Each copy is a sorted tuple of k canonical edge indexes of the host.
    """

    host: Hypergraph
    k: int
    copies: list[tuple[int, ...]] = field(default_factory=list)
    steps: int = 0

    def __len__(self) -> int:
        return len(self.copies)

    def __iter__(self):
        return iter(self.copies)

    def __contains__(self, copy) -> bool:
        return tuple(sorted(copy)) in self.copy_set

    @cached_property
    def copy_set(self) -> frozenset:
        return frozenset(self.copies)

    def copy_edges(self, copy: Sequence[int]) -> list[tuple[int, ...]]:
        return [self.host.edges[i] for i in copy]

    def multiplicity(self, j: int) -> Counter:
        """``d_F(sigma)`` for every j-subset sigma of host edges with positive count."""
        if not 1 <= j <= self.k:
            raise PreconditionError(f"j must be in 1..{self.k}")
        cache = self.__dict__.setdefault("_mult", {})
        if j not in cache:
            counts: Counter = Counter()
            for c in self.copies:
                counts.update(combinations(c, j))
            cache[j] = counts
        return cache[j]

    def max_degree(self, j: int) -> int:
        """``Delta_j(F)``."""
        return max(self.multiplicity(j).values(), default=0)

    def masks(self) -> list[int]:
        return [sum(1 << i for i in c) for c in self.copies]

    def to_text(self) -> str:
        return "".join(" ".join(map(str, c)) + "\n" for c in self.copies)

    @classmethod
    def from_text(cls, host: Hypergraph, k: int, text: str) -> "CycleFamily":
        copies = []
        for line in text.splitlines():
            if line.strip():
                c = tuple(sorted(int(x) for x in line.split()))
                if len(c) != k or c[-1] >= len(host.edges):
                    raise HypergraphError(f"bad copy line {line!r}")
                copies.append(c)
        return cls(host, k, sorted(set(copies)))


def _csr(G: Hypergraph) -> tuple[np.ndarray, np.ndarray]:
    inc = G.incidence
    ptr = np.zeros(G.n + 1, dtype=np.intc)
    ptr[1:] = np.cumsum([len(x) for x in inc]) if G.n else []
    idx = np.fromiter((i for lst in inc for i in lst), dtype=np.intc, count=int(ptr[-1]))
    return ptr, idx


def enumerate_cycles(G: Hypergraph, k: int, budget: int | None = None) -> CycleFamily:
    """Every copy of ``C_k^(r)`` in G, deduplicated by edge set.

    Raises :class:`WorkBudgetExceeded` once more than ``budget`` partial
    extensions were tried; the exception carries the copies found so far.
    """
    if k < 3:
        raise PreconditionError(f"cycle length must be >= 3, got {k}")
    budget = default_budget() if budget is None else budget
    if len(G.edges) < k:
        return CycleFamily(G, k, [], 0)
    ptr, idx = _csr(G)
    try:
        copies, steps = kernels.enumerate_cycles(ptr, idx, G.edge_array, G.n, k, budget, False)
    except WorkBudgetExceeded as exc:
        exc.estimate = estimate_work(G, k)
        exc.partial = sorted(exc.partial)
        raise
    copies.sort()
    return CycleFamily(G, k, copies, steps)


def estimate_work(G: Hypergraph, k: int) -> float:
    """Crude upper estimate of partial extensions: ``n * (r * Delta_1)^(k-1)``."""
    d1 = max(G.vertex_degrees(), default=0)
    return float(G.n) * float(G.r * d1) ** (k - 1)


def is_cycle_free(G: Hypergraph, k: int, budget: int | None = None) -> bool:
    """True iff G has no copy of ``C_k^(r)``; stops at the first copy."""
    if k < 3:
        raise PreconditionError(f"cycle length must be >= 3, got {k}")
    if len(G.edges) < k:
        return True
    budget = default_budget() if budget is None else budget
    ptr, idx = _csr(G)
    copies, _ = kernels.enumerate_cycles(ptr, idx, G.edge_array, G.n, k, budget, True)
    return not copies


def extend_shadow_cycle(
    cycle: Sequence[int], H: Hypergraph, part_of: Sequence[int], parts: tuple[int, int] = (0, 1)
) -> list[tuple[int, ...]]:
    """All lifts of a 2-graph cycle ``x_1..x_{2l}`` to linear cycles of H.

    Edge i of a lift contains ``x_i`` and ``x_{i+1}``; all ``2l(r-1)`` vertices
    are distinct. Consecutive core vertices must lie in the two given parts.
    Returns sorted tuples of H's canonical edge indexes.
    """
    L = len(cycle)
    if L < 4 or L % 2 or len(set(cycle)) != L:
        raise PreconditionError("expected an even cycle of distinct vertices, length >= 4")
    a, b = parts
    pair_edges = []
    codeg = H.codegrees
    for i in range(L):
        u, v = cycle[i], cycle[(i + 1) % L]
        if {part_of[u], part_of[v]} != {a, b}:
            raise PreconditionError(f"pair ({u}, {v}) does not cross parts {parts}")
        if codeg.get((min(u, v), max(u, v)), 0) == 0:
            raise PreconditionError(f"pair ({u}, {v}) is not in the shadow")
        lst = sorted(set(H.incidence[u]) & set(H.incidence[v]))
        pair_edges.append(lst)

    cores = set(cycle)
    out = []
    used: set[int] = set()
    chosen = [0] * L

    def place(i):
        if i == L:
            out.append(tuple(sorted(chosen)))
            return
        for e in pair_edges[i]:
            pend = [v for v in H.edges[e] if v not in cores]
            if len(pend) != H.r - 2 or used.intersection(pend):
                continue
            used.update(pend)
            chosen[i] = e
            place(i + 1)
            used.difference_update(pend)

    place(0)
    out.sort()
    return out
