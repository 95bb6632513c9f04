"""Uniform hypergraphs with tuple-degree indexes, shadows and subgraph algebra."""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, ...]


class HypergraphError(ValueError):
    """Malformed hypergraph input or an invalid query."""


class Hypergraph:
    """An immutable r-uniform hypergraph on vertices ``0..n-1``.

    Edges are stored as sorted tuples, deduplicated, and kept in lexicographic
    order. The position of an edge in :attr:`edges` is its canonical index,
    which every other module uses to refer to edges of a host.
    """

    __slots__ = ("r", "n", "edges", "__dict__")

    def __init__(self, r: int, n: int, edges: Iterable[Iterable[int]] = ()):
        if r < 2:
            raise HypergraphError(f"uniformity must be >= 2, got {r}")
        if n < 0:
            raise HypergraphError(f"vertex count must be >= 0, got {n}")
        canon = set()
        for raw in edges:
            e = tuple(sorted(int(v) for v in raw))
            if len(e) != r or len(set(e)) != r:
                raise HypergraphError(f"edge {tuple(raw)} is not a set of {r} distinct vertices")
            if e[0] < 0 or e[-1] >= n:
                raise HypergraphError(f"edge {tuple(raw)} has a vertex outside 0..{n - 1}")
            canon.add(e)
        self.r = r
        self.n = n
        self.edges: tuple[Edge, ...] = tuple(sorted(canon))

    @classmethod
    def from_edges(cls, r: int, n: int, edges: Iterable[Iterable[int]]) -> "Hypergraph":
        return cls(r, n, edges)

    @classmethod
    def complete(cls, n: int, r: int) -> "Hypergraph":
        return cls(r, n, combinations(range(n), r))

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def __contains__(self, edge) -> bool:
        return tuple(sorted(edge)) in self.edge_index

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self.r, self.n, self.edges) == (other.r, other.n, other.edges)

    def __hash__(self) -> int:
        return hash((self.r, self.n, self.edges))

    def __repr__(self) -> str:
        return f"Hypergraph(r={self.r}, n={self.n}, e={len(self.edges)})"

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def average_degree(self) -> float:
        """``d(G) = r e(G) / n``; zero for the vertexless graph."""
        return self.r * len(self.edges) / self.n if self.n else 0.0

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def edge_array(self) -> np.ndarray:
        return np.array(self.edges, dtype=np.int32).reshape(len(self.edges), self.r)

    @cached_property
    def incidence(self) -> list[list[int]]:
        """Per-vertex list of incident edge indexes, ascending."""
        inc: list[list[int]] = [[] for _ in range(self.n)]
        for i, e in enumerate(self.edges):
            for v in e:
                inc[v].append(i)
        return inc

    # -- degrees ---------------------------------------------------------

    def degree_index(self, j: int) -> Counter:
        """Map from every sorted j-subset with positive degree to its degree."""
        if not 1 <= j <= self.r:
            raise HypergraphError(f"tuple size j must be in 1..{self.r}, got {j}")
        cache = self.__dict__.setdefault("_degree_cache", {})
        if j not in cache:
            counts: Counter = Counter()
            for e in self.edges:
                counts.update(combinations(e, j))
            cache[j] = counts
        return cache[j]

    @cached_property
    def codegrees(self) -> Counter:
        return self.degree_index(2)

    def degree(self, sigma: Iterable[int]) -> int:
        """Number of edges containing every vertex of ``sigma``."""
        s = tuple(sorted(set(sigma)))
        if not 1 <= len(s) <= self.r:
            raise HypergraphError(f"|sigma| must be in 1..{self.r}, got {len(s)}")
        if s[0] < 0 or s[-1] >= self.n:
            raise HypergraphError(f"sigma {s} has a vertex outside 0..{self.n - 1}")
        return self.degree_index(len(s)).get(s, 0)

    def max_degree(self, j: int) -> int:
        """``Delta_j``: the largest degree of a j-subset (0 when edgeless)."""
        idx = self.degree_index(j)
        return max(idx.values(), default=0)

    def vertex_degrees(self) -> list[int]:
        return [len(lst) for lst in self.incidence]

    # -- algebra ---------------------------------------------------------

    def subtract(self, other: "Hypergraph") -> "Hypergraph":
        """``G - C``: same vertex set, edges of G not in C. C must be a subgraph."""
        if other.r != self.r:
            raise HypergraphError("cannot subtract hypergraphs of different uniformity")
        idx = self.edge_index
        missing = [e for e in other.edges if e not in idx]
        if missing:
            raise HypergraphError(f"edge {missing[0]} of the subtrahend is not in the host")
        drop = set(other.edges)
        return Hypergraph(self.r, self.n, (e for e in self.edges if e not in drop))

    def induced(self, vertices: Iterable[int]) -> "Hypergraph":
        """Edges lying entirely inside ``vertices``; vertex ids are kept."""
        keep = set(vertices)
        return Hypergraph(self.r, self.n, (e for e in self.edges if keep.issuperset(e)))

    def edge_subgraph(self, indexes: Iterable[int]) -> "Hypergraph":
        return Hypergraph(self.r, self.n, (self.edges[i] for i in indexes))

    def with_edges(self, edges: Iterable[Iterable[int]]) -> "Hypergraph":
        return Hypergraph(self.r, self.n, edges)

    def star(self, v: int) -> "Hypergraph":
        return self.edge_subgraph(self.incidence[v])

    def is_subgraph_of(self, other: "Hypergraph") -> bool:
        idx = other.edge_index
        return self.r == other.r and all(e in idx for e in self.edges)

    def indexes_in(self, host: "Hypergraph") -> list[int]:
        """Canonical indexes of this graph's edges inside ``host``."""
        idx = host.edge_index
        try:
            return [idx[e] for e in self.edges]
        except KeyError as exc:
            raise HypergraphError(f"edge {exc.args[0]} is not in the host") from None

    # -- text format -----------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{self.r} {self.n} {len(self.edges)}"]
        lines.extend(" ".join(map(str, e)) for e in self.edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Hypergraph":
        rows = [ln.split() for ln in text.splitlines()]
        rows = [r for r in rows if r and not r[0].startswith("#")]
        if not rows or len(rows[0]) != 3:
            raise HypergraphError("missing 'r n e' header line")
        r, n, e = (int(x) for x in rows[0])
        body = rows[1:]
        if len(body) != e:
            raise HypergraphError(f"header declares {e} edges but {len(body)} follow")
        return cls(r, n, ([int(x) for x in row] for row in body))

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Hypergraph":
        with open(path, encoding="ascii") as fh:
            return cls.from_text(fh.read())


def from_edges(r: int, n: int, edges: Iterable[Iterable[int]]) -> Hypergraph:
    return Hypergraph(r, n, edges)


def degree(G: Hypergraph, sigma: Iterable[int]) -> int:
    return G.degree(sigma)


def max_degree(G: Hypergraph, j: int) -> int:
    return G.max_degree(j)


def subtract(G: Hypergraph, C: Hypergraph) -> Hypergraph:
    return G.subtract(C)


def induced(G: Hypergraph, vertices: Iterable[int]) -> Hypergraph:
    return G.induced(vertices)


# -- partite structure ------------------------------------------------------


def check_partite(G: Hypergraph, part_of: Sequence[int], num_parts: int) -> None:
    """Raise unless every edge meets each of the ``num_parts`` parts exactly once."""
    if num_parts != G.r:
        raise HypergraphError(f"an r-partition needs {G.r} parts, got {num_parts}")
    for e in G.edges:
        seen = sorted(part_of[v] for v in e)
        if seen != list(range(num_parts)):
            raise HypergraphError(f"edge {e} does not meet every part exactly once")


def edge_by_part(edge: Edge, part_of: Sequence[int]) -> list[int]:
    """Reorder an edge of an r-partite graph so position i holds its part-i vertex."""
    out = [0] * len(edge)
    for v in edge:
        out[part_of[v]] = v
    return out


@dataclass(frozen=True)
class ShadowGraph:
    """The 2-graph of part-(i, j) pairs covered by an edge of a partite host.

    ``pairs`` maps ``(v_i, v_j)`` (the part-i vertex first) to its codegree in
    the host.
    """

    parts: tuple[int, int]
    pairs: dict[tuple[int, int], int]
    host: Hypergraph = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.pairs)

    def as_graph(self) -> Hypergraph:
        return Hypergraph(2, self.host.n, self.pairs)

    def codegree(self, u: int, v: int) -> int:
        return self.pairs.get((u, v), 0) or self.pairs.get((v, u), 0)


def shadow(H: Hypergraph, part_of: Sequence[int], i: int, j: int) -> ShadowGraph:
    """Pairs ``{v_i, v_j}`` with ``v_i`` in part i and ``v_j`` in part j sharing an edge."""
    if not (0 <= i < H.r and 0 <= j < H.r) or i == j:
        raise HypergraphError(f"invalid part pair ({i}, {j}) for r={H.r}")
    check_partite(H, part_of, H.r)
    pairs: Counter = Counter()
    for e in H.edges:
        by_part = edge_by_part(e, part_of)
        pairs[(by_part[i], by_part[j])] += 1
    return ShadowGraph((i, j), dict(sorted(pairs.items())), H)
