"""Balanced supersaturation for linear even cycles.

Pipeline: r-partite subgraph by conditional expectation, dyadic codegree
bucketing, regularization of pair codegrees, choice of the largest
``(U_1, U_j)`` shadow, a cap-respecting family of 2l-cycles in that shadow,
and the lift of each shadow cycle to hypergraph cycles.
"""

from __future__ import annotations

import logging
import math
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Mapping, Sequence

from .cycles import CycleFamily, core_cycle, enumerate_cycles, extend_shadow_cycle, is_cycle_free
from .errors import AnnihilationError, PreconditionError
from .hypergraph import Hypergraph, ShadowGraph, check_partite, edge_by_part, shadow

log = logging.getLogger(__name__)

Caps = Mapping[int, "int | None"]


@dataclass(frozen=True)
class PartiteHypergraph:
    graph: Hypergraph
    part_of: tuple[int, ...]

    @property
    def r(self) -> int:
        return self.graph.r

    @property
    def parts(self) -> list[tuple[int, ...]]:
        """Vertices of each part that lie in at least one edge."""
        out: list[set[int]] = [set() for _ in range(self.r)]
        for e in self.graph.edges:
            for v in e:
                out[self.part_of[v]].add(v)
        return [tuple(sorted(s)) for s in out]


def part_pairs(r: int) -> list[tuple[int, int]]:
    return list(combinations(range(r), 2))


# -- partition ---------------------------------------------------------------


def ek_partition(G: Hypergraph) -> PartiteHypergraph:
    """An r-partition keeping at least ``r! e(G) / r^r`` transversal edges.

    Vertices are placed in id order, each into the part maximizing the
    expected number of transversal edges when the unplaced vertices are
    assigned uniformly at random (ties to the smallest part index).
    """
    if not G.edges:
        raise PreconditionError("ek_partition needs at least one edge")
    r = G.r
    # r^r * P(transversal | a placed vertices, all in distinct parts)
    weight = [math.factorial(r - a) * r**a for a in range(r + 1)]
    placed: list[list[int]] = [[] for _ in G.edges]
    part_of = [0] * G.n

    def value(parts: list[int]) -> int:
        return weight[len(parts)] if len(set(parts)) == len(parts) else 0

    for v in range(G.n):
        inc = G.incidence[v]
        best, best_q = None, 0
        for q in range(r):
            gain = sum(value(placed[e] + [q]) for e in inc)
            if best is None or gain > best:
                best, best_q = gain, q
        part_of[v] = best_q
        for e in inc:
            placed[e].append(best_q)

    H = Hypergraph(r, G.n, (e for e in G.edges if len({part_of[v] for v in e}) == r))
    if len(H.edges) * r**r < math.factorial(r) * len(G.edges):
        raise AssertionError("conditional-expectation partition fell below r!/r^r")
    return PartiteHypergraph(H, tuple(part_of))


def transversal(G: Hypergraph, part_of: Sequence[int]) -> PartiteHypergraph:
    """The transversal subgraph of G under a caller-supplied r-partition."""
    if len(part_of) != G.n or any(not 0 <= q < G.r for q in part_of):
        raise PreconditionError("partition must assign each vertex a part in 0..r-1")
    H = Hypergraph(G.r, G.n, (e for e in G.edges if len({part_of[v] for v in e}) == G.r))
    return PartiteHypergraph(H, tuple(part_of))


# -- dyadic buckets ----------------------------------------------------------


@dataclass(frozen=True)
class DyadicSelection:
    s0: tuple[int, ...]
    H0: PartiteHypergraph
    bucket_sizes: dict[tuple[int, ...], int]

    @property
    def certified(self) -> bool:
        """``|E(s0)| >= e(H) / #nonempty buckets``."""
        total = sum(self.bucket_sizes.values())
        return len(self.H0.graph.edges) * len(self.bucket_sizes) >= total


def codegree_vector(edge, H: Hypergraph, part_of: Sequence[int]) -> tuple[int, ...]:
    by_part = edge_by_part(edge, part_of)
    cod = H.codegrees
    return tuple(cod[tuple(sorted((by_part[i], by_part[j])))] for i, j in part_pairs(H.r))


def dyadic_select(P: PartiteHypergraph) -> DyadicSelection:
    """Bucket edges by ``floor(log2 codegree)`` per part pair; keep the largest bucket."""
    H = P.graph
    if not H.edges:
        raise PreconditionError("dyadic_select needs at least one edge")
    check_partite(H, P.part_of, H.r)
    buckets: dict[tuple[int, ...], list] = defaultdict(list)
    for e in H.edges:
        s = tuple(d.bit_length() - 1 for d in codegree_vector(e, H, P.part_of))
        buckets[s].append(e)
    s0 = min(buckets, key=lambda s: (-len(buckets[s]), s))
    H0 = PartiteHypergraph(Hypergraph(H.r, H.n, buckets[s0]), P.part_of)
    sizes = {s: len(v) for s, v in sorted(buckets.items())}
    return DyadicSelection(s0, H0, sizes)


# -- regularization ----------------------------------------------------------


@dataclass
class RegularizedPartite:
    """The regularized r-partite graph H'.

    Parts are renumbered so ``|U_0| >= |U_1| >= ...``; ``delta`` and ``s0``
    are keyed by renumbered part pairs ``(i, j)``, ``i < j``.
    """

    graph: Hypergraph
    part_of: tuple[int, ...]
    parts: list[tuple[int, ...]]
    s0: dict[tuple[int, int], int]
    delta: dict[tuple[int, int], int]
    lam: float
    trace: list[tuple] = field(default_factory=list)
    h0_edges: int = 0

    @property
    def r(self) -> int:
        return self.graph.r

    @property
    def R(self) -> int:
        return math.comb(self.r, 2)

    @property
    def m(self) -> int:
        return len(self.parts[0]) + len(self.parts[1])

    @property
    def deleted(self) -> int:
        return sum(t[-1] for t in self.trace)

    @property
    def partite(self) -> PartiteHypergraph:
        return PartiteHypergraph(self.graph, self.part_of)


def regularize(H0: PartiteHypergraph, s0: Sequence[int], lam: float) -> RegularizedPartite:
    """Delete every edge through a pair whose codegree drops below ``Delta_ij / lam``.

    Pairs are visited in order of (part pair, vertex ids) and the sweep is
    repeated until no co-occurring pair is below threshold. Raises
    :class:`AnnihilationError` if nothing survives.
    """
    r = H0.r
    pairs = part_pairs(r)
    if len(s0) != len(pairs):
        raise PreconditionError(f"s0 needs {len(pairs)} entries, got {len(s0)}")
    if lam <= 1:
        raise PreconditionError(f"lambda must exceed 1, got {lam}")
    if lam <= 2 * len(pairs):
        warnings.warn(
            f"lambda={lam} <= 2*C(r,2)={2 * len(pairs)}: deletion mass is not bounded by e(H0)/2",
            stacklevel=2,
        )
    check_partite(H0.graph, H0.part_of, r)
    delta = {pq: 2**s for pq, s in zip(pairs, s0)}

    edges = {i: edge_by_part(e, H0.part_of) for i, e in enumerate(H0.graph.edges)}
    through: dict[tuple, set[int]] = defaultdict(set)
    for i, e in edges.items():
        for a, b in pairs:
            through[(a, b, e[a], e[b])].add(i)

    trace = []
    while True:
        low = sorted(key for key, ids in through.items()
                     if ids and len(ids) * lam < delta[key[:2]])
        if not low:
            break
        for key in low:
            ids = through[key]
            if not ids or len(ids) * lam >= delta[key[:2]]:
                continue
            doomed = sorted(ids)
            for i in doomed:
                e = edges.pop(i)
                for a, b in pairs:
                    through[(a, b, e[a], e[b])].discard(i)
            trace.append((*key, len(doomed)))

    if not edges:
        raise AnnihilationError("regularization annihilated the graph", trace)

    survivors = [H0.graph.edges[i] for i in sorted(edges)]
    Hs = Hypergraph(r, H0.graph.n, survivors)
    old_parts: list[set[int]] = [set() for _ in range(r)]
    for e in survivors:
        for v in e:
            old_parts[H0.part_of[v]].add(v)
    order = sorted(range(r), key=lambda q: (-len(old_parts[q]), q))
    new_of_old = {old: new for new, old in enumerate(order)}
    part_of = [-1] * Hs.n
    for q, vs in enumerate(old_parts):
        for v in vs:
            part_of[v] = new_of_old[q]
    new_s0, new_delta = {}, {}
    for a, b in pairs:
        old = tuple(sorted((order[a], order[b])))
        s = s0[pairs.index(old)]
        new_s0[(a, b)] = s
        new_delta[(a, b)] = 2**s
    parts = [tuple(sorted(old_parts[q])) for q in order]
    return RegularizedPartite(Hs, tuple(part_of), parts, new_s0, new_delta, lam, trace,
                              len(H0.graph.edges))


def regularity_violations(Hp: RegularizedPartite) -> list[str]:
    """Every breach of (P1) no isolated part vertex and (P2) the codegree sandwich."""
    out = []
    H = Hp.graph
    deg = H.vertex_degrees()
    for q, U in enumerate(Hp.parts):
        for v in U:
            if deg[v] == 0:
                out.append(f"P1: vertex {v} of part {q} is isolated")
            if Hp.part_of[v] != q:
                out.append(f"vertex {v} listed in part {q} but mapped to {Hp.part_of[v]}")
    try:
        check_partite(H, Hp.part_of, H.r)
    except Exception as exc:  # noqa: BLE001 - reported, not raised
        out.append(str(exc))
        return out
    for (u, v), d in H.codegrees.items():
        a, b = sorted((Hp.part_of[u], Hp.part_of[v]))
        D = Hp.delta[(a, b)]
        if not (D / Hp.lam <= d <= 2 * D):
            out.append(f"P2: pair ({u}, {v}) in parts ({a}, {b}) has codegree {d}, "
                       f"window [{D / Hp.lam:.6g}, {2 * D}]")
    return out


# -- shadow and shadow-cycle family -------------------------------------------


@dataclass(frozen=True)
class ShadowSelection:
    parts: tuple[int, int]
    shadow: ShadowGraph
    sizes: dict[int, int]
    reference: float


def select_shadow(Hp: RegularizedPartite, K: float | None = None) -> ShadowSelection:
    """The pair ``(0, j)`` with the largest shadow, smallest j on ties.

    ``reference`` is ``K^(1/(r-1)) |U_0|^(2 - 1/(r-1))`` with no polylog factor;
    K defaults to ``e(H') / n^(r-1)``.
    """
    H = Hp.graph
    if not H.edges:
        raise PreconditionError("select_shadow needs a nonempty graph")
    r = H.r
    shadows = {j: shadow(H, Hp.part_of, 0, j) for j in range(1, r)}
    sizes = {j: len(s) for j, s in shadows.items()}
    best = min(sizes, key=lambda j: (-sizes[j], j))
    if K is None:
        K = len(H.edges) / H.n ** (r - 1)
    u1 = len(Hp.parts[0])
    reference = K ** (1 / (r - 1)) * u1 ** (2 - 1 / (r - 1)) if r > 2 else float(u1 * u1) * K
    return ShadowSelection((0, best), shadows[best], sizes, reference)


def default_caps(k: float, m: int, ell: int, Q: float = 1.0) -> dict[int, int]:
    """Integer caps ``max(1, ceil(Q k^(2l-j-(j-1)/(l-1)) m^(1-1/l)))`` for ``1 <= j < 2l``."""
    caps = {}
    for j in range(1, 2 * ell):
        expo = 2 * ell - j - (j - 1) / (ell - 1)
        caps[j] = max(1, math.ceil(Q * k**expo * m ** (1 - 1 / ell)))
    return caps


def _normalize_caps(caps: Caps | None, ell: int) -> dict[int, int | None]:
    caps = dict(caps or {})
    bad = [j for j in caps if not 1 <= j < 2 * ell]
    if bad:
        raise PreconditionError(f"caps are indexed by 1..{2 * ell - 1}, got {bad}")
    out = {j: caps.get(j) for j in range(1, 2 * ell)}
    if any(c is not None and c < 1 for c in out.values()):
        raise PreconditionError("caps must be positive")
    return out


def greedy_capped(copies: Sequence[tuple[int, ...]], ell: int,
                  caps: Caps | None) -> list[tuple[int, ...]]:
    """Admit copies in order while every j-subset multiplicity stays within ``caps[j]``."""
    caps = _normalize_caps(caps, ell)
    active = [(j, c) for j, c in caps.items() if c is not None]
    counts: Counter = Counter()
    admitted = []
    for copy in copies:
        subsets = [(j, s) for j, _ in active for s in combinations(copy, j)]
        if all(counts[s] < caps[j] for j, s in subsets):
            counts.update(s for _, s in subsets)
            admitted.append(copy)
    return admitted


def shadow_cycle_family(sh: ShadowGraph, ell: int, caps: Caps | None = None,
                        budget: int | None = None) -> CycleFamily:
    """A cap-respecting, greedily maximal family of 2l-cycles in the shadow graph."""
    if ell < 2:
        raise PreconditionError(f"ell must be >= 2, got {ell}")
    all_cycles = enumerate_cycles(sh.as_graph(), 2 * ell, budget)
    family = greedy_capped(all_cycles.copies, ell, caps)
    return CycleFamily(all_cycles.host, 2 * ell, family, all_cycles.steps)


# -- end to end --------------------------------------------------------------


@dataclass
class BalancedFamily:
    """Shadow family F, its lift F' (copies indexed into the original host) and a certificate."""

    host: Hypergraph
    ell: int
    shadow_family: CycleFamily
    family: CycleFamily
    caps: dict[int, int | None]
    lifted_caps: dict[int, int | None]
    regularized: RegularizedPartite | None
    selection: ShadowSelection | None
    certificate: "Certificate"

    def cap_violations(self) -> list[str]:
        out = []
        for j, cap in self.lifted_caps.items():
            got = self.family.max_degree(j)
            if cap is not None and got > cap:
                out.append(f"Delta_{j}(F')={got} exceeds cap {cap}")
        for j, cap in self.caps.items():
            got = self.shadow_family.max_degree(j)
            if cap is not None and got > cap:
                out.append(f"Delta_{j}(F)={got} exceeds cap {cap}")
        return out


class Certificate(dict):
    """Ordered key/value statistics of one pipeline run."""

    def to_text(self) -> str:
        return "".join(f"{k}: {_fmt(v)}\n" for k, v in self.items())


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(round(v, 12)) if math.isfinite(v) else str(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{_fmt(k)}={_fmt(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if v is None:
        return "inf"
    return str(v)


def lift_caps(caps: dict[int, int | None], ell: int, delta12: int) -> dict[int, int | None]:
    return {j: None if c is None else c * (2 * delta12) ** (2 * ell - j) for j, c in caps.items()}


def build_balanced_family(
    G: Hypergraph,
    ell: int,
    lam: float,
    caps: Caps | str | None = "auto",
    *,
    partition: Sequence[int] | None = None,
    shadow_pair: tuple[int, int] | None = None,
    Q: float = 1.0,
    budget: int | None = None,
    diagnose: bool = False,
) -> BalancedFamily:
    """Run the whole supersaturation pipeline on G.

    ``caps`` is ``"auto"`` (the size-dependent default from :func:`default_caps`),
    ``None`` for no caps, or a mapping ``j -> cap``. ``partition`` replaces
    the conditional-expectation partition and ``shadow_pair`` the largest
    ``(0, j)`` shadow; both exist for exploring small instances.
    """
    if not G.edges:
        raise PreconditionError("build_balanced_family needs at least one edge")
    if ell < 2:
        raise PreconditionError(f"ell must be >= 2, got {ell}")
    r, n = G.r, G.n
    cert = Certificate()
    cert.update(r=r, n=n, e_G=len(G.edges), ell=ell, **{"lambda": lam}, R=math.comb(r, 2))

    P = ek_partition(G) if partition is None else transversal(G, partition)
    cert["e_H"] = len(P.graph.edges)
    cert["ek_bound"] = math.factorial(r) * len(G.edges) / r**r
    lost_at = None
    if diagnose and is_cycle_free(P.graph, 2 * ell, budget):
        lost_at = "partition"

    empty_shadow = CycleFamily(Hypergraph(2, n), 2 * ell, [])
    if not P.graph.edges:
        cert.update(lost_at="partition")
        return BalancedFamily(G, ell, empty_shadow, CycleFamily(G, 2 * ell, []), {}, {}, None,
                              None, cert)

    sel = dyadic_select(P)
    cert["buckets_nonempty"] = len(sel.bucket_sizes)
    cert["s0"] = sel.s0
    cert["e_H0"] = len(sel.H0.graph.edges)
    cert["bucket_certified"] = sel.certified
    if diagnose and lost_at is None and is_cycle_free(sel.H0.graph, 2 * ell, budget):
        lost_at = "dyadic"

    Hp = regularize(sel.H0, sel.s0, lam)
    cert["deletion_rounds"] = len(Hp.trace)
    cert["deleted_edges"] = Hp.deleted
    cert["e_Hprime"] = len(Hp.graph.edges)
    cert["retained_fraction"] = len(Hp.graph.edges) / len(sel.H0.graph.edges)
    cert["part_sizes"] = [len(U) for U in Hp.parts]
    cert["m"] = Hp.m
    cert["Delta"] = {f"{a}{b}": d for (a, b), d in Hp.delta.items()}
    if diagnose and lost_at is None and is_cycle_free(Hp.graph, 2 * ell, budget):
        lost_at = "regularize"

    selection = select_shadow(Hp, len(G.edges) / n ** (r - 1))
    if shadow_pair is not None:
        a, b = sorted(shadow_pair)
        sh = shadow(Hp.graph, Hp.part_of, a, b)
        selection = ShadowSelection((a, b), sh, selection.sizes, selection.reference)
    a, b = selection.parts
    sh = selection.shadow
    m = len(Hp.parts[a]) + len(Hp.parts[b])
    delta12 = Hp.delta[(a, b)]
    k = len(sh) / m ** (1 + 1 / ell)
    cert["shadow_pair"] = selection.parts
    cert["shadow_sizes"] = selection.sizes
    cert["shadow_size"] = len(sh)
    cert["shadow_reference"] = selection.reference
    cert["Delta12"] = delta12
    cert["k"] = k

    if isinstance(caps, str):
        if caps != "auto":
            raise PreconditionError(f"unknown caps mode {caps!r}")
        caps_n = _normalize_caps(default_caps(k, m, ell, Q), ell)
    else:
        caps_n = _normalize_caps(caps, ell)
    cert["caps"] = caps_n

    all_shadow = enumerate_cycles(sh.as_graph(), 2 * ell, budget)
    F = CycleFamily(all_shadow.host, 2 * ell, greedy_capped(all_shadow.copies, ell, caps_n),
                    all_shadow.steps)
    cert["shadow_cycles_total"] = len(all_shadow)
    cert["shadow_family_size"] = len(F)
    cert["shadow_family_max_degrees"] = [F.max_degree(j) for j in range(1, 2 * ell)]

    host_index = G.edge_index
    lifted = set()
    hist: Counter = Counter()
    for copy in F.copies:
        order = core_cycle(F.copy_edges(copy))
        ext = extend_shadow_cycle(order, Hp.graph, Hp.part_of, (a, b))
        hist[len(ext)] += 1
        for c in ext:
            lifted.add(tuple(sorted(host_index[Hp.graph.edges[i]] for i in c)))
    Fp = CycleFamily(G, 2 * ell, sorted(lifted))
    lifted = lift_caps(caps_n, ell, delta12)
    cert["lifted_caps"] = lifted
    cert["family_size"] = len(Fp)
    cert["family_max_degrees"] = [Fp.max_degree(j) for j in range(1, 2 * ell)]
    cert["extension_histogram"] = dict(sorted(hist.items()))
    if F.copies:
        cert["size_ratio"] = len(F) / (k ** (2 * ell) * m * m) if k > 0 else math.inf
    if lost_at is None and not F.copies:
        lost_at = "shadow"
    if lost_at is None and not Fp.copies:
        lost_at = "extension"
    cert["lost_at"] = lost_at or "none"
    log.debug("balanced family: |F|=%d |F'|=%d", len(F), len(Fp))
    return BalancedFamily(G, ell, F, Fp, caps_n, lifted, Hp, selection, cert)


def all_partitions(n: int, r: int):
    """Every assignment of ``n`` vertices to ``r`` parts (``r^n`` of them)."""
    return product(range(r), repeat=n)
