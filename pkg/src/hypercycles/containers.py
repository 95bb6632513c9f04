"""Containers for the cycle-incidence system and their iteration from ``K_n^(r)``.

The incidence system S has the edges of a host G as ground set and chosen
cycle copies as hyperedges; copy-free subgraphs of G are exactly the
independent sets of S. Containers are built by a max-degree decision tree:
at each node the ground element of largest degree among live hyperedges is
either put in the fingerprint (forcing out every element that would complete
a hyperedge) or discarded. A leaf's container is fingerprint plus the
undecided elements, so every independent set follows one root-to-leaf path
and lands in that leaf's container.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from . import kernels
from .cycles import CycleFamily, enumerate_cycles
from .errors import CodegreeConditionError, ContainerError, PreconditionError, WorkBudgetExceeded
from .hypergraph import Hypergraph

log = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 2_000_000


@dataclass
class IncidenceSystem:
    """A uniform hypergraph on ground set ``0..N-1`` (the edges of a host)."""

    N: int
    hyperedges: list[tuple[int, ...]]
    uniformity: int
    host: Hypergraph | None = None

    def __post_init__(self):
        for h in self.hyperedges:
            if len(h) != self.uniformity or len(set(h)) != len(h):
                raise PreconditionError(f"hyperedge {h} is not a {self.uniformity}-set")
            if h and (min(h) < 0 or max(h) >= self.N):
                raise PreconditionError(f"hyperedge {h} leaves the ground set 0..{self.N - 1}")

    @classmethod
    def from_family(cls, family: CycleFamily) -> "IncidenceSystem":
        return cls(len(family.host.edges), list(family.copies), family.k, family.host)

    def __len__(self) -> int:
        return len(self.hyperedges)

    @property
    def average_degree(self) -> float:
        """``d(S) = u |E(S)| / N``."""
        return self.uniformity * len(self.hyperedges) / self.N if self.N else 0.0

    def max_degree(self, j: int) -> int:
        """``Delta_j(S)``, recomputed from the hyperedges."""
        if not 1 <= j <= self.uniformity:
            raise PreconditionError(f"j must be in 1..{self.uniformity}")
        counts: dict = {}
        for h in self.hyperedges:
            for s in combinations(sorted(h), j):
                counts[s] = counts.get(s, 0) + 1
        return max(counts.values(), default=0)

    def masks(self) -> list[int]:
        return [sum(1 << i for i in h) for h in self.hyperedges]

    def edges_inside(self, container_mask: int) -> int:
        """``|E(S[C])|``."""
        return sum(1 for h in self.masks() if h & ~container_mask == 0)

    def as_array(self) -> np.ndarray:
        return np.array(self.hyperedges, dtype=np.int64).reshape(len(self.hyperedges),
                                                                  self.uniformity)


def codegree_function(S: IncidenceSystem, tau: float) -> float:
    """``delta(S, tau) = (1/d(S)) sum_{j=2}^{u} Delta_j(S) / tau^(j-1)``."""
    if not 0.0 < tau < 1.0:
        raise PreconditionError(f"tau must lie in (0, 1), got {tau}")
    if not S.hyperedges:
        raise PreconditionError("codegree function undefined for an empty system (d(S)=0)")
    d = S.average_degree
    return sum(S.max_degree(j) / tau ** (j - 1) for j in range(2, S.uniformity + 1)) / d


def default_tau(n: int, r: int, ell: int, K: float, c: float = 1.0) -> float:
    """``c K^-1 n^(-(r-2) + 1/(2l-1))`` clamped into ``(0, 1/2)``."""
    if n <= 0 or K <= 0:
        raise PreconditionError("n and K must be positive")
    tau = c / K * float(n) ** (-(r - 2) + 1 / (2 * ell - 1))
    if tau >= 0.5:
        warnings.warn(f"tau={tau:.6g} clamped below 1/2", stacklevel=2)
        tau = math.nextafter(0.5, 0.0)
    return tau


def _to_mask(flags: np.ndarray) -> int:
    return int.from_bytes(np.packbits(flags, bitorder="little").tobytes(), "little")


def mask_to_indexes(mask: int) -> list[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


@dataclass
class ContainerFamily:
    """Containers as bitmasks over the ground set ``0..N-1`` (edges of ``host``)."""

    N: int
    containers: list[int]
    tau: float | None = None
    eps: float | None = None
    host: Hypergraph | None = None
    system_edges: int = 0
    inside_counts: list[int] = field(default_factory=list)
    degenerate: bool = False
    codegree: float | None = None
    nodes: int = 0
    coverage: dict = field(default_factory=dict)
    steps: int = 0
    step_log: list[dict] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.containers)

    def sizes(self) -> list[int]:
        return [bin(c).count("1") for c in self.containers]

    def subgraph(self, i: int) -> Hypergraph:
        if self.host is None:
            raise PreconditionError("family has no host graph")
        return self.host.edge_subgraph(mask_to_indexes(self.containers[i]))

    def shrink_violations(self) -> list[int]:
        """Containers breaking ``|E(S[C])| <= (1 - eps)|E(S)|``."""
        if self.eps is None or self.degenerate:
            return []
        bound = (1 - self.eps) * self.system_edges
        return [i for i, c in enumerate(self.inside_counts) if c > bound + 1e-9]

    def log_size_budget(self) -> float | None:
        """``tau N log(1/tau) / eps``, the log of the family-size bound."""
        if not self.tau or not self.eps:
            return None
        return self.tau * self.N * math.log(1 / self.tau) / self.eps

    def contains(self, mask: int) -> bool:
        return any(mask & ~c == 0 for c in self.containers)

    def to_text(self) -> str:
        n = self.host.n if self.host is not None else 0
        r = self.host.r if self.host is not None else 0
        lines = [f"{len(self.containers)} {n} {r}"]
        for c in self.containers:
            idx = mask_to_indexes(c)
            lines.append(" ".join(map(str, [len(idx), *idx])))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, host: Hypergraph | None = None) -> "ContainerFamily":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        count = int(rows[0][0])
        conts = []
        for row in rows[1:1 + count]:
            size, idx = int(row[0]), [int(x) for x in row[1:]]
            if size != len(idx):
                raise PreconditionError(f"container line declares {size} edges, lists {len(idx)}")
            conts.append(sum(1 << i for i in idx))
        N = len(host.edges) if host is not None else max((c.bit_length() for c in conts), default=0)
        return cls(N, conts, host=host)


def _decision_tree(N: int, H: np.ndarray, eps: float, max_size: int | None,
                   node_budget: int) -> tuple[list[int], int]:
    E = len(H)
    target = (1 - eps) * E
    leaves: list[int] = []
    seen: set[int] = set()
    nodes = 0
    # (fingerprint, available) pairs; "in" branch explored first
    stack = [(np.zeros(N, dtype=bool), np.ones(N, dtype=bool))]
    while stack:
        inT, avail = stack.pop()
        nodes += 1
        if nodes > node_budget:
            raise WorkBudgetExceeded(f"container tree exceeded {node_budget} nodes", steps=nodes)
        cont = inT | avail
        live = cont[H].all(axis=1) if E else np.zeros(0, dtype=bool)
        e_live = int(live.sum())
        size = int(cont.sum())
        if e_live <= target and (max_size is None or size <= max_size):
            mask = _to_mask(cont)
            if mask not in seen:
                seen.add(mask)
                leaves.append(mask)
            continue
        if e_live == 0:
            raise ContainerError(
                f"an independent set of size {size} exceeds the container size bound {max_size}",
                container=_to_mask(cont))
        deg = np.bincount(H[live].ravel(), minlength=N)
        deg[~avail] = 0
        v = int(np.argmax(deg))
        if deg[v] == 0:
            raise ContainerError("live hyperedge with no undecided element", _to_mask(cont))
        out_avail = avail.copy()
        out_avail[v] = False
        in_T = inT.copy()
        in_T[v] = True
        in_avail = out_avail.copy()
        rows = H[live & (H == v).any(axis=1)]
        if len(rows):
            outside = ~in_T[rows]
            forced = rows[outside.sum(axis=1) == 1]
            if len(forced):
                in_avail[forced[~in_T[forced]]] = False
        stack.append((inT, out_avail))
        stack.append((in_T, in_avail))
    return leaves, nodes


def build_containers(
    S: IncidenceSystem,
    tau: float,
    eps: float,
    *,
    max_size: int | None = None,
    enforce_codegree: bool = True,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> ContainerFamily:
    """Containers covering every independent set of S with ``|E(S[C])| <= (1-eps)|E(S)|``.

    ``max_size`` additionally bounds the number of ground elements per
    container. With ``enforce_codegree`` the call refuses unless
    ``delta(S, tau) <= eps``.
    """
    if not 0.0 < eps <= 1.0:
        raise PreconditionError(f"eps must lie in (0, 1], got {eps}")
    if not 0.0 < tau < 1.0:
        raise PreconditionError(f"tau must lie in (0, 1), got {tau}")
    full = (1 << S.N) - 1
    if not S.hyperedges:
        fam = ContainerFamily(S.N, [full], tau, eps, S.host, 0, [0], degenerate=True)
        if max_size is not None and S.N > max_size:
            raise ContainerError(f"empty system: ground set of {S.N} exceeds {max_size}", full)
        return fam
    delta = codegree_function(S, tau)
    if enforce_codegree and delta > eps:
        raise CodegreeConditionError(delta, eps)
    leaves, nodes = _decision_tree(S.N, S.as_array(), eps, max_size, node_budget)
    hmasks = S.masks()
    inside = [sum(1 for h in hmasks if h & ~c == 0) for c in leaves]
    return ContainerFamily(S.N, leaves, tau, eps, S.host, len(S.hyperedges), inside,
                           codegree=delta, nodes=nodes)


# -- coverage checks -----------------------------------------------------------


def verify_coverage_exhaustive(family: ContainerFamily, copy_masks: Sequence[int]) -> dict:
    """Check all ``2^N`` subsets: every copy-free subset must sit in a container."""
    if family.N > 30:
        raise PreconditionError(f"exhaustive coverage limited to N <= 30, got {family.N}")
    bad, first, free = kernels.coverage_violations(list(copy_masks), family.containers, family.N)
    result = {"mode": "exhaustive", "checked": free, "violations": bad,
              "first_violation": None if first < 0 else first}
    family.coverage = result
    return result


def _as_u64(masks: Sequence[int]) -> np.ndarray:
    return np.array([int(c) for c in masks], dtype=np.uint64)


def sample_free_subgraphs(copy_masks: Sequence[int], N: int, count: int,
                          rng: np.random.Generator) -> list[int]:
    """Random copy-free edge subsets of a ground set with ``N <= 64``.

    Even draws thin a random subset by deleting a random edge of a random
    surviving copy until none survive; odd draws grow a maximal free set in a
    random edge order.
    """
    if N > 64:
        raise PreconditionError(f"sampling supports N <= 64, got {N}")
    copies = _as_u64(copy_masks)
    out = []
    for t in range(count):
        if t % 2 == 0:
            bits = np.flatnonzero(rng.random(N) < rng.random())
            sub = np.uint64(sum(1 << int(i) for i in bits))
            live = copies[(copies & ~sub) == 0]
            while len(live):
                idx = mask_to_indexes(int(live[rng.integers(len(live))]))
                sub &= ~np.uint64(1 << idx[rng.integers(len(idx))])
                live = live[(live & ~sub) == 0]
        else:
            sub = np.uint64(0)
            for i in rng.permutation(N):
                cand = sub | np.uint64(1 << int(i))
                if not ((copies & ~cand) == 0).any():
                    sub = cand
        out.append(int(sub))
    return out


def uncovered(family: ContainerFamily, subsets: Sequence[int], chunk: int = 256) -> list[int]:
    """Members of ``subsets`` lying in no container."""
    if family.N > 64:
        return [s for s in subsets if not family.contains(s)]
    conts = _as_u64(family.containers)
    subs = _as_u64(subsets)
    bad = []
    for lo in range(0, len(subs), chunk):
        block = subs[lo:lo + chunk]
        hit = ((block[:, None] & ~conts[None, :]) == 0).any(axis=1)
        bad.extend(int(x) for x in block[~hit])
    return bad


def verify_coverage_sampled(family: ContainerFamily, copy_masks: Sequence[int], samples: int,
                            seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    subs = sample_free_subgraphs(copy_masks, family.N, samples, rng)
    bad = uncovered(family, subs)
    result = {"mode": "sampled", "checked": len(subs), "violations": len(bad),
              "first_violation": bad[0] if bad else None}
    family.coverage = result
    return result


# -- iteration -------------------------------------------------------------------


def schedule_steps(ratio: float, shrink: float) -> int:
    """Smallest m with ``shrink^m * ratio <= 1``."""
    if not 0.0 < shrink < 1.0:
        raise PreconditionError(f"shrink must lie in (0, 1), got {shrink}")
    m, level = 0, float(ratio)
    while level > 1.0 + 1e-12:
        level *= shrink
        m += 1
    return m


def _step_family(G: Hypergraph, ell: int, family: str, lam: float, caps, budget) -> CycleFamily:
    if family == "all":
        return enumerate_cycles(G, 2 * ell, budget)
    if family == "balanced":
        from .supersaturation import build_balanced_family

        return build_balanced_family(G, ell, lam, caps, budget=budget).family
    raise PreconditionError(f"unknown step family {family!r}")


def iterate_containers(
    n: int,
    r: int,
    ell: int,
    k_target: float,
    eps: float,
    shrink: float,
    *,
    family: str = "all",
    lam: float | None = None,
    caps="auto",
    tau_const: float = 1.0,
    enforce_codegree: bool = False,
    budget: int | None = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> ContainerFamily:
    """Refine ``{K_n^(r)}`` until every container has at most ``k_target n^(r-1)`` edges.

    Step i refines each container above ``K_i n^(r-1)``, where
    ``K_i = max(shrink^i K_init, k_target)``; each child keeps at most
    ``shrink`` times its parent's edges. ``family`` picks the copies of each
    step's incidence system: ``"all"`` copies in the container or the
    ``"balanced"`` supersaturation family.
    """
    if k_target <= 0:
        raise PreconditionError("k_target must be positive")
    if not 0.0 < shrink < 1.0:
        raise PreconditionError(f"shrink must lie in (0, 1), got {shrink}")
    root = Hypergraph.complete(n, r)
    scale = float(n) ** (r - 1)
    k_init = len(root.edges) / scale
    planned = schedule_steps(k_init / k_target, shrink)
    lam = lam if lam is not None else 4.0 * math.comb(r, 2) + 1
    frontier = [root]
    step_log = []
    step = 0
    while any(len(G.edges) > k_target * scale for G in frontier):
        step += 1
        if step > planned:
            raise ContainerError(f"schedule exhausted after {planned} steps")
        K_i = max(shrink**step * k_init, k_target)
        nxt = []
        refined = 0
        for G in frontier:
            if len(G.edges) <= K_i * scale:
                nxt.append(G)
                continue
            refined += 1
            try:
                fam = _step_family(G, ell, family, lam, caps, budget)
                S = IncidenceSystem.from_family(fam)
                if not S.hyperedges:
                    raise ContainerError("step family is empty; container cannot shrink")
                tau = default_tau(n, r, ell, len(G.edges) / scale, tau_const)
                cf = build_containers(S, tau, eps, max_size=math.floor(shrink * len(G.edges)),
                                      enforce_codegree=enforce_codegree, node_budget=node_budget)
            except Exception as exc:
                exc.failed_container = G.to_text()  # for post-mortem
                raise
            for c in cf.containers:
                nxt.append(G.edge_subgraph(mask_to_indexes(c)))
        # merge identical children
        uniq = {H.edges: H for H in nxt}
        frontier = sorted(uniq.values(), key=lambda H: (len(H.edges), H.edges))
        step_log.append({"step": step, "K_i": K_i, "refined": refined, "containers": len(frontier),
                         "max_edges": max(len(H.edges) for H in frontier)})
        log.info("container step %d: %d refined, %d containers", step, refined, len(frontier))
    idx = root.edge_index
    masks = [sum(1 << idx[e] for e in H.edges) for H in frontier]
    out = ContainerFamily(len(root.edges), masks, eps=eps, host=root, steps=step,
                          step_log=step_log)
    out.planned_steps = planned
    return out


def union_bound_report(family: ContainerFamily, p: float, m_edges: int) -> float:
    """Natural log of ``|G| * C(max container size, m) * p^m``."""
    if not 0.0 < p <= 1.0:
        raise PreconditionError(f"p must lie in (0, 1], got {p}")
    if not family.containers:
        raise PreconditionError("empty container family")
    top = max(family.sizes())
    if m_edges > top:
        return -math.inf
    log_binom = math.lgamma(top + 1) - math.lgamma(m_edges + 1) - math.lgamma(top - m_edges + 1)
    return math.log(len(family)) + log_binom + m_edges * math.log(p)
