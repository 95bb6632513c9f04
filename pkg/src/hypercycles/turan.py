"""Turán numbers ``ex(G, C_{2l}^(r))``: exact at small scale, lower bounds beyond."""

from __future__ import annotations

import csv
import io
import math
import statistics
import time
import warnings
from collections import Counter
from dataclasses import dataclass, field

from . import kernels
from .cycles import default_budget, enumerate_cycles, is_cycle_free
from .errors import PreconditionError, WorkBudgetExceeded
from .hypergraph import Hypergraph
from .random_model import CoupledSample, expected_edges

EXACT_CAP = 60
HS_NODE_BUDGET = 10**7


@dataclass
class TuranResult:
    value: int
    witness: Hypergraph
    mode: str  # "exact" or "lower_bound"
    method: str  # "hitting_set", "greedy_deletion" or "star"
    copies: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def flagged(self) -> bool:
        return bool(self.notes)


def _check_ell(ell: int) -> int:
    if ell < 2:
        raise PreconditionError(f"ell must be >= 2, got {ell}")
    return 2 * ell


def exact_ex(G: Hypergraph, ell: int, *, cap: int = EXACT_CAP, budget: int | None = None,
             node_budget: int = HS_NODE_BUDGET) -> TuranResult:
    """Maximum copy-free subgraph via a minimum hitting set of the copies.

    Falls back to :func:`greedy_deletion_bound` (flagged) when the host is
    above ``cap`` edges or the enumeration or search budget runs out.
    """
    k = _check_ell(ell)
    e = len(G.edges)
    if e > min(cap, 64):
        res = greedy_deletion_bound(G, ell, budget=budget)
        res.notes.append(f"e(G)={e} above exact cap {min(cap, 64)}")
        return res
    try:
        fam = enumerate_cycles(G, k, budget)
    except WorkBudgetExceeded:
        res = greedy_deletion_bound(G, ell, budget=budget)
        res.notes.append("enumeration budget exceeded; lower bound only")
        return res
    size, mask, _, complete = kernels.min_hitting_set(fam.masks(), e, node_budget)
    keep = [i for i in range(e) if not mask >> i & 1]
    witness = G.edge_subgraph(keep)
    if not complete:
        res = TuranResult(len(keep), witness, "lower_bound", "hitting_set", len(fam),
                          ["hitting-set search budget exceeded; incumbent only"])
    else:
        res = TuranResult(len(keep), witness, "exact", "hitting_set", len(fam))
    assert is_cycle_free(witness, k)
    return res


def _greedy_delete(copies: list[int], alive: int) -> int:
    """Delete max-multiplicity edges (smallest index on ties) until no copy survives."""
    live = [c for c in copies if c & ~alive == 0]
    while live:
        counts: Counter = Counter()
        for c in live:
            x = c
            while x:
                low = x & -x
                counts[low.bit_length() - 1] += 1
                x ^= low
        top = min(counts, key=lambda i: (-counts[i], i))
        alive &= ~(1 << top)
        live = [c for c in live if not c >> top & 1]
    return alive


def greedy_deletion_bound(G: Hypergraph, ell: int, *, budget: int | None = None) -> TuranResult:
    """Delete one edge per copy, always the edge in the most remaining copies.

    If enumeration runs over budget the copies found so far are destroyed and
    the survivor is enumerated again, until it verifies as copy-free.
    """
    k = _check_ell(ell)
    budget = default_budget() if budget is None else budget
    e = len(G.edges)
    alive = (1 << e) - 1
    notes: list[str] = []
    total = None
    current = G
    first = True
    while True:
        try:
            fam = enumerate_cycles(current, k, budget)
            partial, done = fam.copies, True
        except WorkBudgetExceeded as exc:
            partial, done = exc.partial, False
            if not partial:
                raise
            if not notes:
                notes.append("enumeration budget exceeded; deleted from partial copy lists")
        # translate copies of ``current`` back to indexes of G
        back = [G.edge_index[edge] for edge in current.edges]
        masks = [sum(1 << back[i] for i in c) for c in partial]
        if first and done:
            total = len(partial)
        first = False
        alive = _greedy_delete(masks, alive)
        current = G.edge_subgraph([i for i in range(e) if alive >> i & 1])
        if done:
            break
    if not is_cycle_free(current, k, budget):
        raise AssertionError("greedy deletion left a copy behind")
    return TuranResult(len(current.edges), current, "lower_bound", "greedy_deletion", total, notes)


def star_bound(G: Hypergraph, ell: int) -> TuranResult:
    """All edges through a vertex of maximum degree (smallest such vertex)."""
    k = _check_ell(ell)
    notes = []
    if G.r == 2:
        notes.append("r=2: star returned, though the bound targets r >= 3")
        warnings.warn(notes[-1], stacklevel=2)
    if not G.edges:
        return TuranResult(0, G, "lower_bound", "star", notes=notes)
    degs = G.vertex_degrees()
    v = max(range(G.n), key=lambda x: (degs[x], -x))
    witness = G.star(v)
    assert is_cycle_free(witness, k)
    return TuranResult(len(witness.edges), witness, "lower_bound", "star", notes=notes)


@dataclass
class TrialRecord:
    trial: int
    seed: int
    edges: int
    copies: int | None
    value: int | None
    method: str
    millis: float
    mode: str = ""
    error: str | None = None


@dataclass
class RandomExStats:
    n: int
    r: int
    ell: int
    p: float
    mode: str
    trials: list[TrialRecord]

    @property
    def values(self) -> list[int]:
        return [t.value for t in self.trials if t.value is not None]

    @property
    def mean(self) -> float:
        return statistics.fmean(self.values) if self.values else math.nan

    @property
    def stdev(self) -> float:
        v = self.values
        return statistics.stdev(v) if len(v) > 1 else 0.0

    @property
    def min(self) -> int | None:
        return min(self.values, default=None)

    @property
    def max(self) -> int | None:
        return max(self.values, default=None)

    @property
    def mean_edges(self) -> float:
        return statistics.fmean(t.edges for t in self.trials) if self.trials else math.nan

    def summary(self) -> dict:
        return {"n": self.n, "r": self.r, "ell": self.ell, "p": self.p, "mode": self.mode,
                "trials": len(self.trials), "failed": len(self.trials) - len(self.values),
                "mean": self.mean, "stdev": self.stdev, "min": self.min, "max": self.max,
                "mean_edges": self.mean_edges}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "seed", "edges", "copies", "value", "method", "millis"])
        for t in self.trials:
            w.writerow([t.trial, t.seed, t.edges, "" if t.copies is None else t.copies,
                        "" if t.value is None else t.value, t.method, f"{t.millis:.3f}"])
        return buf.getvalue()


def solve(G: Hypergraph, ell: int, mode: str, method: str = "auto",
          budget: int | None = None) -> TuranResult:
    """Dispatch to the exact solver or one of the lower bounds."""
    if mode == "exact":
        return exact_ex(G, ell, budget=budget)
    if mode != "lower":
        raise PreconditionError(f"mode must be exact or lower, got {mode!r}")
    if method == "greedy":
        return greedy_deletion_bound(G, ell, budget=budget)
    if method == "star":
        return star_bound(G, ell)
    if method != "auto":
        raise PreconditionError(f"unknown lower-bound method {method!r}")
    try:
        greedy = greedy_deletion_bound(G, ell, budget=budget)
    except WorkBudgetExceeded:
        return star_bound(G, ell)
    if G.r >= 3 and G.edges:
        star = star_bound(G, ell)
        if star.value > greedy.value:
            return star
    return greedy


def estimate_random_ex(n: int, r: int, ell: int, p: float, seed: int = 0, trials: int = 10,
                       mode: str = "lower", method: str = "auto", *, cap: int = EXACT_CAP,
                       budget: int | None = None) -> RandomExStats:
    """Solve ``trials`` samples of ``G(n, p)^(r)``, trial t drawn with seed ``seed + t``.

    Per-trial budget errors are recorded, not raised.
    """
    if mode not in ("exact", "lower"):
        raise PreconditionError(f"mode must be exact or lower, got {mode!r}")
    if mode == "exact" and expected_edges(n, r, p) > cap:
        raise PreconditionError(
            f"exact mode needs expected edges <= {cap}, got {expected_edges(n, r, p):.1f}")
    records = []
    for t in range(trials):
        s = seed + t
        G = CoupledSample(n, r, s).at(p)
        t0 = time.perf_counter()
        try:
            res = solve(G, ell, mode, method, budget)
            rec = TrialRecord(t, s, len(G.edges), res.copies, res.value, res.method, 0.0,
                              res.mode)
        except WorkBudgetExceeded as exc:
            rec = TrialRecord(t, s, len(G.edges), None, None, "failed", 0.0, mode, str(exc))
        rec.millis = 1000 * (time.perf_counter() - t0)
        records.append(rec)
    return RandomExStats(n, r, ell, p, mode, records)
