from itertools import combinations
from math import comb

import numpy as np
import pytest

from hypercycles.cycles import CycleTemplate, enumerate_cycles, is_cycle_free
from hypercycles.errors import PreconditionError, WorkBudgetExceeded
from hypercycles.hypergraph import Hypergraph
from hypercycles.random_model import sample
from hypercycles.turan import (
    estimate_random_ex,
    exact_ex,
    greedy_deletion_bound,
    solve,
    star_bound,
)

from oracles import max_free_subset, random_edges


def test_exact_examples():
    star = Hypergraph(3, 9, [(0, a, b) for a, b in combinations(range(1, 9), 2)])
    res = exact_ex(star, 2)
    assert res.value == len(star.edges) and res.mode == "exact" and res.copies == 0
    K4 = exact_ex(Hypergraph.complete(4, 2), 2)
    assert (K4.value, K4.method) == (4, "hitting_set")
    K6 = Hypergraph.complete(6, 2)
    assert exact_ex(K6, 2).value == max_free_subset(enumerate_cycles(K6, 4).masks(), 15) == 7


def test_duality_and_sandwich(rng):
    for _ in range(15):
        G = Hypergraph(3, 9, random_edges(rng, 9, 3, int(rng.integers(8, 24))))
        ex = exact_ex(G, 2)
        greedy = greedy_deletion_bound(G, 2)
        star = star_bound(G, 2)
        assert greedy.value <= ex.value <= len(G.edges)
        assert star.value <= ex.value
        assert is_cycle_free(ex.witness, 4) and ex.witness.is_subgraph_of(G)
        assert greedy.value >= len(G.edges) - greedy.copies


def test_exact_cap_falls_back():
    G = sample(10, 3, 0.6, 0)
    res = exact_ex(G, 2)
    assert res.mode == "lower_bound" and res.notes
    assert is_cycle_free(res.witness, 4)


def test_exact_budget_falls_back():
    G = sample(9, 3, 0.35, 1)
    res = exact_ex(G, 2, budget=5000)
    assert res.mode == "lower_bound" and res.flagged
    assert res.value <= exact_ex(G, 2).value


def test_budget_too_small_for_any_copy_raises():
    with pytest.raises(WorkBudgetExceeded):
        greedy_deletion_bound(Hypergraph.complete(8, 3), 2, budget=5000)


def test_greedy_examples():
    T = CycleTemplate(4, 3).hypergraph()
    assert greedy_deletion_bound(T, 2).value == 3
    free = Hypergraph(3, 6, [(0, 1, 2), (3, 4, 5)])
    assert greedy_deletion_bound(free, 2).value == 2


def test_greedy_tie_break():
    # all four edges of C_4 tie; the smallest index goes
    C4 = Hypergraph(2, 4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    res = greedy_deletion_bound(C4, 2)
    assert (0, 1) not in res.witness and res.value == 3


def test_greedy_partial_enumeration_path():
    G = Hypergraph.complete(8, 3)
    res = greedy_deletion_bound(G, 2, budget=50_000)
    assert is_cycle_free(res.witness, 4)
    assert res.notes and res.copies is None


def test_star_examples(rng):
    assert star_bound(Hypergraph.complete(8, 3), 2).value == comb(7, 2)
    assert star_bound(Hypergraph(3, 6), 2).value == 0
    for _ in range(100):
        G = Hypergraph(3, 9, random_edges(rng, 9, 3, int(rng.integers(1, 40))))
        res = star_bound(G, 2)
        assert res.value == G.max_degree(1)
        assert is_cycle_free(res.witness, 4)
    with pytest.warns(UserWarning, match="r=2"):
        res = star_bound(Hypergraph.complete(5, 2), 2)
    assert res.value == 4 and res.notes


def test_solve_dispatch():
    G = sample(9, 3, 0.3, 2)
    assert solve(G, 2, "lower", "star").method == "star"
    assert solve(G, 2, "lower", "greedy").method == "greedy_deletion"
    assert solve(G, 2, "lower").value >= solve(G, 2, "lower", "greedy").value
    with pytest.raises(PreconditionError):
        solve(G, 2, "fast")
    with pytest.raises(PreconditionError):
        exact_ex(G, 1)


def test_random_examples():
    zero = estimate_random_ex(9, 3, 2, 0.0, 0, 5, "exact")
    assert zero.values == [0] * 5
    full = estimate_random_ex(8, 3, 2, 1.0, 0, 3, "lower", "star")
    assert full.values == [comb(7, 2)] * 3
    with pytest.raises(PreconditionError):
        estimate_random_ex(9, 3, 2, 0.9, 0, 1, "exact")


def test_regime_one_mean_close_to_edges():
    st = estimate_random_ex(9, 3, 2, 0.02, 0, 50, "exact")
    free = sum(1 for t in st.trials if t.copies == 0)
    assert free > 25
    assert abs(st.mean - st.mean_edges) <= 0.05 * st.mean_edges


def test_csv_schema():
    st = estimate_random_ex(9, 3, 2, 0.1, 4, 3, "exact")
    lines = st.to_csv().splitlines()
    assert lines[0] == "trial,seed,edges,copies,value,method,millis"
    assert [ln.split(",")[1] for ln in lines[1:]] == ["4", "5", "6"]
    s = st.summary()
    assert s["trials"] == 3 and s["min"] <= s["mean"] <= s["max"]


def test_budget_errors_recorded_not_raised(monkeypatch):
    monkeypatch.setenv("HYPERCYCLES_WORK_BUDGET", "1")
    st = estimate_random_ex(10, 3, 2, 0.5, 0, 2, "lower", "greedy")
    assert all(t.method == "failed" and t.error for t in st.trials)
    assert np.isnan(st.mean)
