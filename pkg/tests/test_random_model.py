import math
from math import comb

import numpy as np
import pytest

from hypercycles.cycles import enumerate_cycles
from hypercycles.errors import PreconditionError
from hypercycles.hypergraph import Hypergraph
from hypercycles.random_model import (
    CoupledSample,
    chernoff_tail,
    colex_ranks,
    count_complete_copies,
    expected_cycle_copies,
    expected_edges,
    keyed_uniforms,
    sample,
)


def test_extremes():
    assert sample(8, 3, 0.0, 5).edges == ()
    assert len(sample(8, 3, 1.0, 5).edges) == comb(8, 3)
    with pytest.raises(PreconditionError):
        sample(8, 3, 1.5, 0)
    with pytest.raises(PreconditionError):
        sample(3, 4, 0.5, 0)


def test_mean_edge_count():
    counts = [len(sample(10, 3, 0.5, s).edges) for s in range(1000)]
    sigma = math.sqrt(120 * 0.25 / 1000)
    assert abs(np.mean(counts) - 60) < 3 * sigma


def test_deterministic_and_coupled():
    a = sample(9, 3, 0.3, 11).to_text()
    assert sample(9, 3, 0.3, 11).to_text() == a
    assert sample(9, 3, 0.3, 12).to_text() != a
    cs = CoupledSample(9, 3, 11)
    prev = set()
    for p in np.linspace(0, 1, 21):
        cur = set(cs.at(float(p)).edges)
        assert prev <= cur
        prev = cur


def test_colex_ranks_are_a_bijection():
    from itertools import combinations

    subsets = np.array(list(combinations(range(9), 3)))
    ranks = colex_ranks(subsets)
    assert sorted(ranks.tolist()) == list(range(comb(9, 3)))


def test_keyed_uniforms_range_and_independence_of_order():
    ranks = np.arange(1000, dtype=np.uint64)
    u = keyed_uniforms(3, ranks)
    assert ((0 <= u) & (u < 1)).all()
    assert np.array_equal(keyed_uniforms(3, ranks[::-1]), u[::-1])
    assert abs(u.mean() - 0.5) < 0.05


def test_chernoff():
    assert chernoff_tail(0, 0.5) == 2.0
    assert chernoff_tail(300, 0.1) == pytest.approx(2 * math.exp(-1))
    with pytest.raises(PreconditionError):
        chernoff_tail(10, 0)
    with pytest.raises(PreconditionError):
        chernoff_tail(10, 1.6)
    rng = np.random.default_rng(0)
    x = rng.binomial(600, 0.5, 10_000)
    freq = np.mean(np.abs(x - 300) >= 0.2 * 300)
    assert freq <= chernoff_tail(300, 0.2)


@pytest.mark.parametrize("n,r,k", [(4, 2, 4), (6, 2, 4), (7, 2, 6), (6, 3, 3), (8, 3, 4),
                                   (9, 3, 4), (8, 4, 4)])
def test_closed_form_matches_enumeration(n, r, k):
    assert count_complete_copies(n, r, k) == len(enumerate_cycles(Hypergraph.complete(n, r), k))


def test_expectation_formula():
    for n in range(4, 9):
        assert count_complete_copies(n, 2, 4) == 3 * comb(n, 4)
    assert expected_cycle_copies(9, 3, 2, 0.0) == 0
    assert expected_cycle_copies(5, 3, 2, 0.5) == 0  # needs 8 vertices
    assert expected_cycle_copies(9, 3, 2, 0.5) == count_complete_copies(9, 3, 4) / 16
    assert expected_edges(10, 3, 0.5) == 60


def test_empirical_copy_count():
    n, r, p, trials = 9, 3, 0.3, 300
    counts = [len(enumerate_cycles(sample(n, r, p, s), 4)) for s in range(trials)]
    mean = np.mean(counts)
    se = np.std(counts, ddof=1) / math.sqrt(trials)
    assert abs(mean - expected_cycle_copies(n, r, 2, p)) < 3 * se
