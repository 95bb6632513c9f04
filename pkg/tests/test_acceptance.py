"""The twelve acceptance criteria, one test each.

Each test records a PASS/FAIL line that the terminal summary prints.
"""

import math
import time
import warnings
from contextlib import contextmanager
from itertools import combinations

import numpy as np
import pytest

from hypercycles.containers import (
    IncidenceSystem,
    build_containers,
    mask_to_indexes,
    sample_free_subgraphs,
)
from hypercycles.cycles import core_cycle, enumerate_cycles, is_cycle_free, is_linear_cycle
from hypercycles.errors import AnnihilationError
from hypercycles.experiments import theoretical_curve
from hypercycles.hypergraph import Hypergraph
from hypercycles.random_model import (
    CoupledSample,
    count_complete_copies,
    expected_cycle_copies,
    expected_edges,
)
from hypercycles.supersaturation import build_balanced_family, ek_partition, regularity_violations
from hypercycles.turan import estimate_random_ex, exact_ex, greedy_deletion_bound, star_bound

from conftest import ACCEPTANCE_LINES
from oracles import cycle_copies, max_free_subset, random_edges, uncovered_free_subsets


@contextmanager
def criterion(number, title):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException:
        line = f"ACCEPTANCE {number:2d} FAIL  {title}"
        raise
    else:
        line = f"ACCEPTANCE {number:2d} PASS  {title}"
    finally:
        line += f"  ({time.perf_counter() - t0:.1f}s)"
        ACCEPTANCE_LINES.append(line)
        print(line)


def _host(rng, r, n_max, e_max):
    n = int(rng.integers(max(r + 1, 5), n_max + 1))
    e = int(rng.integers(1, min(e_max, math.comb(n, r)) + 1))
    return Hypergraph(r, n, random_edges(rng, n, r, e))


def test_acceptance_01_enumeration_exact():
    rng = np.random.default_rng(101)
    with criterion(1, "cycle enumeration equals the subset oracle on 200 hosts"):
        nonzero = 0
        for i in range(200):
            r = (2, 3, 4)[i % 3]
            k = (4, 6)[(i // 3) % 2]
            G = _host(rng, r, 12, 25)
            got = set(enumerate_cycles(G, k).copies)
            assert got == cycle_copies(G.edges, r, k), (r, k, G.to_text())
            nonzero += bool(got)
        assert nonzero >= 20


def test_acceptance_02_exact_ex_oracle():
    rng = np.random.default_rng(202)
    with criterion(2, "exact_ex equals the 2^e subgraph maximum on 100 hosts"):
        with_copies = 0
        for i in range(100):
            r = (2, 3)[i % 2]
            G = _host(rng, r, 8 if r == 2 else 9, 20)
            res = exact_ex(G, 2)
            masks = [sum(1 << j for j in c) for c in cycle_copies(G.edges, r, 4)]
            with_copies += bool(masks)
            assert res.mode == "exact"
            assert res.value == max_free_subset(masks, len(G.edges))
            assert is_cycle_free(res.witness, 4) and len(res.witness.edges) == res.value
        assert with_copies >= 30


def test_acceptance_03_ek_guarantee():
    rng = np.random.default_rng(303)
    with criterion(3, "partition keeps r! e(G) / r^r edges on 500 instances"):
        for i in range(500):
            r = (2, 3, 4)[i % 3]
            G = _host(rng, r, 14, 80)
            H = ek_partition(G)
            assert len(H.graph.edges) * r**r >= math.factorial(r) * len(G.edges)


def _pipeline_hosts(rng, count):
    out = []
    while len(out) < count:
        r = int(rng.choice([3, 4]))
        n = int(rng.integers(9, 15))
        p = float(rng.uniform(0.15, 0.5))
        G = CoupledSample(n, r, int(rng.integers(1 << 30))).at(p)
        if G.edges:
            out.append(G)
    return out


def test_acceptance_04_regularization_contract():
    rng = np.random.default_rng(404)
    with criterion(4, "regularized graph satisfies (P1), (P2) and the trace mass identity"):
        runs = with_deletions = 0
        hosts = iter(_pipeline_hosts(rng, 400))
        while runs < 100:
            G = next(hosts)
            # small slack values make the deletion sweep actually fire
            lam = (4.0 * math.comb(G.r, 2) + 1, 4.0, 2.5)[runs % 3]
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                try:
                    bf = build_balanced_family(G, 2, lam, "auto")
                except AnnihilationError as exc:
                    assert exc.trace and all(t[-1] > 0 for t in exc.trace)
                    continue
            Hp = bf.regularized
            assert regularity_violations(Hp) == []
            assert sum(t[-1] for t in Hp.trace) == Hp.h0_edges - len(Hp.graph.edges)
            runs += 1
            with_deletions += bool(Hp.trace)
        assert with_deletions >= 5


def _projection_oracle(bf):
    """Copies of H' whose core pairs all lie in the chosen shadow and project into F."""
    Hp = bf.regularized
    a, b = bf.selection.parts
    shadow_sets = {frozenset(bf.shadow_family.copy_edges(c)) for c in bf.shadow_family.copies}
    host_index = bf.host.edge_index
    out = set()
    for c in enumerate_cycles(Hp.graph, 2 * bf.ell).copies:
        es = [Hp.graph.edges[i] for i in c]
        order = core_cycle(es)
        L = len(order)
        pairs = [(order[i], order[(i + 1) % L]) for i in range(L)]
        if all({Hp.part_of[u], Hp.part_of[v]} == {a, b} for u, v in pairs):
            proj = frozenset(tuple(sorted(p)) for p in pairs)
            if proj in shadow_sets:
                out.add(tuple(sorted(host_index[e] for e in es)))
    return out


def test_acceptance_05_balanced_family_audit():
    rng = np.random.default_rng(505)
    with criterion(5, "balanced family respects caps, members are cycles, lift is complete"):
        checked = nonempty = checked_nonempty = 0
        hosts = _pipeline_hosts(rng, 60)
        hosts += [CoupledSample(16, 4, s).at(0.5) for s in range(2, 4)]
        for G in hosts:
            bf = build_balanced_family(G, 2, 4.0 * math.comb(G.r, 2) + 1, "auto")
            assert bf.cap_violations() == []
            for j, cap in bf.lifted_caps.items():
                assert bf.family.max_degree(j) <= cap
            for c in bf.family.copies:
                assert is_linear_cycle(bf.family.copy_edges(c), G.r)
            nonempty += bool(bf.family.copies)
            if len(bf.regularized.graph.edges) <= 25:
                assert set(bf.family.copies) == _projection_oracle(bf)
                checked += 1
                checked_nonempty += bool(bf.family.copies)
        assert checked >= 20 and nonempty >= 1 and checked_nonempty >= 1


def _coverage_hosts(rng):
    hosts = [Hypergraph.complete(5, 2), Hypergraph.complete(6, 2).edge_subgraph(range(15)[:14])]
    while len(hosts) < 20:
        r = (2, 3)[len(hosts) % 2]
        n = 7 if r == 2 else 8
        G = Hypergraph(r, n, random_edges(rng, n, r, int(rng.integers(12, 19))))
        if enumerate_cycles(G, 4).copies:
            hosts.append(G)
    return hosts


def test_acceptance_06_container_coverage_exhaustive():
    rng = np.random.default_rng(606)
    with criterion(6, "every copy-free subset of 20 hosts lies in a container; shrinkage holds"):
        eps = 0.1
        for G in _coverage_hosts(rng):
            assert len(G.edges) <= 18
            fam_c = enumerate_cycles(G, 4)
            S = IncidenceSystem.from_family(fam_c)
            fam = build_containers(S, 0.3, eps, enforce_codegree=False)
            masks = fam_c.masks()
            _, bad = uncovered_free_subsets(masks, fam.containers, len(G.edges))
            assert len(bad) == 0
            for c in fam.containers:
                inside = sum(1 for h in masks if h & ~c == 0)
                assert inside <= (1 - eps) * len(masks)


def test_acceptance_07_iteration_soundness(k8_iteration):
    with criterion(7, "10^4 sampled copy-free subgraphs of K_8^(3) lie in iterated leaves"):
        fam, copies = k8_iteration
        n, k_target = 8, 0.8
        assert fam.steps >= 1
        assert max(fam.sizes()) <= k_target * n**2
        subs = sample_free_subgraphs(copies, 56, 10_000, np.random.default_rng(707))
        arr = np.array(subs, dtype=np.uint64)
        cmask = np.array(copies, dtype=np.uint64)
        conts = np.array(fam.containers, dtype=np.uint64)
        for lo in range(0, len(arr), 200):
            block = arr[lo:lo + 200]
            # each sample is copy-free
            assert not ((block[:, None] & cmask[None, :]) == cmask[None, :]).any()
            inside = ((block[:, None] & ~conts[None, :]) == 0).any(axis=1)
            assert inside.all()


def test_acceptance_08_coupled_monotonicity():
    with criterion(8, "exact ex is nondecreasing in p for 30 seeds on a 10-point grid"):
        grid = np.geomspace(0.02, 0.45, 10)
        values = np.zeros((30, len(grid)), dtype=int)
        for g, p in enumerate(grid):
            st = estimate_random_ex(9, 3, 2, float(p), 0, 30, "exact")
            for t in st.trials:
                assert t.mode == "exact"
                values[t.seed, g] = t.value
        assert (np.diff(values, axis=1) >= 0).all()


def test_acceptance_09_regime_one_deletion():
    with criterion(9, "greedy deletion keeps > 0.85 of the edges in the sparsest regime"):
        n, r = 10, 3
        # expected copies < 0.1 expected edges  <=>  N p^3 < 0.1 C(n,r)
        p_max = (0.1 * math.comb(n, r) / count_complete_copies(n, r, 4)) ** (1 / 3)
        p = 0.9 * p_max
        assert expected_cycle_copies(n, r, 2, p) < 0.1 * expected_edges(n, r, p)
        ratios, seed = [], 0
        while len(ratios) < 100:
            G = CoupledSample(n, r, seed).at(p)
            seed += 1
            if G.edges:
                ratios.append(greedy_deletion_bound(G, 2).value / len(G.edges))
        assert np.mean(ratios) > 0.85


def test_acceptance_10_star_bound():
    with criterion(10, "star bound on complete hosts equals C(n-1, r-1)"):
        for n, r in [(8, 3), (9, 4)]:
            res = star_bound(Hypergraph.complete(n, r), 2)
            assert res.value == math.comb(n - 1, r - 1)
            assert is_cycle_free(res.witness, 4)


def test_acceptance_11_curve_arithmetic():
    with criterion(11, "curve breakpoints agree to 1e-12 relative error"):
        for r in (3, 4, 5):
            for ell in (2, 3):
                for n in (1e3, 1e6, 1e9):
                    c = theoretical_curve(r, ell, n, [0.5])
                    assert abs(c.p0 * n**r - c.plateau) / c.plateau < 1e-12
                    assert abs(c.p1 * n ** (r - 1) - c.plateau) / c.plateau < 1e-12
                    assert max(c.continuity_errors().values()) < 1e-12
                    if r == 3:
                        p = n ** (-1 + 1 / (2 * ell - 2))
                        a = p ** (1 / (2 * ell - 1)) * n ** (1 + 2 / (2 * ell - 1))
                        b = p * n**2
                        assert abs(a - b) / b < 1e-12


def test_acceptance_12_expectation_formula():
    with criterion(12, "closed-form copy count matches enumeration in complete hosts"):
        for n, r, k in [(6, 2, 4), (8, 2, 4), (9, 3, 4), (10, 3, 4)]:
            assert count_complete_copies(n, r, k) == len(enumerate_cycles(Hypergraph.complete(n, r), k))
