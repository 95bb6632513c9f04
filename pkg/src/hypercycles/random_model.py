"""The binomial random r-graph ``G(n, p)^(r)`` with a monotone coupling across p."""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .errors import PreconditionError
from .hypergraph import Hypergraph

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix(z: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def keyed_uniforms(seed: int, ranks: np.ndarray) -> np.ndarray:
    """Uniform reals in [0, 1) that depend only on ``(seed, rank)``."""
    with np.errstate(over="ignore"):
        key = _mix(np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))[0]
        z = key + (np.asarray(ranks, dtype=np.uint64) + np.uint64(1)) * _GOLDEN
        z = _mix(z)
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def colex_ranks(subsets: np.ndarray) -> np.ndarray:
    """Colexicographic rank ``sum_i C(c_i, i+1)`` of each sorted row."""
    subsets = np.asarray(subsets, dtype=np.int64)
    if subsets.size == 0:
        return np.zeros(len(subsets), dtype=np.uint64)
    top = int(subsets.max()) + 1
    r = subsets.shape[1]
    table = np.array([[math.comb(v, i + 1) for i in range(r)] for v in range(top)], dtype=np.uint64)
    out = np.zeros(len(subsets), dtype=np.uint64)
    for i in range(r):
        out += table[subsets[:, i], i]
    return out


class CoupledSample:
    """One array of keyed uniforms over all r-subsets of ``[n]``.

    ``at(p)`` keeps the subsets whose uniform is below p, so samples for
    ``p1 <= p2`` are nested.
    """

    def __init__(self, n: int, r: int, seed: int):
        if r < 2 or r > n:
            raise PreconditionError(f"need 2 <= r <= n, got r={r}, n={n}")
        self.n, self.r, self.seed = n, r, seed
        self.subsets = np.array(list(combinations(range(n), r)), dtype=np.int64).reshape(-1, r)
        self.uniforms = keyed_uniforms(seed, colex_ranks(self.subsets))

    def at(self, p: float) -> Hypergraph:
        if not 0.0 <= p <= 1.0:
            raise PreconditionError(f"p must lie in [0, 1], got {p}")
        keep = self.subsets[self.uniforms < p]
        return Hypergraph(self.r, self.n, map(tuple, keep.tolist()))


def sample(n: int, r: int, p: float, seed: int) -> Hypergraph:
    """``G(n, p)^(r)``, deterministic in ``(n, r, p, seed)``."""
    if not 0.0 <= p <= 1.0:
        raise PreconditionError(f"p must lie in [0, 1], got {p}")
    return CoupledSample(n, r, seed).at(p)


def chernoff_tail(mean: float, a: float) -> float:
    """``2 exp(-a^2 mean / 3)``, bounding ``P(|X - EX| >= a EX)`` for binomial X."""
    if not 0.0 < a <= 1.5:
        raise PreconditionError(f"a must lie in (0, 3/2], got {a}")
    return 2.0 * math.exp(-a * a * mean / 3.0)


def count_complete_copies(n: int, r: int, k: int) -> int:
    """Exact number of copies of ``C_k^(r)`` in ``K_n^(r)``.

    Ordered choices of the ``k(r-1)`` vertices, divided by the 2k dihedral
    relabelings of the core and the ``(r-2)!`` orders of each edge's pendants.
    """
    m = k * (r - 1)
    if n < m:
        return 0
    num = math.perm(n, m)
    den = 2 * k * math.factorial(r - 2) ** k
    q, rem = divmod(num, den)
    assert rem == 0
    return q


def expected_cycle_copies(n: int, r: int, ell: int, p: float) -> float:
    """Expected number of copies of ``C_{2l}^(r)`` in ``G(n, p)^(r)``."""
    if not 0.0 <= p <= 1.0:
        raise PreconditionError(f"p must lie in [0, 1], got {p}")
    return count_complete_copies(n, r, 2 * ell) * p ** (2 * ell)


def expected_edges(n: int, r: int, p: float) -> float:
    return math.comb(n, r) * p
