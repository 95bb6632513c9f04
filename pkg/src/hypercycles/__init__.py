"""Linear even cycles in random hypergraphs: enumeration, balanced supersaturation,
containers and Turán-number estimates, each checkable against brute force."""

from .cycles import CycleFamily, enumerate_cycles, is_cycle_free, is_linear_cycle
from .errors import (
    AnnihilationError,
    CodegreeConditionError,
    ContainerError,
    PreconditionError,
    WorkBudgetExceeded,
)
from .hypergraph import Hypergraph
from .kernels import BACKEND
from .random_model import CoupledSample, count_complete_copies, expected_cycle_copies, sample
from .turan import TuranResult, exact_ex, greedy_deletion_bound, star_bound

__version__ = "0.1.0"

__all__ = [
    "AnnihilationError",
    "BACKEND",
    "CodegreeConditionError",
    "ContainerError",
    "CoupledSample",
    "CycleFamily",
    "Hypergraph",
    "PreconditionError",
    "TuranResult",
    "WorkBudgetExceeded",
    "count_complete_copies",
    "enumerate_cycles",
    "exact_ex",
    "expected_cycle_copies",
    "greedy_deletion_bound",
    "is_cycle_free",
    "is_linear_cycle",
    "sample",
    "star_bound",
]
