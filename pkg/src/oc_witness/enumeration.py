"""
Exhaustive enumeration of deterministic assignments (maps from n positions to L levels).

Used for classical encodings x -> m, extremal oblivious encodings a1 -> a2 and
local Bell strategies x -> u. Assignments are indexed lexicographically with
position 0 most significant, scored in vectorized batches, and reduced in index
order so ties always resolve to the lowest index, whatever the worker count.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Tuple

import numpy as np

from oc_witness import config
from oc_witness.errors import BudgetExceededError
from oc_witness.run_log import log_run_event

logger = logging.getLogger(__name__)

BatchScore = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class EnumerationResult:
    """Best assignment found: its lexicographic index, the assignment itself and its score."""

    index: int
    assignment: Tuple[int, ...]
    value: float
    visited: int


def space_size(n_positions: int, n_levels: int) -> int:
    return n_levels ** n_positions


def check_budget(required: int, budget: Optional[int] = None, what: str = "assignments") -> None:
    """Raise BudgetExceededError if `required` points exceed the budget (never truncate silently)."""
    limit = config.ENUMERATION_BUDGET if budget is None else budget
    if required > limit:
        raise BudgetExceededError(required, limit, what)


def iter_assignments(
    n_positions: int, n_levels: int, budget: Optional[int] = None
) -> Iterator[Tuple[int, ...]]:
    """Yield every assignment exactly once, lexicographic order."""
    check_budget(space_size(n_positions, n_levels), budget)
    return itertools.product(range(n_levels), repeat=n_positions)


def assignment_digits(start: int, stop: int, n_positions: int, n_levels: int) -> np.ndarray:
    """Rows are the assignments with indices start..stop-1 (shape (stop-start, n_positions))."""
    idx = np.arange(start, stop, dtype=np.int64)
    powers = n_levels ** np.arange(n_positions - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % n_levels


def one_hot(digits: np.ndarray, n_levels: int) -> np.ndarray:
    """(B, n) integer digits -> (B, n, n_levels) float indicator tensor."""
    return np.eye(n_levels)[digits]


def first_argmax(values: np.ndarray, tol: float = config.TIE_TOL) -> int:
    """Lowest index whose value is within tol of the maximum."""
    best = values.max()
    return int(np.flatnonzero(values >= best - tol)[0])


def argmax_lowest(values: np.ndarray, axis: int = -1, tol: float = config.TIE_TOL) -> np.ndarray:
    """Vectorized first_argmax along `axis`."""
    best = values.max(axis=axis, keepdims=True)
    return np.argmax(values >= best - tol, axis=axis)


def maximize_over_assignments(
    score: BatchScore,
    n_positions: int,
    n_levels: int,
    budget: Optional[int] = None,
    batch: Optional[int] = None,
    workers: Optional[int] = None,
    label: str = "assignments",
) -> EnumerationResult:
    """
    Maximize `score` over all n_levels**n_positions assignments.
    `score` maps a (B, n_positions) digit array to B values and must be pure.
    """
    total = space_size(n_positions, n_levels)
    check_budget(total, budget, label)
    batch = batch or config.ENUMERATION_BATCH
    workers = workers or config.ENUMERATION_WORKERS
    ranges: List[Tuple[int, int]] = [(s, min(s + batch, total)) for s in range(0, total, batch)]
    log_run_event("ENUMERATE_START", f"{label}={total} batches={len(ranges)} workers={workers}")

    def run(bounds: Tuple[int, int]) -> Tuple[int, float]:
        start, stop = bounds
        values = np.asarray(score(assignment_digits(start, stop, n_positions, n_levels)), dtype=float)
        local = first_argmax(values)
        return start + local, float(values[local])

    if workers > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partial = list(pool.map(run, ranges))
    else:
        partial = [run(r) for r in ranges]

    best_index, best_value = partial[0]
    for index, value in partial[1:]:
        if value > best_value + config.TIE_TOL:
            best_index, best_value = index, value
    assignment = tuple(int(v) for v in assignment_digits(best_index, best_index + 1, n_positions, n_levels)[0])
    log_run_event("ENUMERATE_DONE", f"{label}={total} best_index={best_index} value={best_value:.12g}")
    return EnumerationResult(index=best_index, assignment=assignment, value=best_value, visited=total)
