"""
Classical values of CC tasks by exact enumeration.

Only deterministic strategies are enumerated: the success probability is
multilinear in p_E(m|x) and p_D(z|y,m), so its maximum over the product of
simplices is attained at a vertex, i.e. at a deterministic encoding paired with
its best deterministic decoding.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from oc_witness.enumeration import argmax_lowest, maximize_over_assignments, one_hot
from oc_witness.errors import OCWitnessError
from oc_witness.tasks.model import (
    CCTask,
    ClassicalStrategy,
    FunctionalCCTask,
    RelationalCCTask,
    ensure_valid,
)

logger = logging.getLogger(__name__)


def guessing_probability(task: CCTask) -> float:
    """Best success with no communication: Σ_y max_z Σ_x p(x,y)·1[z correct]."""
    weights = task.success_weights()
    return float(weights.sum(axis=0).max(axis=1).sum())


def _message_scores(weights: np.ndarray, encodings: np.ndarray, levels: int) -> np.ndarray:
    """(B, n_y, levels, n_z): mass of correct outcome z among inputs x sent as message m."""
    return np.einsum("bxm,xyz->bymz", one_hot(encodings, levels), weights)


def _optimum(
    task: CCTask, levels: int, budget: Optional[int], prior_tol: Optional[float] = None
) -> Tuple[float, ClassicalStrategy]:
    if levels < 1:
        raise OCWitnessError(f"levels must be >= 1, got {levels}")
    ensure_valid(task, prior_tol)
    weights = task.success_weights()

    def score(encodings: np.ndarray) -> np.ndarray:
        return _message_scores(weights, encodings, levels).max(axis=3).sum(axis=(1, 2))

    best = maximize_over_assignments(
        score, task.n_x, levels, budget=budget, label=f"encodings[{task.task_id}, levels={levels}]"
    )
    encoding = np.array(best.assignment, dtype=int)
    scores = _message_scores(weights, encoding[None, :], levels)[0]
    decoding = argmax_lowest(scores, axis=2)
    logger.debug("Task %s levels=%d optimum %.12g", task.task_id, levels, best.value)
    return best.value, ClassicalStrategy(encoding=encoding, decoding=decoding, levels=levels)


def classical_optimum(
    task: FunctionalCCTask, levels: int, budget: Optional[int] = None, prior_tol: Optional[float] = None
) -> Tuple[float, ClassicalStrategy]:
    """Exact p_C with a `levels`-valued message, and one optimal deterministic strategy."""
    if not isinstance(task, FunctionalCCTask):
        raise OCWitnessError("classical_optimum expects a FunctionalCCTask; use relational_classical_optimum")
    return _optimum(task, levels, budget, prior_tol)


def relational_classical_optimum(
    task: RelationalCCTask, levels: int, budget: Optional[int] = None, prior_tol: Optional[float] = None
) -> Tuple[float, ClassicalStrategy]:
    """As classical_optimum, with success meaning the decoded outcome lies in R(x, y)."""
    if not isinstance(task, RelationalCCTask):
        raise OCWitnessError("relational_classical_optimum expects a RelationalCCTask")
    return _optimum(task, levels, budget, prior_tol)


def best_classical_value(
    task: CCTask, levels: int, budget: Optional[int] = None, prior_tol: Optional[float] = None
) -> Tuple[float, ClassicalStrategy]:
    """Dispatch on the task kind."""
    if isinstance(task, RelationalCCTask):
        return relational_classical_optimum(task, levels, budget, prior_tol)
    return classical_optimum(task, levels, budget, prior_tol)


def strategy_value(task: CCTask, strategy: ClassicalStrategy) -> float:
    """Replay Σ_{x,y,m,z} p(x,y) p_E(m|x) p_D(z|y,m) 1[z correct] for any (stochastic) strategy."""
    strategy.check(task.n_outcomes)
    enc = strategy.encoding_matrix()
    dec = strategy.decoding_tensor(task.n_outcomes)
    if enc.shape[0] != task.n_x or dec.shape[0] != task.n_y:
        raise OCWitnessError("strategy tables do not match the task's input counts")
    return float(np.einsum("xyz,xm,ymz->", task.success_weights(), enc, dec))
