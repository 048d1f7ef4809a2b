"""Oblivious-communication tasks and the two kinds of encodings the engine works with."""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from oc_witness import config
from oc_witness.errors import OCWitnessError, ShapeMismatchError
from oc_witness.tasks.model import ValidationResult

CONSTRUCTION_KINDS = ("primary", "dual", "relational", "bell")


@dataclass(frozen=True)
class ConstructionRecord:
    """Where an OC task came from: source task id, construction kind, message dimension."""

    source_task_id: str
    kind: str
    d: int
    notes: str = ""

    def __post_init__(self) -> None:
        if self.kind not in CONSTRUCTION_KINDS:
            raise OCWitnessError(f"unknown construction kind {self.kind!r}")


@dataclass(frozen=True, eq=False)
class OCTask:
    """
    Oblivious game with input a = (a1, a2), Bob input b, output c and oblivious variable a1.
    payoff[a1, a2, b, c] = p(a1, a2, b) · payoff coefficient, so the figure of merit of any
    strategy is Σ W · p(c | a, b).
    """

    cond_a2: np.ndarray  # (n_a1, n_a2): p(a2 | a1)
    payoff: np.ndarray  # (n_a1, n_a2, n_b, n_c)
    record: Optional[ConstructionRecord] = None
    task_id: str = "oc"

    def __post_init__(self) -> None:
        object.__setattr__(self, "cond_a2", np.asarray(self.cond_a2, dtype=float))
        object.__setattr__(self, "payoff", np.asarray(self.payoff, dtype=float))

    @property
    def n_a1(self) -> int:
        return int(self.payoff.shape[0])

    @property
    def n_a2(self) -> int:
        return int(self.payoff.shape[1])

    @property
    def n_b(self) -> int:
        return int(self.payoff.shape[2])

    @property
    def n_c(self) -> int:
        return int(self.payoff.shape[3])

    def normalized_payoff(self) -> np.ndarray:
        """
        Ŵ = W / p(a2|a1), zero where p(a2|a1) = 0. This is the weight a single message
        level sees: the oblivious constraint fixes the mass p(a2|a1) per a1, so each
        level of the message carries a full conditional distribution over a2.
        """
        cond = self.cond_a2[:, :, None, None]
        out = np.zeros_like(self.payoff)
        np.divide(self.payoff, cond, out=out, where=cond > 0)
        return out


def validate_oc_task(task: OCTask) -> ValidationResult:
    """Diagnose shape, conditional and payoff problems without raising."""
    result = ValidationResult()
    if task.payoff.ndim != 4:
        result.add("payoff_shape", f"payoff must be 4-D (a1, a2, b, c), got shape {task.payoff.shape}")
        return result
    if task.cond_a2.shape != task.payoff.shape[:2]:
        result.add("cond_shape", f"cond_a2 shape {task.cond_a2.shape} does not match payoff {task.payoff.shape[:2]}")
        return result
    for a1, row in enumerate(task.cond_a2):
        if np.any(row < -config.PRIOR_TOL) or abs(row.sum() - 1.0) > config.PRIOR_TOL:
            result.add("cond_row", "p(a2|a1) row is not a distribution", (a1,))
    for idx in zip(*np.nonzero(task.payoff < 0)):
        result.add("payoff_negative", "negative payoff entry", idx)
    return result


def ensure_valid_oc(task: OCTask) -> None:
    result = validate_oc_task(task)
    if not result.ok:
        raise OCWitnessError(f"invalid OC task {task.task_id!r}: " + "; ".join(result.messages()))


@dataclass(frozen=True)
class ExtremalEncoding:
    """Deterministic vertex of the single-message polytope: a1 -> a2."""

    e: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "e", tuple(int(v) for v in self.e))

    def matrix(self, n_a2: int) -> np.ndarray:
        if any(v < 0 or v >= n_a2 for v in self.e):
            raise ShapeMismatchError(f"encoding {self.e} has values outside 0..{n_a2 - 1}")
        return np.eye(n_a2)[list(self.e)]


@dataclass(frozen=True, eq=False)
class ObliviousEncoding:
    """p_E(m | a1, a2) as an (n_a1, n_a2, n_messages) table."""

    table: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "table", np.asarray(self.table, dtype=float))

    @property
    def n_messages(self) -> int:
        return int(self.table.shape[2])

    def message_marginals(self, cond_a2: np.ndarray) -> np.ndarray:
        """(n_a1, n_messages): Σ_{a2} p(a2|a1) p_E(m|a1,a2)."""
        return np.einsum("xa,xam->xm", cond_a2, self.table)

    def check(self, cond_a2: np.ndarray, tol: Optional[float] = None) -> None:
        """Raise unless rows are distributions and the message marginal is a1-independent."""
        tol = config.OBLIVIOUS_TOL if tol is None else tol
        if self.table.ndim != 3 or self.table.shape[:2] != cond_a2.shape:
            raise ShapeMismatchError(f"encoding shape {self.table.shape} does not match p(a2|a1) {cond_a2.shape}")
        if np.any(self.table < -tol) or np.max(np.abs(self.table.sum(axis=2) - 1.0)) > tol:
            raise OCWitnessError("encoding rows are not distributions")
        marginals = self.message_marginals(cond_a2)
        deviation = float(np.max(np.abs(marginals - marginals[0])))
        if deviation > tol:
            raise OCWitnessError(f"encoding is not oblivious (message marginal deviates by {deviation:.3g})")
