"""One-way communication-complexity tasks (functional and relational) and classical strategies."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Tuple

import numpy as np

from oc_witness import config
from oc_witness.errors import OCWitnessError, ShapeMismatchError


@dataclass(frozen=True)
class ValidationProblem:
    """One violated invariant: machine code, human message, offending index (if any)."""

    code: str
    message: str
    index: Tuple[int, ...] = ()


@dataclass
class ValidationResult:
    problems: List[ValidationProblem] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def add(self, code: str, message: str, index: Tuple[int, ...] = ()) -> None:
        self.problems.append(ValidationProblem(code, message, tuple(int(i) for i in index)))

    def messages(self) -> List[str]:
        return [p.message for p in self.problems]


class CCTask(ABC):
    """
    A one-way CC task: Alice holds x, Bob holds y, Bob outputs an outcome z.
    Every success quantity is a contraction against success_weights() = p(x,y)·1[z correct].
    """

    prior: np.ndarray
    d: int
    task_id: str

    @property
    def n_x(self) -> int:
        return int(self.prior.shape[0])

    @property
    def n_y(self) -> int:
        return int(self.prior.shape[1])

    @property
    @abstractmethod
    def n_outcomes(self) -> int:
        """Size of Bob's outcome alphabet."""
        ...

    @abstractmethod
    def success_indicator(self) -> np.ndarray:
        """Boolean tensor (n_x, n_y, n_outcomes): True where outcome z is correct for (x, y)."""
        ...

    def success_weights(self) -> np.ndarray:
        return self.prior[:, :, None] * self.success_indicator()

    def p_y(self) -> np.ndarray:
        return self.prior.sum(axis=0)

    def p_x_given_y(self) -> np.ndarray:
        """Conditional p(x|y); columns with p(y) = 0 are left at zero (they contribute nothing)."""
        py = self.p_y()
        out = np.zeros_like(self.prior)
        nz = py > 0
        out[:, nz] = self.prior[:, nz] / py[nz]
        return out


@dataclass(frozen=True, eq=False)
class FunctionalCCTask(CCTask):
    """Binary goal function f(x, y) ∈ {0,1} with joint prior p(x,y) and message dimension d."""

    f: np.ndarray
    prior: np.ndarray
    d: int = 2
    task_id: str = "task"

    def __post_init__(self) -> None:
        object.__setattr__(self, "f", np.asarray(self.f, dtype=int))
        object.__setattr__(self, "prior", np.asarray(self.prior, dtype=float))

    @property
    def n_outcomes(self) -> int:
        return 2

    def success_indicator(self) -> np.ndarray:
        return self.f[:, :, None] == np.arange(2)[None, None, :]


@dataclass(frozen=True, eq=False)
class RelationalCCTask(CCTask):
    """
    Relational task: any outcome in R(x, y) is accepted. `flip` is an optional
    involution on outcome indices (hidden matching: (i, j, t) -> (i, j, 1⊕t)).
    """

    relation: Tuple[Tuple[FrozenSet[int], ...], ...]
    prior: np.ndarray
    outcome_labels: Tuple[str, ...]
    flip: Optional[Tuple[int, ...]] = None
    d: int = 2
    task_id: str = "task"

    def __post_init__(self) -> None:
        object.__setattr__(self, "prior", np.asarray(self.prior, dtype=float))
        rel = tuple(tuple(frozenset(int(z) for z in cell) for cell in row) for row in self.relation)
        object.__setattr__(self, "relation", rel)
        object.__setattr__(self, "outcome_labels", tuple(str(s) for s in self.outcome_labels))
        if self.flip is not None:
            object.__setattr__(self, "flip", tuple(int(z) for z in self.flip))

    @property
    def n_outcomes(self) -> int:
        return len(self.outcome_labels)

    def success_indicator(self) -> np.ndarray:
        out = np.zeros((self.n_x, self.n_y, self.n_outcomes), dtype=bool)
        for x, row in enumerate(self.relation):
            for y, cell in enumerate(row):
                out[x, y, sorted(cell)] = True
        return out

    def flipped_indicator(self) -> np.ndarray:
        """Indicator of R̃(x, y) = flip(R(x, y))."""
        if self.flip is None:
            raise OCWitnessError(f"task {self.task_id!r} has no outcome flip involution")
        return self.success_indicator()[:, :, list(self.flip)]


@dataclass(frozen=True, eq=False)
class ClassicalStrategy:
    """
    Encoding x -> m and decoding (y, m) -> z, deterministic (integer tables) or
    stochastic (row-stochastic tables p_E(m|x), p_D(z|y,m)).
    """

    encoding: np.ndarray  # (n_x,) ints or (n_x, levels) floats
    decoding: np.ndarray  # (n_y, levels) ints or (n_y, levels, n_z) floats
    levels: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "encoding", np.asarray(self.encoding))
        object.__setattr__(self, "decoding", np.asarray(self.decoding))

    @property
    def is_deterministic(self) -> bool:
        return self.encoding.ndim == 1 and self.decoding.ndim == 2

    def encoding_matrix(self) -> np.ndarray:
        if self.encoding.ndim == 1:
            return np.eye(self.levels)[self.encoding.astype(int)]
        return self.encoding.astype(float)

    def decoding_tensor(self, n_outcomes: int) -> np.ndarray:
        if self.decoding.ndim == 2:
            return np.eye(n_outcomes)[self.decoding.astype(int)]
        return self.decoding.astype(float)

    def check(self, n_outcomes: int, tol: float = config.PRIOR_TOL) -> None:
        """Raise ShapeMismatchError unless every stochastic row is a distribution."""
        for name, table in (("encoding", self.encoding_matrix()), ("decoding", self.decoding_tensor(n_outcomes))):
            if table.shape[-1] != (self.levels if name == "encoding" else n_outcomes):
                raise ShapeMismatchError(f"{name} table has wrong last dimension {table.shape}")
            if np.any(table < -tol) or np.any(np.abs(table.sum(axis=-1) - 1.0) > tol):
                raise ShapeMismatchError(f"{name} rows are not probability distributions")


def _validate_prior(
    task: CCTask, result: ValidationResult, expected: Optional[Tuple[int, int]], tol: float
) -> None:
    prior = task.prior
    if prior.ndim != 2 or (expected is not None and prior.shape != expected):
        result.add("prior_shape", f"prior shape {prior.shape} does not match inputs {expected}")
        return
    for idx in zip(*np.nonzero(prior < 0)):
        result.add("prior_negative", "negative prior entry", idx)
    if abs(prior.sum() - 1.0) > tol:
        result.add("prior_sum", f"prior not normalized (sums to {prior.sum():.15g})")


def validate_task(task: CCTask, prior_tol: Optional[float] = None) -> ValidationResult:
    """Diagnose every violated invariant. Never raises. prior_tol defaults to PRIOR_TOL."""
    tol = config.PRIOR_TOL if prior_tol is None else prior_tol
    result = ValidationResult()
    if isinstance(task, FunctionalCCTask):
        f = task.f
        if f.ndim != 2:
            result.add("f_shape", f"f must be a 2-D table, got shape {f.shape}")
            return result
        _validate_prior(task, result, f.shape, tol)
        for idx in zip(*np.nonzero((f != 0) & (f != 1))):
            result.add("f_value", "f entry not binary", idx)
    elif isinstance(task, RelationalCCTask):
        rows = len(task.relation)
        cols = {len(r) for r in task.relation}
        if rows == 0 or len(cols) != 1:
            result.add("relation_shape", "relation must be a rectangular n_x × n_y table")
            return result
        _validate_prior(task, result, (rows, cols.pop()), tol)
        n_z = task.n_outcomes
        for x, row in enumerate(task.relation):
            for y, cell in enumerate(row):
                if not cell:
                    result.add("relation_empty", "empty relation cell", (x, y))
                elif min(cell) < 0 or max(cell) >= n_z:
                    result.add("relation_range", "relation outcome index out of range", (x, y))
        if task.flip is not None:
            flip = task.flip
            if sorted(flip) != list(range(n_z)) or any(flip[flip[z]] != z for z in range(n_z)):
                result.add("flip", "flip is not an involution on the outcome indices")
    else:
        result.add("kind", f"unsupported task type {type(task).__name__}")
        return result
    if task.d < 2:
        result.add("d", f"message dimension d must be >= 2, got {task.d}")
    return result


def ensure_valid(task: CCTask, prior_tol: Optional[float] = None) -> None:
    """Raise OCWitnessError listing every problem, for operations whose precondition is a valid task."""
    result = validate_task(task, prior_tol)
    if not result.ok:
        raise OCWitnessError(f"invalid task {task.task_id!r}: " + "; ".join(result.messages()))


def uniform_prior(n_x: int, n_y: int) -> np.ndarray:
    return np.full((n_x, n_y), 1.0 / (n_x * n_y))



def is_binary_outcome(task: CCTask) -> bool:
    return task.n_outcomes == 2
