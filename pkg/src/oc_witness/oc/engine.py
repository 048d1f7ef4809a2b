"""
PNC bounds and quantum values for OC tasks.

The upper bound enumerates the deterministic vertices a1 -> a2 of the single-message
encoding polytope and decodes each optimally; the lower bound samples genuine oblivious
encodings with several message levels. Any oblivious encoding scores at most the upper
bound, so the pair sandwiches the preparation-noncontextual value.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from oc_witness import config
from oc_witness.enumeration import argmax_lowest, iter_assignments, maximize_over_assignments, one_hot
from oc_witness.errors import OCWitnessError, ProvenanceError, ShapeMismatchError
from oc_witness.oc.task import ExtremalEncoding, ObliviousEncoding, OCTask, ensure_valid_oc
from oc_witness.quantum.states import DensityMatrix, Povm
from oc_witness.run_log import log_run_event
from oc_witness.tasks.model import CCTask, ClassicalStrategy, FunctionalCCTask, RelationalCCTask

logger = logging.getLogger(__name__)

StateTable = Sequence[Sequence[Optional[DensityMatrix]]]


@dataclass(frozen=True)
class ObliviousnessReport:
    ok: bool
    max_deviation: float
    deviation_from_expected: Optional[float]
    tol: float


def enumerate_extremal_encodings(n_a1: int, n_a2: int, budget: Optional[int] = None) -> Iterator[ExtremalEncoding]:
    """All n_a2**n_a1 maps a1 -> a2, lexicographic, each exactly once."""
    for e in iter_assignments(n_a1, n_a2, budget):
        yield ExtremalEncoding(e)


def optimal_oc_decoding(task: OCTask, enc: ExtremalEncoding) -> Tuple[float, Tuple[int, ...]]:
    """Best output per b for a fixed vertex: c*(b) = argmax_c Σ_{a1} Ŵ[a1, e(a1), b, c], lowest c on ties."""
    if len(enc.e) != task.n_a1:
        raise ShapeMismatchError(f"encoding has {len(enc.e)} entries, task has n_a1={task.n_a1}")
    scores = np.einsum("xa,xayc->yc", enc.matrix(task.n_a2), task.normalized_payoff())
    decoding = argmax_lowest(scores, axis=1)
    return float(scores.max(axis=1).sum()), tuple(int(c) for c in decoding)


def pnc_upper_bound(
    task: OCTask, budget: Optional[int] = None
) -> Tuple[float, ExtremalEncoding, Tuple[int, ...]]:
    """Maximum of optimal_oc_decoding over every extremal encoding (batched)."""
    ensure_valid_oc(task)
    weights = task.normalized_payoff()

    def score(digits: np.ndarray) -> np.ndarray:
        per_b = np.einsum("bxa,xayc->byc", one_hot(digits, task.n_a2), weights)
        return per_b.max(axis=2).sum(axis=1)

    best = maximize_over_assignments(
        score, task.n_a1, task.n_a2, budget=budget, label=f"extremal encodings[{task.task_id}]"
    )
    enc = ExtremalEncoding(best.assignment)
    value, decoding = optimal_oc_decoding(task, enc)
    log_run_event("PNC_UPPER_BOUND", f"task={task.task_id} bound={value:.12g} encoding={enc.e}")
    return value, enc, decoding


def oblivious_encoding_value(task: OCTask, encoding: ObliviousEncoding) -> Tuple[float, np.ndarray]:
    """Exact value of an oblivious encoding with the optimal decoding per (message, b)."""
    encoding.check(task.cond_a2)
    scores = np.einsum("xam,xayc->myc", encoding.table, task.payoff)
    return float(scores.max(axis=2).sum()), argmax_lowest(scores, axis=2)


def _north_west_corner(rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Vertex of the transportation polytope with the given marginals (both summing to 1)."""
    rows, cols = rows.astype(float).copy(), cols.astype(float).copy()
    plan = np.zeros((rows.size, cols.size))
    i = j = 0
    while i < rows.size and j < cols.size:
        if rows[i] <= cols[j]:
            plan[i, j] = rows[i]
            cols[j] -= rows[i]
            i += 1
        else:
            plan[i, j] = cols[j]
            rows[i] -= cols[j]
            j += 1
    return plan


def _random_coupling(rows: np.ndarray, cols: np.ndarray, rng: np.random.Generator, vertices: int) -> np.ndarray:
    """Dirichlet mixture of north-west-corner vertices taken under random row/column orders."""
    weights = rng.dirichlet(np.ones(vertices))
    plan = np.zeros((rows.size, cols.size))
    for w in weights:
        rp, cp = rng.permutation(rows.size), rng.permutation(cols.size)
        vertex = _north_west_corner(rows[rp], cols[cp])
        plan[np.ix_(rp, cp)] += w * vertex
    return plan


def random_oblivious_encoding(
    cond_a2: np.ndarray, messages: int, rng: np.random.Generator, vertices: int = 3
) -> ObliviousEncoding:
    """
    Exact oblivious encoding: one shared message law p_E(m) and, per a1, a coupling of
    p(a2|a1) with p_E(m); p_E(m|a1,a2) is the coupling row normalized by its mass.
    """
    p_m = rng.dirichlet(np.ones(messages))
    n_a1, n_a2 = cond_a2.shape
    table = np.full((n_a1, n_a2, messages), 1.0 / messages)
    for a1 in range(n_a1):
        plan = _random_coupling(cond_a2[a1], p_m, rng, vertices)
        mass = plan.sum(axis=1)
        live = mass > 0
        table[a1, live] = plan[live] / mass[live, None]
    return ObliviousEncoding(table)


def sampled_oblivious_lower_bound(
    task: OCTask,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    messages: Optional[int] = None,
) -> float:
    """Best value over `samples` random oblivious encodings; reproducible for a fixed seed."""
    samples = config.SAMPLES if samples is None else samples
    seed = config.SEED if seed is None else seed
    if samples < 1:
        raise OCWitnessError(f"samples must be >= 1, got {samples}")
    ensure_valid_oc(task)
    messages = messages or max(2, task.n_a2)
    rng = np.random.default_rng(seed)
    best = -np.inf
    for _ in range(samples):
        value, _ = oblivious_encoding_value(task, random_oblivious_encoding(task.cond_a2, messages, rng))
        best = max(best, value)
    log_run_event("OBLIVIOUS_SAMPLES", f"task={task.task_id} samples={samples} seed={seed} best={best:.12g}")
    return float(best)


def _check_state_table(task: OCTask, states: StateTable, povms: Sequence[Povm]) -> None:
    if len(states) != task.n_a1 or any(len(row) != task.n_a2 for row in states):
        raise ShapeMismatchError(f"state table must be {task.n_a1}x{task.n_a2}")
    if len(povms) != task.n_b or any(p.n_outcomes != task.n_c for p in povms):
        raise ShapeMismatchError(f"need {task.n_b} POVMs with {task.n_c} outcomes")
    dims = {p.dim for p in povms} | {s.dim for row in states for s in row if s is not None}
    if len(dims) != 1:
        raise ShapeMismatchError(f"states and POVMs disagree on dimension: {sorted(dims)}")


def oc_quantum_value(task: OCTask, states: StateTable, povms: Sequence[Povm]) -> float:
    """Σ W[a1,a2,b,c] tr(ρ_{a1,a2} N^b_c); a state may be None only where its payoff is zero."""
    _check_state_table(task, states, povms)
    effects = np.stack([p.effects for p in povms])
    total = 0.0
    for a1, row in enumerate(states):
        for a2, rho in enumerate(row):
            weight = task.payoff[a1, a2]
            if rho is None:
                if np.any(weight > 0):
                    raise ShapeMismatchError(f"missing state for ({a1}, {a2}) which carries payoff")
                continue
            born = np.einsum("ij,bcji->bc", rho.entries, effects).real
            total += float(np.einsum("bc,bc->", weight, born))
    return total


def verify_oblivious(
    states: StateTable,
    cond_a2: np.ndarray,
    tol: Optional[float] = None,
    expected: Optional[np.ndarray] = None,
) -> ObliviousnessReport:
    """Max operator-norm distance between the a1-mixtures Σ_{a2} p(a2|a1) ρ_{a1,a2} (and to `expected`)."""
    tol = config.OBLIVIOUS_TOL if tol is None else tol
    cond_a2 = np.asarray(cond_a2, dtype=float)
    mixtures: List[np.ndarray] = []
    for a1, row in enumerate(states):
        mix = None
        for a2, rho in enumerate(row):
            if rho is None:
                if cond_a2[a1, a2] > config.ZERO_PROBABILITY:
                    raise ShapeMismatchError(f"missing state for ({a1}, {a2}) with nonzero weight")
                continue
            term = cond_a2[a1, a2] * rho.entries
            mix = term if mix is None else mix + term
        if mix is None:
            raise ShapeMismatchError(f"no states for a1={a1}")
        mixtures.append(mix)
    deviation = max(
        (float(np.linalg.norm(a - b, 2)) for i, a in enumerate(mixtures) for b in mixtures[i + 1:]),
        default=0.0,
    )
    from_expected = None
    if expected is not None:
        target = np.asarray(expected, dtype=complex)
        from_expected = max(float(np.linalg.norm(m - target, 2)) for m in mixtures)
    ok = deviation <= tol and (from_expected is None or from_expected <= tol)
    log_run_event("VERIFY_OBLIVIOUS", f"ok={ok} deviation={deviation:.3g} expected={from_expected}")
    return ObliviousnessReport(ok=ok, max_deviation=deviation, deviation_from_expected=from_expected, tol=tol)


def extremal_to_cc_strategy(
    cc_task: CCTask, task: OCTask, enc: ExtremalEncoding, decoding: Sequence[int]
) -> ClassicalStrategy:
    """
    Two-level classical strategy whose CC value equals the OC value of (enc, decoding).
    primary:    m' = e(x),    z = c*(y) ⊕ m'
    relational: m' = e(x),    z = flip^{m'}(c*(y))
    dual:       m' = c*(x),   z = m' ⊕ e(y)
    """
    record = task.record
    if record is None or record.source_task_id != cc_task.task_id:
        raise ProvenanceError(
            f"OC task {task.task_id!r} was not constructed from CC task {cc_task.task_id!r}"
        )
    decoding = np.asarray(decoding, dtype=int)
    e = np.asarray(enc.e, dtype=int)
    if record.kind == "primary" and isinstance(cc_task, FunctionalCCTask):
        if e.size != cc_task.n_x or decoding.size != cc_task.n_y:
            raise ShapeMismatchError("encoding/decoding do not match the CC task")
        table = np.stack([decoding, 1 - decoding], axis=1)
        return ClassicalStrategy(encoding=e, decoding=table, levels=2)
    if record.kind == "relational" and isinstance(cc_task, RelationalCCTask):
        if e.size != cc_task.n_x or decoding.size != cc_task.n_y:
            raise ShapeMismatchError("encoding/decoding do not match the CC task")
        flip = np.asarray(cc_task.flip, dtype=int)
        table = np.stack([decoding, flip[decoding]], axis=1)
        return ClassicalStrategy(encoding=e, decoding=table, levels=2)
    if record.kind == "dual" and isinstance(cc_task, FunctionalCCTask):
        if e.size != cc_task.n_y or decoding.size != cc_task.n_x:
            raise ShapeMismatchError("encoding/decoding do not match the CC task")
        table = np.stack([e, 1 - e], axis=1)
        return ClassicalStrategy(encoding=decoding, decoding=table, levels=2)
    raise ProvenanceError(f"no CC strategy mapping for a {record.kind!r} construction of {type(cc_task).__name__}")
