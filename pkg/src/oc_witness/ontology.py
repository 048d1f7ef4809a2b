"""
Existence of preparation-noncontextual ontological models for finite operational fragments.

Ontic states are taken to be deterministic response atoms (one outcome per measurement).
Any outcome-indeterministic response function is a convex mixture of atoms and every
constraint below is linear in the preparation distributions μ_P, so restricting to atoms
loses nothing and the feasibility LP is exact.
"""

import itertools
import logging
from dataclasses import dataclass, field
from math import prod
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

from oc_witness import config
from oc_witness.enumeration import check_budget
from oc_witness.errors import OCWitnessError, ShapeMismatchError
from oc_witness.quantum.states import DensityMatrix, Povm
from oc_witness.run_log import log_run_event

logger = logging.getLogger(__name__)

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class OperationalFragment:
    """
    statistics[M] is an (n_P, k_M) table of p(k | P, M). declared_equivalences are extra
    zero-sum weight vectors over preparations asserted to be operationally equivalent.
    """

    statistics: Tuple[np.ndarray, ...]
    declared_equivalences: Tuple[np.ndarray, ...] = ()
    labels: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        stats = tuple(np.asarray(s, dtype=float) for s in self.statistics)
        if not stats:
            raise ShapeMismatchError("fragment needs at least one measurement")
        n_p = stats[0].shape[0] if stats[0].ndim == 2 else -1
        for m, table in enumerate(stats):
            if table.ndim != 2 or table.shape[0] != n_p or table.shape[1] == 0:
                raise ShapeMismatchError(f"statistics for measurement {m} must be (n_P, k) with n_P={n_p}")
            if np.any(table < -config.STATE_TOL) or np.max(np.abs(table.sum(axis=1) - 1.0)) > config.STATE_TOL:
                raise OCWitnessError(f"statistics for measurement {m} are not distributions")
        declared = tuple(np.asarray(w, dtype=float) for w in self.declared_equivalences)
        for w in declared:
            if w.shape != (n_p,):
                raise ShapeMismatchError(f"declared equivalence must have {n_p} weights")
        if self.labels and len(self.labels) != n_p:
            raise ShapeMismatchError(f"need {n_p} preparation labels, got {len(self.labels)}")
        object.__setattr__(self, "statistics", stats)
        object.__setattr__(self, "declared_equivalences", declared)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n_preparations(self) -> int:
        return int(self.statistics[0].shape[0])

    @property
    def outcome_counts(self) -> Tuple[int, ...]:
        return tuple(int(s.shape[1]) for s in self.statistics)

    def statistics_matrix(self) -> np.ndarray:
        """(Σ_M k_M, n_P): column P stacks every p(k|P,M)."""
        return np.hstack(self.statistics).T

    def permuted(self, order: Sequence[int]) -> "OperationalFragment":
        """Same fragment with preparations listed in `order`."""
        idx = list(order)
        return OperationalFragment(
            statistics=tuple(s[idx] for s in self.statistics),
            declared_equivalences=tuple(w[idx] for w in self.declared_equivalences),
            labels=tuple(self.labels[i] for i in idx) if self.labels else (),
        )


@dataclass
class OntologyCheckResult:
    status: str
    model: Optional[np.ndarray] = None  # (n_P, n_atoms)
    message: str = ""
    atoms: List[Tuple[int, ...]] = field(default_factory=list)
    equivalences: Optional[np.ndarray] = None
    residual: Optional[float] = None

    @property
    def pnc_model_exists(self) -> Optional[bool]:
        if self.status == INCONCLUSIVE:
            return None
        return self.status == FEASIBLE


def response_atoms(fragment: OperationalFragment, budget: Optional[int] = None) -> List[Tuple[int, ...]]:
    """Every deterministic assignment of an outcome to each measurement."""
    counts = fragment.outcome_counts
    check_budget(prod(counts), budget, "response atoms")
    return list(itertools.product(*(range(k) for k in counts)))


def operational_equivalences(fragment: OperationalFragment, tol: Optional[float] = None) -> np.ndarray:
    """Rows span the zero-sum weight vectors w with Σ_P w_P p(·|P) = 0 (empty ⇔ unique decompositions)."""
    tol = config.STATE_TOL if tol is None else tol
    system = np.vstack([fragment.statistics_matrix(), np.ones((1, fragment.n_preparations))])
    return null_space(system, rcond=tol).T


def fragment_from_states(
    states: Sequence[DensityMatrix], povms: Sequence[Povm], labels: Sequence[str] = ()
) -> OperationalFragment:
    """Born-rule statistics of every preparation under every measurement."""
    rhos = np.stack([s.entries for s in states])
    stats = tuple(np.einsum("pij,kji->pk", rhos, povm.effects).real for povm in povms)
    return OperationalFragment(statistics=stats, labels=tuple(labels))


def _replay_residual(
    fragment: OperationalFragment, model: np.ndarray, atoms: List[Tuple[int, ...]], constraints: np.ndarray
) -> float:
    worst = float(np.max(np.abs(model.sum(axis=1) - 1.0)))
    for m, table in enumerate(fragment.statistics):
        response = np.eye(table.shape[1])[[a[m] for a in atoms]]  # (n_atoms, k)
        worst = max(worst, float(np.max(np.abs(model @ response - table))))
    if constraints.size:
        worst = max(worst, float(np.max(np.abs(constraints @ model))))
    return worst


def pnc_model_exists(
    fragment: OperationalFragment,
    tol: Optional[float] = None,
    use_equivalences: bool = True,
    budget: Optional[int] = None,
) -> OntologyCheckResult:
    """
    LP feasibility over μ_P(λ) ≥ 0: Σ_λ μ_P(λ) = 1, Σ_λ μ_P(λ) 1[λ(M) = k] = p(k|P,M), and
    Σ_P w_P μ_P(λ) = 0 for every equivalence w. A model is only reported after replaying
    the statistics to REPLAY_TOL; otherwise the result is inconclusive.
    """
    tol = config.LP_TOL if tol is None else tol
    atoms = response_atoms(fragment, budget)
    n_p, n_atoms = fragment.n_preparations, len(atoms)
    equivalences = operational_equivalences(fragment) if use_equivalences else np.zeros((0, n_p))
    if use_equivalences and fragment.declared_equivalences:
        equivalences = np.vstack([equivalences, np.stack(fragment.declared_equivalences)])

    # Variables are μ[P, λ] flattened row-major.
    rows: List[np.ndarray] = []
    rhs: List[float] = []
    for p in range(n_p):
        row = np.zeros((n_p, n_atoms))
        row[p] = 1.0
        rows.append(row.ravel())
        rhs.append(1.0)
        for m, table in enumerate(fragment.statistics):
            for k in range(table.shape[1]):
                row = np.zeros((n_p, n_atoms))
                row[p] = [1.0 if a[m] == k else 0.0 for a in atoms]
                rows.append(row.ravel())
                rhs.append(float(table[p, k]))
    for w in equivalences:
        for lam in range(n_atoms):
            row = np.zeros((n_p, n_atoms))
            row[:, lam] = w
            rows.append(row.ravel())
            rhs.append(0.0)

    result = linprog(
        np.zeros(n_p * n_atoms),
        A_eq=np.array(rows),
        b_eq=np.array(rhs),
        bounds=(0, None),
        method="highs",
        options={"primal_feasibility_tolerance": tol},
    )
    log_run_event(
        "ONTOLOGY_LP",
        f"preparations={n_p} atoms={n_atoms} equivalences={len(equivalences)} status={result.status}",
    )
    if result.status == 2:
        return OntologyCheckResult(INFEASIBLE, message=result.message, atoms=atoms, equivalences=equivalences)
    if result.status != 0:
        return OntologyCheckResult(
            INCONCLUSIVE, message=f"inconclusive within tol: {result.message}", atoms=atoms, equivalences=equivalences
        )
    model = np.clip(result.x.reshape(n_p, n_atoms), 0.0, None)
    residual = _replay_residual(fragment, model, atoms, equivalences)
    if residual > config.REPLAY_TOL:
        logger.warning("LP model replays with residual %.3g > %.3g", residual, config.REPLAY_TOL)
        return OntologyCheckResult(
            INCONCLUSIVE,
            message=f"inconclusive within tol: model replay residual {residual:.3g}",
            atoms=atoms,
            equivalences=equivalences,
            residual=residual,
        )
    return OntologyCheckResult(
        FEASIBLE, model=model, message="model found", atoms=atoms, equivalences=equivalences, residual=residual
    )
