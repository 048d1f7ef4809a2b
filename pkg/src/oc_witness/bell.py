"""Bell scenarios in nonnegative payoff form: local bound, quantum value, Alice-side collapses."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from oc_witness import config
from oc_witness.enumeration import argmax_lowest, check_budget, maximize_over_assignments, one_hot
from oc_witness.errors import OCWitnessError, ShapeMismatchError
from oc_witness.quantum.states import DensityMatrix, Povm, conditional_operator
from oc_witness.run_log import log_run_event

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BellScenario:
    """Coefficients c[x, y, u, v] ≥ 0 and a joint prior p(x, y); B = Σ c p(x,y) p(u,v|x,y)."""

    coefficients: np.ndarray
    prior: np.ndarray
    scenario_id: str = "bell"

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coefficients, dtype=float)
        prior = np.asarray(self.prior, dtype=float)
        if coeffs.ndim != 4 or prior.shape != coeffs.shape[:2]:
            raise ShapeMismatchError(f"coefficients {coeffs.shape} and prior {prior.shape} do not match")
        if np.any(coeffs < 0):
            raise OCWitnessError("Bell coefficients must be nonnegative (rescale correlator forms first)")
        if np.any(prior < 0) or abs(prior.sum() - 1.0) > config.PRIOR_TOL:
            raise OCWitnessError("prior not normalized")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "prior", prior)

    @property
    def shape(self) -> Tuple[int, int, int, int]:
        return tuple(int(n) for n in self.coefficients.shape)

    def weights(self) -> np.ndarray:
        """K[x, u, y, v] = c[x,y,u,v] p(x,y)."""
        return np.transpose(self.coefficients * self.prior[:, :, None, None], (0, 2, 1, 3))


@dataclass(frozen=True, eq=False)
class QuantumRealization:
    shared: DensityMatrix
    d_a: int
    d_b: int
    alice_povms: Tuple[Povm, ...]
    bob_povms: Tuple[Povm, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "alice_povms", tuple(self.alice_povms))
        object.__setattr__(self, "bob_povms", tuple(self.bob_povms))
        if self.shared.dim != self.d_a * self.d_b:
            raise ShapeMismatchError(f"shared state dim {self.shared.dim} != {self.d_a}*{self.d_b}")
        for side, povms, dim in (("Alice", self.alice_povms, self.d_a), ("Bob", self.bob_povms, self.d_b)):
            if not povms or any(p.dim != dim for p in povms):
                raise ShapeMismatchError(f"{side} POVMs must act on dimension {dim}")
            if len({p.n_outcomes for p in povms}) != 1:
                raise ShapeMismatchError(f"{side} POVMs have different outcome counts")

    def check_against(self, scenario: BellScenario) -> None:
        n_x, n_y, n_u, n_v = scenario.shape
        if (len(self.alice_povms), len(self.bob_povms)) != (n_x, n_y):
            raise ShapeMismatchError("realization settings do not match the scenario")
        if (self.alice_povms[0].n_outcomes, self.bob_povms[0].n_outcomes) != (n_u, n_v):
            raise ShapeMismatchError("realization outcomes do not match the scenario")


@dataclass(frozen=True)
class LocalStrategy:
    """Deterministic local assignment: Alice outputs alice[x], Bob outputs bob[y]."""

    alice: Tuple[int, ...]
    bob: Tuple[int, ...]

    def value(self, scenario: BellScenario) -> float:
        c = scenario.coefficients
        total = 0.0
        for x, u in enumerate(self.alice):
            for y, v in enumerate(self.bob):
                total += c[x, y, u, v] * scenario.prior[x, y]
        return total


def local_bound(scenario: BellScenario, budget: Optional[int] = None) -> Tuple[float, LocalStrategy]:
    """
    Exact local-realist maximum. Shared randomness only mixes deterministic strategies, so
    the optimum is a vertex; Alice's assignments are enumerated and Bob best-responds.
    """
    n_x, n_y, n_u, n_v = scenario.shape
    check_budget(n_u ** n_x * n_v ** n_y, budget, "local strategies")
    weights = scenario.weights()

    def score(digits: np.ndarray) -> np.ndarray:
        per_y = np.einsum("bxu,xuyv->byv", one_hot(digits, n_u), weights)
        return per_y.max(axis=2).sum(axis=1)

    best = maximize_over_assignments(score, n_x, n_u, budget=budget, label=f"alice strategies[{scenario.scenario_id}]")
    per_y = np.einsum("xu,xuyv->yv", np.eye(n_u)[list(best.assignment)], weights)
    bob = tuple(int(v) for v in argmax_lowest(per_y, axis=1))
    log_run_event("LOCAL_BOUND", f"scenario={scenario.scenario_id} value={best.value:.12g}")
    return best.value, LocalStrategy(alice=best.assignment, bob=bob)


def correlations(realization: QuantumRealization) -> np.ndarray:
    """p(u, v | x, y) = tr[ρ_AB (A^x_u ⊗ B^y_v)] as an (n_x, n_y, n_u, n_v) array."""
    r = realization
    rho4 = r.shared.entries.reshape(r.d_a, r.d_b, r.d_a, r.d_b)
    alice = np.stack([p.effects for p in r.alice_povms])
    bob = np.stack([p.effects for p in r.bob_povms])
    return np.einsum("abcd,xuca,yvdb->xyuv", rho4, alice, bob).real


def bell_quantum_value(scenario: BellScenario, realization: QuantumRealization) -> float:
    realization.check_against(scenario)
    return float(np.einsum("xyuv,xy,xyuv->", scenario.coefficients, scenario.prior, correlations(realization)))


def alice_marginals_and_collapses(
    realization: QuantumRealization,
) -> Tuple[np.ndarray, List[List[Optional[DensityMatrix]]]]:
    """p_Q(u|x) and Bob's collapsed states ρ^B_{u|x}; zero-probability branches get (0, None)."""
    r = realization
    n_u = r.alice_povms[0].n_outcomes
    probs = np.zeros((len(r.alice_povms), n_u))
    collapses: List[List[Optional[DensityMatrix]]] = []
    for x, povm in enumerate(r.alice_povms):
        row: List[Optional[DensityMatrix]] = []
        for u, effect in enumerate(povm.effects):
            sigma = conditional_operator(r.shared, effect, r.d_a, r.d_b)
            p = float(np.trace(sigma).real)
            if p < config.ZERO_PROBABILITY:
                logger.debug("Dropping zero-probability branch x=%d u=%d (p=%.3g)", x, u, p)
                row.append(None)
                continue
            probs[x, u] = p
            row.append(DensityMatrix(sigma / p))
        collapses.append(row)
    return probs, collapses


def relabel_scenario(
    scenario: BellScenario,
    perm_x: Sequence[int],
    perm_y: Sequence[int],
    perm_u: Sequence[int],
    perm_v: Sequence[int],
) -> BellScenario:
    """Rename settings and outcomes: entry (x, y, u, v) moves to (perm_x[x], perm_y[y], perm_u[u], perm_v[v])."""
    coeffs = np.empty_like(scenario.coefficients)
    coeffs[np.ix_(perm_x, perm_y, perm_u, perm_v)] = scenario.coefficients
    prior = np.empty_like(scenario.prior)
    prior[np.ix_(perm_x, perm_y)] = scenario.prior
    return BellScenario(coefficients=coeffs, prior=prior, scenario_id=f"{scenario.scenario_id}/relabeled")


def swap_parties(
    scenario: BellScenario, realization: Optional[QuantumRealization] = None
) -> Tuple[BellScenario, Optional[QuantumRealization]]:
    """Exchange Alice and Bob (and, if given, the tensor factors of the shared state)."""
    swapped = BellScenario(
        coefficients=np.transpose(scenario.coefficients, (1, 0, 3, 2)),
        prior=scenario.prior.T,
        scenario_id=f"{scenario.scenario_id}/swapped",
    )
    if realization is None:
        return swapped, None
    r = realization
    rho = r.shared.entries.reshape(r.d_a, r.d_b, r.d_a, r.d_b).transpose(1, 0, 3, 2)
    return swapped, QuantumRealization(
        shared=DensityMatrix(rho.reshape(r.d_a * r.d_b, r.d_a * r.d_b)),
        d_a=r.d_b,
        d_b=r.d_a,
        alice_povms=r.bob_povms,
        bob_povms=r.alice_povms,
    )
