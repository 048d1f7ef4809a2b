"""
Built-in instances: the 2 -> 1 random access code (optimal and toy-theory protocols),
CHSH in success form, and hidden matching on n nodes. Priors are uniform throughout.
Generation is deterministic.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from oc_witness.bell import BellScenario, QuantumRealization
from oc_witness.bounds import beta_lower_bound
from oc_witness.errors import DomainError
from oc_witness.ontology import OperationalFragment, fragment_from_states
from oc_witness.quantum.protocols import PMProtocol
from oc_witness.quantum.states import (
    DensityMatrix,
    binary_observable_povm,
    maximally_entangled,
    projective_povm,
    pure_state,
)
from oc_witness.tasks.model import FunctionalCCTask, RelationalCCTask, uniform_prior

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
TOY_THETA = math.pi / 8

HIDDEN_MATCHING_SIZES = (2, 4, 8)


@dataclass(frozen=True)
class Fixture:
    """Expected value with a provenance tag: published, derived or trivial."""

    value: float
    provenance: str
    note: str = ""


@dataclass
class CaseStudy:
    name: str
    task: Optional[object] = None
    protocols: Dict[str, PMProtocol] = field(default_factory=dict)
    scenario: Optional[BellScenario] = None
    realization: Optional[QuantumRealization] = None
    fixtures: Dict[str, Fixture] = field(default_factory=dict)


def _bloch_state(x: float, z: float) -> DensityMatrix:
    return DensityMatrix((np.eye(2) + x * PAULI_X + z * PAULI_Z) / 2)


def make_rac() -> Tuple[FunctionalCCTask, PMProtocol, PMProtocol]:
    """Input x = 2·x1 + x2, Bob's y selects the bit he must output; d = 2."""
    f = np.array([[(x >> 1) & 1, x & 1] for x in range(4)])
    task = FunctionalCCTask(f=f, prior=uniform_prior(4, 2), d=2, task_id="rac")
    measurements = (binary_observable_povm(PAULI_Z), binary_observable_povm(PAULI_X))
    s = 1 / math.sqrt(2)
    optimal = PMProtocol(
        states=tuple(_bloch_state((-1) ** (x & 1) * s, (-1) ** (x >> 1) * s) for x in range(4)),
        measurements=measurements,
    )
    c, sn = math.cos(TOY_THETA), math.sin(TOY_THETA)
    toy = PMProtocol(
        states=(pure_state([c, sn]), pure_state([c, -sn]), pure_state([0, 1]), pure_state([0, 1])),
        measurements=measurements,
    )
    return task, optimal, toy


def make_chsh() -> Tuple[BellScenario, QuantumRealization]:
    """c = 1 iff u ⊕ v = x·y, uniform settings; maximally entangled Tsirelson realization."""
    coeffs = np.zeros((2, 2, 2, 2))
    for x, y, u, v in np.ndindex(coeffs.shape):
        coeffs[x, y, u, v] = float(u ^ v == x * y)
    scenario = BellScenario(coefficients=coeffs, prior=uniform_prior(2, 2), scenario_id="chsh")
    s = 1 / math.sqrt(2)
    realization = QuantumRealization(
        shared=maximally_entangled(2),
        d_a=2,
        d_b=2,
        alice_povms=(binary_observable_povm(PAULI_Z), binary_observable_povm(PAULI_X)),
        bob_povms=(
            binary_observable_povm(s * (PAULI_Z + PAULI_X)),
            binary_observable_povm(s * (PAULI_Z - PAULI_X)),
        ),
    )
    return scenario, realization


def matching_family(n: int) -> List[Tuple[Tuple[int, int], ...]]:
    """n = 2, 4: every perfect matching; n = 8: the pairings i <-> i XOR s for s in {1, 2, 4, 7}."""
    if n not in HIDDEN_MATCHING_SIZES:
        raise DomainError(f"hidden matching is built for n in {HIDDEN_MATCHING_SIZES}, got {n}")
    if n == 2:
        return [((0, 1),)]
    if n == 4:
        return [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]
    return [tuple((i, i ^ s) for i in range(n) if i < i ^ s) for s in (1, 2, 4, 7)]


def make_hidden_matching(n: int = 4) -> Tuple[RelationalCCTask, PMProtocol]:
    """
    x ∈ {0,1}^n (bit i is the i-th most significant), y a matching, outcome k = 2·edge + t
    meaning "x_i ⊕ x_j = t on edge (i, j)". States (1/√n) Σ_i (−1)^{x_i} |i⟩.
    """
    matchings = matching_family(n)
    n_x, n_y, n_edges = 2 ** n, len(matchings), n // 2
    bits = [[(x >> (n - 1 - i)) & 1 for i in range(n)] for x in range(n_x)]
    relation = tuple(
        tuple(frozenset(2 * e + (b[i] ^ b[j]) for e, (i, j) in enumerate(m)) for m in matchings)
        for b in bits
    )
    labels = tuple(f"edge{e}:t{t}" for e in range(n_edges) for t in (0, 1))
    flip = tuple(k ^ 1 for k in range(2 * n_edges))
    task = RelationalCCTask(
        relation=relation,
        prior=uniform_prior(n_x, n_y),
        outcome_labels=labels,
        flip=flip,
        d=n,
        task_id=f"hidden-matching-{n}",
    )
    eye = np.eye(n)
    measurements = []
    for m in matchings:
        basis = []
        for i, j in m:
            basis.append(eye[i] + eye[j])
            basis.append(eye[i] - eye[j])
        measurements.append(projective_povm(basis))
    states = tuple(pure_state([(-1) ** bi for bi in b]) for b in bits)
    return task, PMProtocol(states=states, measurements=tuple(measurements))


def make_toy_fragment(duplicate_one: bool = False) -> OperationalFragment:
    """Toy-theory RAC preparations ψ00, ψ01, ψ1 (twice if duplicate_one) under σ_z and σ_x."""
    _, _, toy = make_rac()
    states = list(toy.states[:3]) + ([toy.states[3]] if duplicate_one else [])
    labels = ["psi00", "psi01", "psi10"] + (["psi11"] if duplicate_one else [])
    return fragment_from_states(states, toy.measurements, labels)


def make_rac_fragment() -> OperationalFragment:
    """The four optimal RAC states under σ_z and σ_x (their equal mixtures coincide at I/2)."""
    _, optimal, _ = make_rac()
    return fragment_from_states(optimal.states, optimal.measurements, ["psi00", "psi01", "psi10", "psi11"])


def vector_in_subspace_beta(n: float) -> float:
    """β lower bound with p_Qd = 1, d = log2 n, p_G = 1/2, C = n^(1/3), p_S = 2/3."""
    return beta_lower_bound(1.0, math.log2(n), 0.5, n ** (1.0 / 3.0), 2.0 / 3.0)


def hidden_matching_beta(n: float) -> float:
    """β lower bound with p_Qd = 1, d = log2 n, p_G = 1/2, C = sqrt(4n/3), p_S = 3/4."""
    return beta_lower_bound(1.0, math.log2(n), 0.5, math.sqrt(4.0 * n / 3.0), 0.75)


def rac_case_study() -> CaseStudy:
    task, optimal, toy = make_rac()
    return CaseStudy(
        name="rac",
        task=task,
        protocols={"optimal": optimal, "toy": toy},
        fixtures={
            "p_C2": Fixture(0.75, "published"),
            "p_G": Fixture(0.5, "derived"),
            "pm_value_optimal": Fixture(math.cos(math.pi / 8) ** 2, "derived"),
            "pm_value_toy": Fixture((5 + math.sqrt(2)) / 8, "published", "reported as approximately 0.8"),
            "chi": Fixture(1.0, "derived"),
        },
    )


def chsh_case_study() -> CaseStudy:
    scenario, realization = make_chsh()
    return CaseStudy(
        name="chsh",
        scenario=scenario,
        realization=realization,
        fixtures={
            "local_bound": Fixture(0.75, "derived"),
            "quantum_value": Fixture((2 + math.sqrt(2)) / 4, "derived"),
        },
    )


def hidden_matching_case_study(n: int = 4) -> CaseStudy:
    task, protocol = make_hidden_matching(n)
    fixtures = {
        "pm_value": Fixture(1.0, "published"),
        "chi": Fixture(n / 2, "derived", "Hilbert-dimension units"),
        "p_G": Fixture(0.5, "derived"),
        "oc_quantum_value": Fixture((2.0 + n - 1.0 - n / 2) / n, "derived"),
    }
    if n == 4:
        fixtures["p_C2"] = Fixture(0.75, "derived", "exhaustive over 2^16 encodings; ties the quantum OC value")
    return CaseStudy(name=f"hidden-matching-{n}", task=task, protocols={"protocol": protocol}, fixtures=fixtures)


def case_study(name: str, n: int = 4) -> CaseStudy:
    if name == "rac":
        return rac_case_study()
    if name == "chsh":
        return chsh_case_study()
    if name == "hidden-matching":
        return hidden_matching_case_study(n)
    raise DomainError(f"unknown case study {name!r}")
