"""
Prepare-and-measure (PM) and entanglement-assisted (EA) protocols, their Born-rule
values against a task's success weights, and the EA -> PM conversion.
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from oc_witness.errors import ShapeMismatchError
from oc_witness.quantum.states import DensityMatrix, Povm, check_density, check_effects
from oc_witness.tasks.model import CCTask

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PMProtocol:
    """States ρ_x indexed by Alice's input, measurements indexed by Bob's input, all on one dimension."""

    states: Tuple[DensityMatrix, ...]
    measurements: Tuple[Povm, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "measurements", tuple(self.measurements))
        if not self.states or not self.measurements:
            raise ShapeMismatchError("protocol needs at least one state and one measurement")
        dims = {s.dim for s in self.states} | {m.dim for m in self.measurements}
        if len(dims) != 1:
            raise ShapeMismatchError(f"protocol dimensions disagree: {sorted(dims)}")
        if len({m.n_outcomes for m in self.measurements}) != 1:
            raise ShapeMismatchError("measurements have different outcome counts")

    @property
    def d(self) -> int:
        return self.states[0].dim

    def state_array(self) -> np.ndarray:
        return np.stack([s.entries for s in self.states])

    def effect_array(self) -> np.ndarray:
        """(n_y, n_z, d, d)."""
        return np.stack([m.effects for m in self.measurements])

    def check_tolerance(self, tol: float) -> None:
        """Re-check every state and POVM against tol; constructors only enforce STATE_TOL."""
        for rho in self.states:
            check_density(rho.entries, tol)
        for povm in self.measurements:
            check_effects(povm.effects, tol)

    def check_against(self, task: CCTask) -> None:
        if len(self.states) != task.n_x or len(self.measurements) != task.n_y:
            raise ShapeMismatchError(
                f"protocol has {len(self.states)} states / {len(self.measurements)} measurements, "
                f"task {task.task_id!r} needs {task.n_x} / {task.n_y}"
            )
        if self.measurements[0].n_outcomes != task.n_outcomes:
            raise ShapeMismatchError(
                f"measurements have {self.measurements[0].n_outcomes} outcomes, task has {task.n_outcomes}"
            )


@dataclass(frozen=True, eq=False)
class EAProtocol:
    """
    Shared ρ_AB on d_a⊗d_b. Alice measures alice_povms[x] (d outcomes) and sends the
    outcome m; Bob measures bob_povms[y][m] on his half.
    """

    shared: DensityMatrix
    d_a: int
    d_b: int
    alice_povms: Tuple[Povm, ...]
    bob_povms: Tuple[Tuple[Povm, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "alice_povms", tuple(self.alice_povms))
        object.__setattr__(self, "bob_povms", tuple(tuple(row) for row in self.bob_povms))
        if self.shared.dim != self.d_a * self.d_b:
            raise ShapeMismatchError(f"shared state dim {self.shared.dim} != {self.d_a}*{self.d_b}")
        if not self.alice_povms or not self.bob_povms:
            raise ShapeMismatchError("protocol needs at least one Alice and one Bob setting")
        if any(p.dim != self.d_a for p in self.alice_povms):
            raise ShapeMismatchError("Alice POVM does not act on d_a")
        if len({p.n_outcomes for p in self.alice_povms}) != 1:
            raise ShapeMismatchError("Alice POVMs must share the message alphabet")
        outcomes = set()
        for y, row in enumerate(self.bob_povms):
            if len(row) != self.d:
                raise ShapeMismatchError(f"Bob setting {y} has {len(row)} POVMs, expected one per message ({self.d})")
            for povm in row:
                if povm.dim != self.d_b:
                    raise ShapeMismatchError(f"Bob POVM for setting {y} does not act on d_b")
                outcomes.add(povm.n_outcomes)
        if len(outcomes) != 1:
            raise ShapeMismatchError("Bob POVMs have different outcome counts")

    @property
    def d(self) -> int:
        """Message dimension: Alice's outcome count."""
        return self.alice_povms[0].n_outcomes

    @property
    def n_outcomes(self) -> int:
        return self.bob_povms[0][0].n_outcomes

    def alice_effects(self) -> np.ndarray:
        """(n_x, d, d_a, d_a)."""
        return np.stack([p.effects for p in self.alice_povms])

    def bob_effects(self) -> np.ndarray:
        """(n_y, d, n_z, d_b, d_b)."""
        return np.stack([np.stack([p.effects for p in row]) for row in self.bob_povms])

    def check_tolerance(self, tol: float) -> None:
        check_density(self.shared.entries, tol)
        for povm in self.alice_povms + tuple(p for row in self.bob_povms for p in row):
            check_effects(povm.effects, tol)

    def check_against(self, task: CCTask) -> None:
        if len(self.alice_povms) != task.n_x or len(self.bob_povms) != task.n_y:
            raise ShapeMismatchError(f"EA protocol settings do not match task {task.task_id!r}")
        if self.n_outcomes != task.n_outcomes:
            raise ShapeMismatchError(f"Bob outcomes {self.n_outcomes} != task outcomes {task.n_outcomes}")

    def conditional_states(self) -> np.ndarray:
        """Unnormalized σ_{x,m} = Tr_A[(M^x_m ⊗ I)ρ_AB], shape (n_x, d, d_b, d_b)."""
        rho4 = self.shared.entries.reshape(self.d_a, self.d_b, self.d_a, self.d_b)
        return np.einsum("cbad,xmac->xmbd", rho4, self.alice_effects())


def pm_value(task: CCTask, protocol: PMProtocol) -> float:
    """p_Qd = Σ G[x,y,z] tr(ρ_x M^y_z)."""
    protocol.check_against(task)
    born = np.einsum("xij,yzji->xyz", protocol.state_array(), protocol.effect_array()).real
    return float(np.einsum("xyz,xyz->", task.success_weights(), born))


def chi(task: CCTask, protocol: PMProtocol) -> float:
    """χ = Σ G[x,y,z] tr(M^y_z)."""
    protocol.check_against(task)
    traces = np.stack([m.traces() for m in protocol.measurements])
    return float(np.einsum("xyz,yz->", task.success_weights(), traces))


def ea_value(task: CCTask, protocol: EAProtocol) -> float:
    """Σ G[x,y,z] Σ_m tr(ρ_AB M^x_m ⊗ M^{y,m}_z), straight from the joint state."""
    protocol.check_against(task)
    rho4 = protocol.shared.entries.reshape(protocol.d_a, protocol.d_b, protocol.d_a, protocol.d_b)
    joint = np.einsum("abcd,xmca,ymzdb->xyz", rho4, protocol.alice_effects(), protocol.bob_effects()).real
    return float(np.einsum("xyz,xyz->", task.success_weights(), joint))


def _basis_projector(d: int, m: int) -> np.ndarray:
    out = np.zeros((d, d))
    out[m, m] = 1.0
    return out


def ea_to_pm(protocol: EAProtocol) -> PMProtocol:
    """
    PM protocol on d' = d·e (e = d_b): ρ_x = Σ_m |m⟩⟨m| ⊗ σ_{x,m}, Bob's y-th POVM is
    the block effect Σ_m |m⟩⟨m| ⊗ M^{y,m}_z. Zero-probability branches leave a zero block.
    """
    d = protocol.d
    sigma = protocol.conditional_states()
    states = [
        DensityMatrix(sum(np.kron(_basis_projector(d, m), sigma[x, m]) for m in range(d)))
        for x in range(sigma.shape[0])
    ]
    bob = protocol.bob_effects()
    measurements = [
        Povm(np.array([
            sum(np.kron(_basis_projector(d, m), bob[y, m, z]) for m in range(d))
            for z in range(protocol.n_outcomes)
        ]))
        for y in range(bob.shape[0])
    ]
    logger.debug("EA->PM conversion: d=%d e=%d d'=%d", d, protocol.d_b, d * protocol.d_b)
    return PMProtocol(states=tuple(states), measurements=tuple(measurements))


def _check_kraus(kraus_by_message: Sequence[Sequence[np.ndarray]], d: int, d_b: int) -> Tuple[Tuple[np.ndarray, ...], ...]:
    if len(kraus_by_message) != d:
        raise ShapeMismatchError(f"need one channel per message ({d}), got {len(kraus_by_message)}")
    channels = tuple(tuple(np.asarray(k, dtype=complex) for k in ops) for ops in kraus_by_message)
    for m, ops in enumerate(channels):
        if not ops or any(k.ndim != 2 or k.shape[1] != d_b for k in ops):
            raise ShapeMismatchError(f"Kraus operators for message {m} must map dimension {d_b}")
        if len({k.shape[0] for k in ops}) != 1:
            raise ShapeMismatchError(f"Kraus operators for message {m} disagree on output dimension")
        completeness = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(completeness - np.eye(d_b))) > 1e-9:
            raise ShapeMismatchError(f"channel for message {m} is not trace preserving")
    return channels


def cptp_ea_protocol(
    shared: DensityMatrix,
    d_a: int,
    d_b: int,
    alice_povms: Sequence[Povm],
    kraus_by_message: Sequence[Sequence[np.ndarray]],
    measurements: Sequence[Povm],
) -> EAProtocol:
    """
    EA protocol where Bob, on message m, applies the channel φ_m (Kraus operators)
    and then a fixed measurement for y; his effective effects are φ_m†(M^y_z).
    """
    d = alice_povms[0].n_outcomes
    channels = _check_kraus(kraus_by_message, d, d_b)
    e_out = channels[0][0].shape[0]
    if any(ops[0].shape[0] != e_out for ops in channels) or any(p.dim != e_out for p in measurements):
        raise ShapeMismatchError(f"channels and measurements must share the output dimension {e_out}")
    bob = []
    for povm in measurements:
        row = []
        for ops in channels:
            effects = np.array([sum(k.conj().T @ effect @ k for k in ops) for effect in povm.effects])
            row.append(Povm(effects))
        bob.append(tuple(row))
    return EAProtocol(shared=shared, d_a=d_a, d_b=d_b, alice_povms=tuple(alice_povms), bob_povms=tuple(bob))


def ea_to_pm_cptp(
    shared: DensityMatrix,
    d_a: int,
    d_b: int,
    alice_povms: Sequence[Povm],
    kraus_by_message: Sequence[Sequence[np.ndarray]],
    measurements: Sequence[Povm],
) -> PMProtocol:
    """PM protocol on the channels' output dimension: ρ_x = Σ_m φ_m(σ_{x,m}), measurements unchanged."""
    protocol = cptp_ea_protocol(shared, d_a, d_b, alice_povms, kraus_by_message, measurements)
    channels = _check_kraus(kraus_by_message, protocol.d, d_b)
    sigma = protocol.conditional_states()
    states = []
    for x in range(sigma.shape[0]):
        rho = sum(k @ sigma[x, m] @ k.conj().T for m, ops in enumerate(channels) for k in ops)
        states.append(DensityMatrix(rho))
    return PMProtocol(states=tuple(states), measurements=tuple(measurements))
