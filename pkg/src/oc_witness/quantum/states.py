"""Density matrices, POVMs and the small amount of operator algebra the constructions need."""

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from oc_witness import config
from oc_witness.errors import DomainError, InvalidStateError, ShapeMismatchError, ZeroProbabilityBranchError


def _hermitian_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def min_eigenvalue(m: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part (self-adjoint eigensolve, not Cholesky)."""
    return float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())


def _square(m: np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ShapeMismatchError(f"{what} must be a non-empty square matrix, got shape {arr.shape}")
    return arr


def check_density(rho: np.ndarray, tol: float) -> None:
    """Raise InvalidStateError unless rho is Hermitian, unit trace and PSD within tol."""
    if _hermitian_defect(rho) > tol:
        raise InvalidStateError(f"density matrix not Hermitian (defect {_hermitian_defect(rho):.3g})")
    if abs(np.trace(rho) - 1.0) > tol:
        raise InvalidStateError(f"density matrix trace is {np.trace(rho).real:.12g}, expected 1")
    lam = min_eigenvalue(rho)
    if lam < -tol:
        raise InvalidStateError(f"density matrix not positive semidefinite (min eigenvalue {lam:.3g})")


def check_effects(effects: np.ndarray, tol: float) -> None:
    for k, effect in enumerate(effects):
        if _hermitian_defect(effect) > tol:
            raise InvalidStateError(f"POVM effect {k} not Hermitian")
        if min_eigenvalue(effect) < -tol:
            raise InvalidStateError(f"POVM effect {k} not positive semidefinite")
    total = effects.sum(axis=0)
    if np.max(np.abs(total - np.eye(effects.shape[1]))) > tol:
        raise InvalidStateError("POVM effects do not sum to the identity")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A qudit state: Hermitian, unit trace, positive semidefinite (all within STATE_TOL)."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        rho = _square(self.entries, "density matrix")
        check_density(rho, config.STATE_TOL)
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])


@dataclass(frozen=True, eq=False)
class Povm:
    """Ordered effects, one per outcome: Hermitian, PSD, summing to the identity."""

    effects: np.ndarray  # (n_outcomes, dim, dim)

    def __post_init__(self) -> None:
        effects = np.asarray(self.effects, dtype=complex)
        if effects.ndim != 3 or effects.shape[1] != effects.shape[2] or effects.shape[0] == 0:
            raise ShapeMismatchError(f"POVM effects must have shape (k, d, d), got {effects.shape}")
        check_effects(effects, config.STATE_TOL)
        effects.setflags(write=False)
        object.__setattr__(self, "effects", effects)

    @property
    def dim(self) -> int:
        return int(self.effects.shape[1])

    @property
    def n_outcomes(self) -> int:
        return int(self.effects.shape[0])

    def traces(self) -> np.ndarray:
        """χ_z = tr(M_z) per outcome."""
        return np.real(np.trace(self.effects, axis1=1, axis2=2))


def ket(vector: Sequence[complex]) -> np.ndarray:
    """Normalized column amplitudes with the first nonzero amplitude made real positive."""
    psi = np.asarray(vector, dtype=complex).reshape(-1)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise InvalidStateError("zero vector is not a state")
    psi = psi / norm
    lead = np.flatnonzero(np.abs(psi) > 1e-12)[0]
    return psi * (abs(psi[lead]) / psi[lead])


def pure_state(vector: Sequence[complex]) -> DensityMatrix:
    psi = ket(vector)
    return DensityMatrix(np.outer(psi, psi.conj()))


def maximally_mixed(dim: int) -> DensityMatrix:
    return DensityMatrix(np.eye(dim) / dim)


def maximally_entangled(dim: int) -> DensityMatrix:
    """|Φ⟩ = Σ_i |ii⟩/√dim on dim⊗dim."""
    psi = np.eye(dim).reshape(-1)
    return pure_state(psi)


def projective_povm(basis: Iterable[Sequence[complex]]) -> Povm:
    """Rank-1 projectors onto an orthonormal basis (outcome k = k-th vector)."""
    vecs = [ket(v) for v in basis]
    return Povm(np.array([np.outer(v, v.conj()) for v in vecs]))


def binary_observable_povm(observable: np.ndarray) -> Povm:
    """{(I+O)/2, (I−O)/2} for a ±1-valued observable O; outcome 0 is the +1 eigenspace."""
    obs = _square(observable, "observable")
    eye = np.eye(obs.shape[0])
    return Povm(np.array([(eye + obs) / 2, (eye - obs) / 2]))


def trivial_povm(dim: int, n_outcomes: int = 2, outcome: int = 0) -> Povm:
    """The measurement that always returns `outcome`: {I, 0, ...}."""
    effects = np.zeros((n_outcomes, dim, dim), dtype=complex)
    effects[outcome] = np.eye(dim)
    return Povm(effects)


def orthogonal_mixture(rho: DensityMatrix) -> DensityMatrix:
    """(I − ρ)/(d − 1): the state completing ρ to the maximally mixed state."""
    d = rho.dim
    if d < 2:
        raise DomainError("orthogonal mixture needs dimension >= 2")
    return DensityMatrix((np.eye(d) - rho.entries) / (d - 1))


def _check_bipartite(op: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    arr = np.asarray(op, dtype=complex)
    if arr.shape != (d_a * d_b, d_a * d_b):
        raise ShapeMismatchError(f"operator of shape {arr.shape} does not factor as {d_a}x{d_b}")
    return arr.reshape(d_a, d_b, d_a, d_b)


def partial_trace_a_operator(op: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    """Tr_A of any (not necessarily normalized) operator on A⊗B."""
    return np.einsum("abad->bd", _check_bipartite(op, d_a, d_b))


def partial_trace_A(rho_ab: DensityMatrix, d_a: int, d_b: int) -> DensityMatrix:
    return DensityMatrix(partial_trace_a_operator(rho_ab.entries, d_a, d_b))


def conditional_operator(rho_ab: DensityMatrix, effect_on_a: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    """Unnormalized Tr_A[(E ⊗ I) ρ_AB]; its trace is the probability of E."""
    rho4 = _check_bipartite(rho_ab.entries, d_a, d_b)
    effect = np.asarray(effect_on_a, dtype=complex)
    if effect.shape != (d_a, d_a):
        raise ShapeMismatchError(f"effect of shape {effect.shape} does not act on dimension {d_a}")
    return np.einsum("ac,cbad->bd", effect, rho4)


def collapse_B(
    rho_ab: DensityMatrix, effect_on_a: np.ndarray, d_a: int, d_b: int
) -> Tuple[float, DensityMatrix]:
    """Probability of E on Alice's side and Bob's post-measurement state."""
    sigma = conditional_operator(rho_ab, effect_on_a, d_a, d_b)
    p = float(np.trace(sigma).real)
    if p < config.ZERO_PROBABILITY:
        raise ZeroProbabilityBranchError(f"zero-probability branch (p = {p:.3g})")
    return p, DensityMatrix(sigma / p)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> DensityMatrix:
    """Ginibre-distributed mixed state of the given rank (full rank by default)."""
    g = rng.normal(size=(dim, rank or dim)) + 1j * rng.normal(size=(dim, rank or dim))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_pure_state(dim: int, rng: np.random.Generator) -> DensityMatrix:
    return pure_state(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def random_povm(dim: int, n_outcomes: int, rng: np.random.Generator) -> Povm:
    """Normalized Wishart effects S^{-1/2} W_k S^{-1/2} with W_k = G_k G_k†, S = Σ_k W_k."""
    g = rng.normal(size=(n_outcomes, dim, dim)) + 1j * rng.normal(size=(n_outcomes, dim, dim))
    w = g @ np.conj(np.transpose(g, (0, 2, 1)))
    evals, evecs = np.linalg.eigh(w.sum(axis=0))
    inv_sqrt = evecs @ np.diag(evals ** -0.5) @ evecs.conj().T
    effects = inv_sqrt[None] @ w @ inv_sqrt[None]
    effects = (effects + np.conj(np.transpose(effects, (0, 2, 1)))) / 2
    return Povm(effects)
