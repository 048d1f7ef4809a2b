"""
Closed-form bounds and advantage conditions, plus the report that collects them.

Logarithms of the message dimension are base 2: d levels carry log2(d) bits.
"""

import math
from dataclasses import dataclass
from typing import Optional

from scipy.stats import binom

from oc_witness.errors import DomainError

# A quantum OC value has to clear p_C2 by more than this to count as a violation.
VIOLATION_MARGIN = 1e-9


def _require_advantage_range(p: float, name: str) -> None:
    if not 0.5 < p <= 1.0:
        raise DomainError(f"{name} must lie in (1/2, 1], got {p}")


def chernoff_repetition_bound(p: float, r: float) -> float:
    """1 − exp(−r (p − 1/2)² / (2p)): Chernoff estimate for a majority vote over r rounds."""
    _require_advantage_range(p, "p")
    if r < 1:
        raise DomainError(f"repetitions must be >= 1, got {r}")
    return 1.0 - math.exp(-r / (2.0 * p) * (p - 0.5) ** 2)


def pumping_lower_bound(p_C2: float, d: int) -> float:
    """Success guaranteed with d levels by repeating a 2-level strategy log2(d) times and voting."""
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    return chernoff_repetition_bound(p_C2, math.log2(d))


def pumping_exact(p_C2: float, r: int, ties_fail: bool = False) -> float:
    """
    Exact majority-vote success: P[Binomial(r, p) > r/2]. Even r is only accepted with
    ties_fail=True, where a tied vote counts as a failure.
    """
    if not 0.0 <= p_C2 <= 1.0:
        raise DomainError(f"p_C2 must lie in [0, 1], got {p_C2}")
    if r < 1:
        raise DomainError(f"repetitions must be >= 1, got {r}")
    if r % 2 == 0 and not ties_fail:
        raise DomainError("even repetition counts need an explicit tie convention (ties_fail=True)")
    return float(binom.sf(r // 2, r, p_C2))


def two_level_upper_bound(p_S: float, bits: float) -> float:
    """1/2 + sqrt(2 p_S / C), clamped to 1."""
    if not 0.0 < p_S <= 1.0:
        raise DomainError(f"p_S must lie in (0, 1], got {p_S}")
    if bits < 1:
        raise DomainError(f"C must be >= 1, got {bits}")
    return min(1.0, 0.5 + math.sqrt(2.0 * p_S / bits))


def c12_value(p_Cd: float, d: int, chi: float) -> float:
    """(2 p + d − 1 − χ) / d: the OC value reached by the orthogonal-mixture protocol."""
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    return (2.0 * p_Cd + d - 1.0 - chi) / d


def condition_c12(p_Cd: float, d: int, chi: float, p_C2: float) -> bool:
    return bool(c12_value(p_Cd, d, chi) >= p_C2)


def condition_c1(p_Cd: float, d_prime: int, chi: float, p_C2: float) -> bool:
    """c12 evaluated at the dimension d' of an entanglement-assisted protocol converted to PM."""
    return bool(c12_value(p_Cd, d_prime, chi) >= p_C2)


def combined_value(p_C2: float, p_G: float, d: int) -> float:
    """d (p_C2 + p_G − 1) + 2 exp(−log2(d)/(2 p_C2) (p_C2 − 1/2)²)."""
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    if not 0.0 < p_C2 <= 1.0:
        raise DomainError(f"p_C2 must lie in (0, 1], got {p_C2}")
    return d * (p_C2 + p_G - 1.0) + 2.0 * math.exp(-math.log2(d) / (2.0 * p_C2) * (p_C2 - 0.5) ** 2)


def combined_condition(p_C2: float, p_G: float, d: int) -> bool:
    return bool(combined_value(p_C2, p_G, d) <= 1.0)


def beta_lower_bound(p_Qd: float, d: int, p_G: float, bits: float, p_S: float) -> float:
    """sqrt(C) (2 p_Qd + d/2 − d p_G − 1) / (d sqrt(2 p_S))."""
    if bits < 1:
        raise DomainError(f"C must be >= 1, got {bits}")
    if not 0.0 < p_S <= 1.0:
        raise DomainError(f"p_S must lie in (0, 1], got {p_S}")
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    return math.sqrt(bits) * (2.0 * p_Qd + d / 2.0 - d * p_G - 1.0) / (d * math.sqrt(2.0 * p_S))


def beta_ratio(p_Q_star: float, p_C2: float) -> Optional[float]:
    """(p_Q* − 1/2) / (p_C2 − 1/2); None when the classical advantage is zero."""
    if math.isclose(p_C2, 0.5, rel_tol=0.0, abs_tol=VIOLATION_MARGIN):
        return None
    if p_C2 < 0.5:
        raise DomainError(f"p_C2 must be at least 1/2, got {p_C2}")
    return (p_Q_star - 0.5) / (p_C2 - 0.5)


@dataclass(frozen=True)
class ViolationReport:
    """Every scalar of one analysis run. Optional fields are None when they could not be computed."""

    task_id: str
    d: int
    p_G: float
    p_C2: float
    p_Cd: Optional[float]
    p_Qd: float
    chi: float
    d_prime: Optional[int]
    p_NC_upper: float
    p_NC_sampled_lower: float
    p_Q_star: float
    alpha_NC: float
    alpha_Q_star: float
    beta_lower: Optional[float]
    c12: Optional[bool]
    c1: Optional[bool]
    combined: bool
    combined_value: float
    violation: bool


def is_violation(p_Q_star: float, p_C2: float) -> bool:
    return bool(p_Q_star > p_C2 + VIOLATION_MARGIN)
