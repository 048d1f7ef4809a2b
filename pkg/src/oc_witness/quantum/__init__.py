"""Dense quantum kernel: states, POVMs, PM/EA protocols and their values."""

from oc_witness.quantum.protocols import (
    EAProtocol,
    PMProtocol,
    chi,
    cptp_ea_protocol,
    ea_to_pm,
    ea_to_pm_cptp,
    ea_value,
    pm_value,
)
from oc_witness.quantum.states import (
    DensityMatrix,
    Povm,
    binary_observable_povm,
    collapse_B,
    maximally_entangled,
    maximally_mixed,
    orthogonal_mixture,
    partial_trace_A,
    projective_povm,
    pure_state,
    random_density_matrix,
    random_povm,
    random_pure_state,
    trivial_povm,
)

__all__ = [
    "DensityMatrix",
    "Povm",
    "PMProtocol",
    "EAProtocol",
    "pm_value",
    "chi",
    "ea_value",
    "ea_to_pm",
    "cptp_ea_protocol",
    "ea_to_pm_cptp",
    "orthogonal_mixture",
    "partial_trace_A",
    "collapse_B",
    "pure_state",
    "projective_povm",
    "binary_observable_povm",
    "trivial_povm",
    "maximally_entangled",
    "maximally_mixed",
    "random_density_matrix",
    "random_pure_state",
    "random_povm",
]
