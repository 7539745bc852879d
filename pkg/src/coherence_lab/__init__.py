"""Coherence-frame entanglement toolkit.

Pure-state degree of entanglement, natural-point decomposition of X states,
entanglement swapping conservation, the cavity-reservoir dissipation model
and a pointer-basis (einselection) analysis, all on small dense states.
"""

from .entanglement import (
    NaturalPoint,
    XState,
    bell_state,
    concurrence_two_qubit,
    entanglement_ensemble,
    entanglement_mixed,
    entanglement_pure,
    entanglement_state,
    natural_point,
    natural_point_x,
    werner_state,
    x_state_entanglement,
)
from .hilbert import (
    DensityMatrix,
    EnsembleState,
    SchmidtForm,
    StateVector,
    apply_local_unitary,
    ensemble_density,
    equal_mod_phase,
    partial_trace,
    project_branch,
    schmidt_decompose,
    tensor_product,
)

__version__ = "0.1.0"
