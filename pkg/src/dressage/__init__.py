"""Gauge-invariant dressed qubits on periodic U(1) lattice backgrounds."""

from .dressing import (
    DressingKernel,
    DressingPhase,
    coulomb_kernel,
    dressing_phase,
    load_kernel,
    path_kernel,
    phase_shift_under_gauge,
)
from .errors import DressageError
from .gauge import (
    GaugeTransform,
    StueckelbergField,
    apply_gauge_transform,
    field_strength,
    invariant_potential,
    random_scalar,
    random_vector,
    transform_sigma,
)
from .lattice import (
    Lattice,
    ScalarField,
    VectorField,
    backward_diff,
    divergence_fwd,
    forward_diff,
    green_function,
    new_lattice,
    solve_poisson,
    sum_by_parts_residual,
)
from .observables import coulomb_compare, electric_field, gauss_residual, radial_profile
from .qstates import (
    MultiQubitState,
    QFTbit,
    entangle,
    entanglement_entropy,
    gauge_action,
    make_qftbit,
    overlap_phase,
)

__version__ = "0.1.0"

__all__ = [
    "DressageError",
    "DressingKernel", "DressingPhase", "coulomb_kernel", "dressing_phase", "load_kernel",
    "path_kernel", "phase_shift_under_gauge",
    "GaugeTransform", "StueckelbergField", "apply_gauge_transform", "field_strength",
    "invariant_potential", "random_scalar", "random_vector", "transform_sigma",
    "Lattice", "ScalarField", "VectorField", "backward_diff", "divergence_fwd", "forward_diff",
    "green_function", "new_lattice", "solve_poisson", "sum_by_parts_residual",
    "coulomb_compare", "electric_field", "gauss_residual", "radial_profile",
    "MultiQubitState", "QFTbit", "entangle", "entanglement_entropy", "gauge_action",
    "make_qftbit", "overlap_phase",
]
