"""Locally extractable work of two-mode Gaussian states under Gaussian measurement feedback."""

from .classification import (
    BoundaryKind,
    ClassRecord,
    boundary_c2_nonsteer,
    boundary_c2_physical,
    boundary_c2_separable,
    classify,
    is_separable,
    is_steerable_a_to_b,
    is_steerable_b_to_a,
)
from .core import (
    MeasurementSpec,
    Mode,
    SingleModeState,
    StandardFormParams,
    TwoModeState,
    conditional_update,
    is_physical,
    local_energy,
    min_hermitian_eigenvalue,
    partial_transpose,
    standard_form_state,
    symplectic_eigenvalues,
    symplectic_form,
)
from .montecarlo import estimate_conditional, mc_work, sample_state
from .protocols import (
    ProtocolKind,
    Trajectory,
    WorkReport,
    optimal_squeeze,
    run_protocol,
    work_het,
    work_hom,
    work_report,
)
from .sweep import (
    RedDot,
    SweepRow,
    emit,
    find_steer_vanish_b,
    find_transition_a,
    find_transition_b,
    red_dot,
    sweep_quadrant,
    sweep_symmetric,
)

__version__ = "0.1.0"
