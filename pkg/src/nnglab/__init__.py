"""Numerical laboratory for hidden-replica Newtonian gravity.

Modules
-------
constants     physical constants, dimensioned quantities, characteristic scales
metastate     exact two-branch replica algebra and its Gaussian concentration
kernel        localization profiles, mutual-energy integral I(d), phases
reduction     decoherence matrix elements, brute-force oracle, reduction times
interdiction  no-signaling time-window scan over lump masses
phone         two-replica branch-communication protocol and its suppression
cli           command-line front end (CSV outputs + run manifests)
"""

from .constants import (
    CONSTANTS,
    MASS_THRESHOLD_PROTONS,
    SPREADING_TIME_S,
    Dim,
    DimensionError,
    PhysConstants,
    Quantity,
    above_threshold,
    localization_width,
    parse_quantity,
    sphere_radius,
    tau_g,
)
from .interdiction import (
    EPRScenario,
    FeasibilityCurve,
    default_mass_grid,
    deflection_bound,
    interdiction_scan,
    t_min,
)
from .kernel import (
    PHASE_CONVENTION,
    MassProfile,
    MCEstimate,
    PairEnergyTable,
    coherence_phase,
    gaussian_cloud,
    pair_integral,
    pair_integral_mc,
    uniform_sphere,
)
from .metastate import (
    BranchWeights,
    ConcentrationProfile,
    Metastate,
    build_metastate,
    concentration_profile,
    extend,
)
from .phone import (
    KET_I,
    KET_ONE,
    KET_ZERO,
    Metastate2,
    PointerConfig,
    QubitDensity,
    SignalSweep,
    branch_coherence,
    everett_signal,
    evolve,
    footnote_pointer_config,
    prepare,
    reduced_qubit,
    sigma3,
    signal_sweep,
)
from .reduction import (
    DecayCurve,
    ReductionConfig,
    ReductionResult,
    ReductionTimeError,
    brute_force_reduced_rho,
    cigar_cluster,
    decay_curve,
    default_cluster_config,
    element_matrix,
    estimate_reduction_time,
    grid_cluster,
    matrix_element,
    ns_limit_deviation,
    reduction_result,
)

__version__ = "0.1.0"
