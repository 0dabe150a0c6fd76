"""Numerical laboratory for Dirichlet-restricted generators.

Assembles symmetric sparse approximations of killed generators on Euclidean
domains, the planar gasket, and two group charts; eigensolves them; and
cross-validates spectral predictions (gaps, ground states, heat content,
small deviations, scaling laws) against seeded killed-diffusion Monte Carlo.
"""

from .core import (
    DIRICHLET_FORM,
    PROBABILIST,
    Box,
    Domain,
    DomainError,
    Gauge,
    GaugeBall,
    GasketCells,
    Interval,
    Polygon,
    SpaceModel,
    UnsupportedError,
    chart_distance,
    difference,
    euclidean,
    gasket,
    heisenberg3,
    make_domain,
    su2_chart,
    union,
)
from .discrete import (
    MeshError,
    OperatorMesh,
    assemble_euclidean,
    assemble_gasket,
    assemble_heisenberg,
    assemble_heisenberg_cylindrical,
    assemble_su2_rescaled,
    load_mesh,
    mmatrix_report,
    nearest_node,
    save_mesh,
)
from .kernels import (
    KernelBound,
    envelope,
    gaussian_ahlfors,
    gaussian_heat_kernel,
    good_set_threshold,
    irreducibility_window,
    kappa_estimate,
    lambda_envelope_constant,
    lie_group,
    polynomial_nonlocal,
    spectral_gap_condition,
    sub_gaussian,
    sup_kernel,
)
from .spectral import (
    SolveError,
    SpectralData,
    dirichlet_kernel_expansion,
    eigensolve,
    ground_state_audit,
    heat_content_series,
    lp_bound_audit,
    survival_series,
)
from .stochastic import (
    ExitBatch,
    PathSample,
    ProcessSpec,
    dynkin_hunt_estimate,
    euclidean_bm,
    exit_scaling_check,
    heat_content_estimate,
    heisenberg_bm,
    simulate,
    small_deviation_estimate,
    su2_sde,
    survival_estimate,
)

__version__ = "0.1.0"
