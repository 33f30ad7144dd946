"""Spectral toolkit for the defocusing cubic Schrodinger equation on a
periodic box: split-step evolution of the full and perturbation equations,
unit-scale randomization of initial data, the associated space-time norms,
and Monte Carlo probes of the dispersive estimates they enter."""

__version__ = "0.1.0"

from .grid import (  # noqa: F401
    FREQUENCY,
    PHYSICAL,
    Grid,
    SpectralField,
    apply_multiplier,
    build_grid,
    l2_norm,
    transform,
    zero_field,
)
from .projectors import (  # noqa: F401
    UnitPartition,
    cube_project,
    dyadic_project,
    dyadic_scales,
    fractional_derivative,
    free_propagate,
    make_unit_partition,
)
from .randomize import (  # noqa: F401
    Ensemble,
    RandomizationPlan,
    good_set_fraction,
    make_plan,
    randomize,
    sum_cube_l2_squared,
    synthesize_data,
    tail_check,
)
from .solver import (  # noqa: F401
    SolverConfig,
    Trajectory,
    energy,
    evolve_full,
    evolve_perturbation,
    free_trajectory,
    mass,
    picard_iterate,
    reconstruct_sum,
)
from .norms import (  # noqa: F401
    NormSpec,
    critical_proxy_norm,
    dispersive_norm,
    dyadic_mixed_norm,
    lebesgue_norm,
    mixed_norm,
    sobolev_norm,
    uniform_norm,
)
from .morawetz import densities, interaction_functional, morawetz_report  # noqa: F401
from .estimates import (  # noqa: F401
    RatioSweep,
    bilinear_ratio,
    flow_ensemble_stats,
    local_smoothing_ratio,
    loglog_fit,
    mann_kendall,
    radial_square_sobolev_ratio,
    strichartz_ratio,
)
from .experiments import (  # noqa: F401
    EnergyTrack,
    HighLowSetup,
    highlow_run,
    n0_sweep,
    recurrence_time,
    scattering_diagnostic,
    split_data,
)
