"""levkit: levitated-sphere force sensing and new-physics sensitivity projections."""

__version__ = "0.1.0"

from .quantities import (  # noqa: F401
    CONSTANTS,
    ConstantsTable,
    Dimension,
    DimensionError,
    DomainError,
    Quantity,
    convert_mediator_mass_to_range,
    convert_range_to_mediator_mass,
)
from .sensor import (  # noqa: F401
    NoiseModel,
    Sphere,
    TrapState,
    acceleration_asd,
    acceleration_asd_ng,
    induced_dipole,
    min_detectable_force,
    sql_force_asd,
    thermal_force_asd,
)
from .dynamics import (  # noqa: F401
    ImpulseEvent,
    IntegrationError,
    SimulationConfig,
    ThresholdEstimateError,
    TimeSeries,
    estimate_psd,
    fit_lorentzian,
    matched_filter_outputs,
    matched_filter_threshold,
    simulate,
)
from .newforces import (  # noqa: F401
    CasimirEstimate,
    CouplingKind,
    FingerArray,
    FluidCapillary,
    GeometryError,
    PlaneSlab,
    QuadratureError,
    YukawaCoupling,
    capacitor_leakage_field,
    casimir_background_sphere_plane,
    dm_yukawa_point_potential,
    sphere_form_factor,
    yukawa_force_modulated,
    yukawa_force_plane,
)
from .limits import (  # noqa: F401
    Capacitor,
    ExclusionCurve,
    HaloModel,
    SearchPlan,
    axion_decay_constant_for_line,
    axion_gw_line,
    coulomb_projection,
    dm_projection,
    dm_rate_above_threshold,
    isl_projection,
    log_grid,
    millicharge_sensitivity,
    neutrality_sensitivity,
)
