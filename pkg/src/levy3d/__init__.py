"""Monte Carlo toolkit for intermittent Levy-walk search on a 3D cubic torus."""

from .bounds import BoundsReport, evaluate, overhead, steps_lower_bound, travel_time
from .errors import DiagnosticError, InvalidInputError
from .geometry import (
    GeoDescriptors,
    MCArea,
    ShapeKind,
    Target,
    TorusPoint,
    contains,
    contains_points,
    counterexample_ratio,
    descriptors,
    mc_projected_area,
    torus_displacement,
    wrap,
)
from .harness import (
    CSV_COLUMNS,
    SweepRecord,
    SweepSpec,
    join_bounds,
    read_csv,
    records_to_csv,
    run_sweep,
    scenario_library,
    write_csv,
)
from .sampler import Moments, StepDist, normalization, projected_tail_exponent, sample_direction
from .walker import (
    BatchResult,
    TrialOutcome,
    WalkParams,
    run_batch,
    run_trial,
    sample_path,
    wald_residual,
)

__version__ = "0.1.0"
