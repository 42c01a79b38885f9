"""Sharp two-sided bounds for the weighted AM-GM gap in terms of Var(sqrt x)."""

__version__ = "0.1.0"

from .bounds import (  # noqa: E402
    BoundReport,
    Method,
    amgm_gap,
    cartwright_field_bounds,
    cross_weight_bounds,
    n2_identity_check,
    refined_young_bounds,
    refined_young_bounds_any,
    theorem_bounds,
    variance_comparison,
    weight_change_gap_bounds,
)
from .errors import (  # noqa: E402
    AmgmError,
    DegenerateInputError,
    DimensionError,
    DomainError,
    InvariantViolation,
    PreconditionError,
)
from .holder import HolderReport, SampledFunctionSet, holder_refinement, mazur_images  # noqa: E402
from .means import (  # noqa: E402
    DataVector,
    WeightVector,
    sqrt_transform,
    sqrt_variance,
    std_dev,
    weighted_geometric_mean,
    weighted_mean,
    weighted_variance,
)
from .sharpness import (  # noqa: E402
    Direction,
    SearchConfig,
    SearchResult,
    Side,
    equality_witness,
    ratio,
    search_extremal,
    sigma_impossibility_curve,
)
