"""Bounded-Lipschitz and Lévy–Prokhorov distances for finitely supported measures."""

from .errors import CapacityError, ConsistencyError, DudleyLabError, InputError, SolverError
from .lipschitz import (
    Regularization,
    TabulatedFunction,
    blip_scale,
    lipschitz_constant,
    regularize,
    separating_sequence_function,
)
from .measure import (
    Coupling,
    ProbabilityMeasure,
    SignedMeasure,
    integrate,
    point_mass,
    pushforward,
    total_variation_norm,
)
from .metric_space import (
    FiniteMetricSpace,
    PointMap,
    from_matrix,
    from_real_points,
    lipschitz_constant_of_map,
    truncate_metric,
    validate_metric,
)
from .metrics import (
    bl_distance,
    bl_norm,
    levy_prokhorov,
    optimal_bl_coupling,
    prokhorov_bruteforce,
    strassen_coupling,
    tv_distance,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConsistencyError",
    "Coupling",
    "DudleyLabError",
    "FiniteMetricSpace",
    "InputError",
    "PointMap",
    "ProbabilityMeasure",
    "Regularization",
    "SignedMeasure",
    "SolverError",
    "TabulatedFunction",
    "bl_distance",
    "optimal_bl_coupling",
    "bl_norm",
    "blip_scale",
    "from_matrix",
    "from_real_points",
    "integrate",
    "levy_prokhorov",
    "lipschitz_constant",
    "lipschitz_constant_of_map",
    "point_mass",
    "prokhorov_bruteforce",
    "pushforward",
    "regularize",
    "separating_sequence_function",
    "strassen_coupling",
    "total_variation_norm",
    "truncate_metric",
    "tv_distance",
    "validate_metric",
]
