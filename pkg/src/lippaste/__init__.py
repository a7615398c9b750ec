"""Lipschitz pasting on finite metric spaces."""

from .geometry import (
    EmbeddedSample,
    LinearChart,
    SweepRecord,
    density_sweep,
    euclidean_space_from_points,
    graph_geodesic_metric,
    sample_great_circles,
    sample_linear_transverse,
    sample_tangential_parabola,
    sample_transverse_lines,
)
from .lipschitz import (
    BoundCheckReport,
    LipschitzReport,
    MappedFunction,
    disjoint_bound_check,
    lipschitz_constant,
    pasting_bound_check,
    restrict_function,
)
from .locality import (
    Cover,
    LocalityReport,
    ball_cover,
    complement_constant,
    global_bound_from_cover,
    local_lp_constants,
)
from .metricspace import (
    FiniteMetricSpace,
    InputError,
    SubsetPair,
    ViolationReport,
    random_metric,
    restrict,
    shortest_path_completion,
    verify_metric,
)
from .pasting import (
    ConverseReport,
    GluedMetricSpace,
    LpReport,
    converse_witness,
    cross_ratio,
    glued_metric,
    lp_constant,
)

__version__ = "0.1.0"
