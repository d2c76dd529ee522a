"""Exact tools for point-line incidences, k-rich lines and hyperplane arrangements."""

from .arrangement import (
    ArrangementIndex,
    Cell,
    NeighborhoodStats,
    cell_count_formula,
    enumerate_cells,
    feasible,
    is_generic,
    random_generic_planes,
    strict_feasible,
)
from .cutting import (
    Cutting,
    PreconditionError,
    bootstrap_iii,
    grid_cutting,
    incidence_bound_sweep,
    is_proper_cutting,
    segment_threshold,
    sign_matrix,
    solymosi_rich_line_check,
)
from .exact import (
    CapExceeded,
    DegenerateInputError,
    GeometryError,
    Hyperplane,
    LineKey,
    canonical_line,
    collinear,
    general_position_check,
    line_through,
    lines_coplanar,
    plane_side,
    point,
    segment_crossings,
)
from .harness import ExperimentRecord, SweepConfig, UsageError, fit_constant, run_experiment
from .joints import detect_joints, intersect, intersections, joints_bound_check
from .lattice import (
    EmptyRangeWarning,
    LatticeSpec,
    cube_lattice,
    example_iii_lines,
    line_lattice_points,
    origin_rich_directions,
    rich_directions_d,
    shifted_rich_lines,
    totient_sum,
)
from .richlines import (
    IncidenceReport,
    count_incidences,
    enumerate_rich_lines,
    incidences_per_line,
    rich_lines_oracle,
    st_bound_ratio,
)

__version__ = "0.1.0"
