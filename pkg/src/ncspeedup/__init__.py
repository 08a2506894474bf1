"""Exact speedup analysis for network-coded multicast switches."""

from .analysis import (
    PerfectionVerdict,
    SizeLimitError,
    find_odd_hole,
    is_perfect,
    max_weight_clique,
    maximal_cliques,
    maximal_stable_sets,
)
from .conflict_graph import (
    ConflictGraph,
    build_conflict_graph,
    build_kn_graph,
    complement,
    export_dot,
    export_json,
    induced_subgraph,
    parse_graph_json,
    pattern_graph,
)
from .kn_bounds import bound_report, input_cover, kn_speedup_bound, named_subgraph, output_cover
from .rational import (
    LinearProgram,
    LPResult,
    Polytope,
    enumerate_vertices,
    format_rational,
    parse_rational,
    solve_lp,
)
from .speedup import (
    PerfectCover,
    SpeedupResult,
    class_min_speedup,
    cover_bound,
    fractional_chromatic,
    imperfection_ratio_exact,
    in_qstab,
    in_stab,
    pattern_speedup,
)
from .traffic import (
    Flow,
    PortShape,
    TrafficPattern,
    admissible_polytope,
    enhance,
    is_admissible,
    load_pattern,
    parse_pattern,
    validate_pattern,
)

__version__ = "0.1.0"
