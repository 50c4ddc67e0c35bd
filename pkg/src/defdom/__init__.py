"""defdom: exact solver and benchmark toolkit for k-defensive domination."""

from .graph import (
    GenSpec,
    Graph,
    VertexSet,
    generate,
    is_chordal,
    read_edge_list,
    write_edge_list,
)
from .heuristics import (
    CliqueCover,
    InitialCutSet,
    baseline_cover_bound,
    clique_cover_dsatur,
    clique_cover_peo,
    greedy_mis,
    initial_cuts,
    warm_start,
)
from .master import (
    MasterModel,
    SolveConfig,
    SolveReport,
    apply_enhancements,
    brute_force_optimum,
    lp_bound,
    solve,
    solve_bbc,
    solve_iterative,
)
from .separation import (
    CutBuffer,
    FeasibilityCut,
    buffer_update,
    cut_from_violator,
    dominates,
    separate_multi,
    violation,
)
from .verify import (
    Attack,
    DefenderSet,
    counters,
    enumerate_connected_attacks,
    find_hall_violator,
    is_k_defensive,
)

__version__ = "0.1.0"
