"""Distributed projection-consensus solver for ``A x = b`` and its topology analysis."""

from .consensus import (
    AgentEnsemble,
    ConvergenceTrace,
    UpdatingMatrix,
    build_updating_matrix,
    init_states,
    mixed_norm,
    run,
    step,
)
from .graphs import (
    Network,
    degree_stats,
    diameter,
    gen_er,
    gen_rr,
    gen_sf,
    gen_ws,
    make_network,
)
from .kaczmarz import (
    kaczmarz_step,
    run_schedule,
    sweep_contraction_bounds,
    verify_sequence_bounds,
)
from .linalg import LinearSystem, RowProjector, build_system, condition_numbers, phi, row_projector
from .walks import (
    BoundReport,
    OrderDecomposition,
    bound_bruteforce,
    bound_dp,
    complete_graph_counts,
    enumerate_walks,
    f_product,
    product_mass_identity,
    walk_order,
)

__version__ = "0.1.0"
