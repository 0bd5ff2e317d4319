"""Road-network design that maximizes counterdeceptiveness.

A design is a Steiner tree rooted at the start node whose leaves are the
targets. Its counterdeceptiveness (CD) is the smallest, over targets, of the
distance an observer sees the agent travel after its intended target becomes
unambiguous. The reattachment heuristic improves a seed tree one target
branch at a time; brute-force oracles give ground truth on tiny graphs.
"""

from .errors import BudgetInfeasible, GuardError, InstanceError, InvariantViolation, TreeError
from .graph import (
    GridSpec,
    Instance,
    ObstacleRegion,
    WeightedDigraph,
    apply_obstacles,
    build_rect_grid,
    build_tri_grid,
    snap_to_nodes,
    total_weight,
)
from .metrics import (
    CdReport,
    ComparisonKey,
    TargetRecord,
    cd_general,
    cd_tree,
    compare_trees,
    compute_successors,
    last_deceptive_point,
    priorities,
    unique_distance,
)
from .oracle import (
    brute_force_subgraph_optimum,
    brute_force_tree_optimum,
    enumerate_spanning_trees,
)
from .reattachment import (
    MsspTables,
    RunStats,
    detach_target,
    find_route,
    improve_once,
    mssp_precompute,
    reattach_target,
    reattachment_solve,
)
from .seeding import SeedKind, mst_seed, random_seed, random_spanning_tree, trim
from .tree import RootedTree

__version__ = "0.1.0"

__all__ = [
    "BudgetInfeasible",
    "CdReport",
    "ComparisonKey",
    "GridSpec",
    "GuardError",
    "Instance",
    "InstanceError",
    "InvariantViolation",
    "MsspTables",
    "ObstacleRegion",
    "RootedTree",
    "RunStats",
    "SeedKind",
    "TargetRecord",
    "TreeError",
    "WeightedDigraph",
    "apply_obstacles",
    "brute_force_subgraph_optimum",
    "brute_force_tree_optimum",
    "build_rect_grid",
    "build_tri_grid",
    "cd_general",
    "cd_tree",
    "compare_trees",
    "compute_successors",
    "detach_target",
    "enumerate_spanning_trees",
    "find_route",
    "improve_once",
    "last_deceptive_point",
    "mssp_precompute",
    "mst_seed",
    "priorities",
    "random_seed",
    "random_spanning_tree",
    "reattach_target",
    "reattachment_solve",
    "snap_to_nodes",
    "total_weight",
    "trim",
    "unique_distance",
]
