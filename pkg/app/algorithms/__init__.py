"""Batch dynamic node programs and the primitives they are built from."""

from app.algorithms.cliques import clique_update, enumerate_cliques
from app.algorithms.congested_clique import cc_route, cc_universal_update, dyn_matmul_update, triangle_count_update
from app.algorithms.ett import EttAux, EttRestriction, EulerTourForest, ett_cut, ett_join, ett_local_apply, ett_root
from app.algorithms.matroid import ContractionMatroid, DualMatroid, distributed_extreme_basis, greedy_basis
from app.algorithms.mst import bootstrap_mst_aux, decode_mst, mst_update, total_order_key
from app.algorithms.orientation import orient_changed_edges, orientation_program
from app.algorithms.primitives import broadcast_set, build_bfs_tree, convergecast_filtered
from app.algorithms.universal import local1_update, universal_update

__all__ = [
    "ContractionMatroid",
    "DualMatroid",
    "EttAux",
    "EttRestriction",
    "EulerTourForest",
    "bootstrap_mst_aux",
    "broadcast_set",
    "build_bfs_tree",
    "cc_route",
    "cc_universal_update",
    "clique_update",
    "convergecast_filtered",
    "decode_mst",
    "distributed_extreme_basis",
    "dyn_matmul_update",
    "enumerate_cliques",
    "ett_cut",
    "ett_join",
    "ett_local_apply",
    "ett_root",
    "greedy_basis",
    "local1_update",
    "mst_update",
    "orient_changed_edges",
    "orientation_program",
    "total_order_key",
    "triangle_count_update",
    "universal_update",
]
