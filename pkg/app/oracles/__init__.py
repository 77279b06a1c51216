"""Sequential reference implementations every batch can be checked against."""

from app.oracles.cliques import bitmask_cliques, brute_cliques, networkx_cliques
from app.oracles.cycles import has_cycle_reference, nodes_on_cycles
from app.oracles.distances import apsp_reference, diameter_reference, radius_edge_reference
from app.oracles.ett import ett_sequential_reference
from app.oracles.matrices import matmul_reference, triangle_bruteforce, triangle_reference
from app.oracles.matroid import matroid_basis_exhaustive
from app.oracles.mst import kruskal_mst, prim_mst
from app.oracles.report import OracleReport, OracleRow

__all__ = [
    "OracleReport",
    "OracleRow",
    "apsp_reference",
    "bitmask_cliques",
    "brute_cliques",
    "diameter_reference",
    "ett_sequential_reference",
    "has_cycle_reference",
    "kruskal_mst",
    "matmul_reference",
    "matroid_basis_exhaustive",
    "networkx_cliques",
    "nodes_on_cycles",
    "prim_mst",
    "radius_edge_reference",
    "triangle_bruteforce",
    "triangle_reference",
]
