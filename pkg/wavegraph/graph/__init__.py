"""Graph module initialization."""

from .graph import (
    Graph,
    FiniteGraph,
    LatticeGraph,
    GraphConstants,
    build_graph,
    load_graph,
    ring_graph,
    lattice_graph,
    two_node_graph,
    resolve_edge_ids,
    resolve_node_id,
)
from .fields import Field, as_arrays
from .operators import (
    norm_alpha,
    norm_sq,
    inner_product,
    apply_operator,
    vertex_laplacian,
    operator_matrix,
    weight_vector,
    stack,
    unstack,
)

__all__ = [
    "Graph",
    "FiniteGraph",
    "LatticeGraph",
    "GraphConstants",
    "build_graph",
    "load_graph",
    "ring_graph",
    "lattice_graph",
    "two_node_graph",
    "resolve_edge_ids",
    "resolve_node_id",
    "Field",
    "as_arrays",
    "norm_alpha",
    "norm_sq",
    "inner_product",
    "apply_operator",
    "vertex_laplacian",
    "operator_matrix",
    "weight_vector",
    "stack",
    "unstack",
]
