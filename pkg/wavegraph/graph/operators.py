"""Norms, the weighted inner product and the first-order operator L_G.

Node and edge data enter as numpy arrays aligned with the graph's node and
edge indices, so the same functions serve :class:`~wavegraph.graph.fields.Field`
objects and integer particle states.
"""

import math
from typing import Any, Tuple

import numpy as np
import scipy.sparse as sp

from .fields import Field, as_arrays
from .graph import Graph
from ..utils.exceptions import FieldError, GraphError


def norm_alpha(f: Any, alpha: float) -> float:
    """Weighted alpha-norm of a field or particle state.

    ``(sum |f(x)|^a / m_x + sum k_xy |c_xy|^a)^(1/a)`` for finite ``alpha``;
    ``alpha = inf`` gives the unweighted maximum of all absolute values.

    Raises:
        FieldError: If alpha < 1
    """
    if not alpha >= 1:
        raise FieldError(f"Norm exponent must be at least 1, got {alpha}", {"alpha": alpha})
    nodes, edges = as_arrays(f)
    if math.isinf(alpha):
        values = np.concatenate([np.abs(nodes), np.abs(edges)])
        return float(values.max()) if len(values) else 0.0
    graph = f.graph
    total = np.sum(np.abs(nodes) ** alpha / graph.mass) + np.sum(graph.weight * np.abs(edges) ** alpha)
    return float(total ** (1.0 / alpha))


def norm_sq(f: Any) -> float:
    """||f||_2^2 without the square root round trip."""
    nodes, edges = as_arrays(f)
    graph = f.graph
    return float(np.sum(nodes * nodes / graph.mass) + np.sum(graph.weight * edges * edges))


def inner_product(f: Any, g: Any) -> float:
    """Weighted inner product [f, g]_G.

    Raises:
        GraphError: If the fields live on different graphs
    """
    if f.graph is not g.graph:
        raise GraphError("Inner product of fields on different graphs")
    f_nodes, f_edges = as_arrays(f)
    g_nodes, g_edges = as_arrays(g)
    graph = f.graph
    return float(np.sum(f_nodes * g_nodes / graph.mass) + np.sum(graph.weight * f_edges * g_edges))


def _materialize_support(f: Any) -> None:
    # Lazy graphs need the neighbourhood of every supported node before L_G f
    # can be written down.
    graph = f.graph
    if graph.is_finite:
        return
    nodes, edges = np.asarray(f.nodes), np.asarray(f.edges)
    touched = set(np.flatnonzero(nodes).tolist())
    for e in np.flatnonzero(edges).tolist():
        touched.update(graph.edge_ends(int(e)))
    for i in sorted(touched):
        graph.incident(i)


def apply_arrays(graph: Graph, nodes: np.ndarray, edges: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """L_G on raw node/edge arrays aligned with the graph's indices."""
    tail, head, weight, mass = graph.tail, graph.head, graph.weight, graph.mass
    flux = weight * edges
    out_nodes = (np.bincount(tail, weights=flux, minlength=graph.node_count)
                 - np.bincount(head, weights=flux, minlength=graph.node_count))
    scaled = nodes / mass
    out_edges = scaled[head] - scaled[tail]
    return out_nodes, out_edges


def apply_operator(f: Field) -> Field:
    """The operator L_G.

    Node part: ``sum over incident edges of k_xy * (+c)`` when the edge
    leaves x and ``-c`` when it enters x. Edge part for canonical (x, y):
    ``f(y)/m_y - f(x)/m_x``.
    """
    _materialize_support(f)
    nodes, edges = as_arrays(f)
    out_nodes, out_edges = apply_arrays(f.graph, nodes, edges)
    return Field(f.graph, out_nodes, out_edges)


def vertex_laplacian(f: Field) -> np.ndarray:
    """Node part of L_G applied twice, by the direct Laplacian formula.

    ``sum_{y~x} k_xy (f(y)/m_y - f(x)/m_x)`` for every node x.
    """
    _materialize_support(f)
    graph = f.graph
    nodes, _ = as_arrays(f)
    scaled = nodes / graph.mass
    tail, head, weight = graph.tail, graph.head, graph.weight
    diff = weight * (scaled[head] - scaled[tail])
    return (np.bincount(tail, weights=diff, minlength=graph.node_count)
            - np.bincount(head, weights=diff, minlength=graph.node_count))


def weight_vector(graph: Graph) -> np.ndarray:
    """Diagonal of the inner product on the stacked [nodes; edges] vector."""
    return np.concatenate([1.0 / graph.mass, graph.weight])


def operator_matrix(graph: Graph, mask_fixed: bool = True) -> sp.csr_matrix:
    """Sparse matrix of L_G acting on the stacked [nodes; edges] vector.

    Args:
        graph: Finite graph
        mask_fixed: Zero the node rows of V_1 nodes (Dirichlet masking)

    Raises:
        GraphError: If the graph is not finite
    """
    if not graph.is_finite:
        raise GraphError("Operator matrix requires a finite graph")
    V, E = graph.node_count, graph.edge_count
    tail, head, weight, mass = graph.tail, graph.head, graph.weight, graph.mass
    edge_cols = V + np.arange(E)

    # node rows: +k at the tail, -k at the head
    node_rows = np.concatenate([tail, head])
    node_cols = np.concatenate([edge_cols, edge_cols])
    node_vals = np.concatenate([weight, -weight])
    if mask_fixed:
        keep = ~graph.fixed[node_rows]
        node_rows, node_cols, node_vals = node_rows[keep], node_cols[keep], node_vals[keep]

    # edge rows: f(head)/m_head - f(tail)/m_tail
    edge_rows = np.concatenate([edge_cols, edge_cols])
    edge_ncols = np.concatenate([head, tail])
    edge_vals = np.concatenate([1.0 / mass[head], -1.0 / mass[tail]])

    rows = np.concatenate([node_rows, edge_rows])
    cols = np.concatenate([node_cols, edge_ncols])
    vals = np.concatenate([node_vals, edge_vals])
    return sp.csr_matrix((vals, (rows, cols)), shape=(V + E, V + E))


def stack(f: Any) -> np.ndarray:
    """Concatenate node and edge arrays into one vector."""
    nodes, edges = as_arrays(f)
    return np.concatenate([nodes, edges])


def unstack(graph: Graph, vector: np.ndarray) -> Field:
    """Split a stacked vector back into a Field."""
    V = graph.node_count
    if vector.shape != (V + graph.edge_count,):
        raise FieldError("Stacked vector does not match the graph size")
    return Field(graph, vector[:V].copy(), vector[V:].copy())
