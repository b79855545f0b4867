"""Real-valued fields on the nodes and edges of a graph.

A :class:`Field` carries one scalar per node and one signed coefficient per
edge. The edge coefficient ``c`` stands for the vector ``c * e_xy`` along the
edge's canonical orientation, so edge values are unit-vector multiples by
construction.
"""

from typing import Any, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .graph import Graph, NodeValues
from ..utils.exceptions import FieldError, GraphError


EdgeValues = Union[Mapping[Tuple[Any, Any], float], Sequence[float], np.ndarray]


class Field:
    """Scalar node data plus edge coefficients on a graph.

    For lazily materialized graphs the arrays may be shorter than the
    current node/edge counts; missing entries are zero.
    """

    __slots__ = ("graph", "nodes", "edges")

    def __init__(self, graph: Graph, nodes: Optional[np.ndarray] = None, edges: Optional[np.ndarray] = None):
        self.graph = graph
        self.nodes = np.zeros(graph.node_count) if nodes is None else np.asarray(nodes, dtype=np.float64)
        self.edges = np.zeros(graph.edge_count) if edges is None else np.asarray(edges, dtype=np.float64)
        if self.nodes.ndim != 1 or self.edges.ndim != 1:
            raise FieldError("Field arrays must be one-dimensional")
        if len(self.nodes) > graph.node_count or len(self.edges) > graph.edge_count:
            raise FieldError("Field has support outside the graph")

    @classmethod
    def zeros(cls, graph: Graph) -> "Field":
        return cls(graph)

    @classmethod
    def from_maps(
        cls,
        graph: Graph,
        node_values: Optional[NodeValues] = None,
        edge_values: Optional[EdgeValues] = None,
    ) -> "Field":
        """Build a field from node and edge data keyed by node ids.

        Edge mappings are keyed by ``(x, y)`` pairs and interpreted as the
        coefficient along e_xy; a pair given against the stored orientation
        has its sign flipped.
        """
        nodes = _node_data(graph, node_values)
        edges = _edge_data(graph, edge_values)
        return cls(graph, nodes, edges)

    def copy(self) -> "Field":
        return Field(self.graph, self.nodes.copy(), self.edges.copy())

    def padded(self) -> Tuple[np.ndarray, np.ndarray]:
        """Node and edge arrays extended with zeros to the graph's current size."""
        return (_pad(self.nodes, self.graph.node_count), _pad(self.edges, self.graph.edge_count))

    def node_value(self, node_id) -> float:
        i = self.graph.node_index(node_id)
        return float(self.nodes[i]) if i < len(self.nodes) else 0.0

    def edge_value(self, tail_id, head_id) -> float:
        """Coefficient along e_{tail,head} (sign-adjusted for reversed pairs)."""
        edge, orientation = _locate_edge(self.graph, tail_id, head_id)
        value = float(self.edges[edge]) if edge < len(self.edges) else 0.0
        return orientation * value

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.nodes) + np.count_nonzero(self.edges))

    def _combine(self, other: "Field", sign: float) -> "Field":
        if not isinstance(other, Field):
            return NotImplemented
        if other.graph is not self.graph:
            raise GraphError("Fields live on different graphs")
        a_nodes, a_edges = self.padded()
        b_nodes, b_edges = other.padded()
        return Field(self.graph, a_nodes + sign * b_nodes, a_edges + sign * b_edges)

    def __add__(self, other: "Field") -> "Field":
        return self._combine(other, 1.0)

    def __sub__(self, other: "Field") -> "Field":
        return self._combine(other, -1.0)

    def __mul__(self, scalar: float) -> "Field":
        return Field(self.graph, self.nodes * scalar, self.edges * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return self * -1.0

    def __repr__(self) -> str:
        return f"Field(graph={self.graph!r}, support={self.support_size})"


def as_arrays(f: Any) -> Tuple[np.ndarray, np.ndarray]:
    """Float node/edge arrays of a Field or ParticleState padded to the graph size."""
    graph = f.graph
    return (_pad(np.asarray(f.nodes, dtype=np.float64), graph.node_count),
            _pad(np.asarray(f.edges, dtype=np.float64), graph.edge_count))


def _pad(arr: np.ndarray, size: int) -> np.ndarray:
    if len(arr) == size:
        return arr
    out = np.zeros(size, dtype=arr.dtype)
    out[:len(arr)] = arr
    return out


def _locate_edge(graph: Graph, tail_id, head_id) -> Tuple[int, int]:
    if hasattr(graph, "edge_index"):
        return graph.edge_index(tail_id, head_id)
    t, h = graph.node_index(tail_id), graph.node_index(head_id)
    for edge in graph.incident(t)[0]:
        a, b = graph.edge_ends(int(edge))
        if (a, b) == (t, h):
            return int(edge), 1
        if (a, b) == (h, t):
            return int(edge), -1
    raise GraphError(f"No edge between {tail_id!r} and {head_id!r}")


def _node_data(graph: Graph, values: Optional[NodeValues]) -> np.ndarray:
    if values is None:
        return np.zeros(graph.node_count)
    if hasattr(graph, "node_array"):
        return graph.node_array(values)
    if not isinstance(values, Mapping):
        raise FieldError("Lazy graphs accept node data only as a mapping from node ids")
    indexed = {graph.node_index(k): float(v) for k, v in values.items()}
    out = np.zeros(graph.node_count)
    for i, v in indexed.items():
        out[i] = v
    return out


def _edge_data(graph: Graph, values: Optional[EdgeValues]) -> np.ndarray:
    if values is None:
        return np.zeros(graph.edge_count)
    if isinstance(values, Mapping):
        located = [(_locate_edge(graph, a, b), float(v)) for (a, b), v in values.items()]
        out = np.zeros(graph.edge_count)
        for (edge, orientation), v in located:
            out[edge] = orientation * v
        return out
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != (graph.edge_count,):
        raise FieldError(f"Edge data has length {arr.size}, expected {graph.edge_count}")
    return arr.copy()
