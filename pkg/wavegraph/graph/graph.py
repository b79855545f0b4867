"""Weighted graphs with masses, canonical edge orientations and embeddings.

Two implementations share the :class:`Graph` interface:

* :class:`FiniteGraph` - explicit node and edge lists (general graphs and the
  periodic ring family).
* :class:`LatticeGraph` - the integer lattice Z^d, materialized lazily as
  nodes are touched.

Every undirected edge is stored once; the stored ``(tail, head)`` order is
its canonical orientation and edge vector fields are kept as one signed
coefficient along the unit vector pointing from tail to head.
"""

import json
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..utils.exceptions import GraphError


NodeId = Hashable
NodeValues = Union[Mapping[Any, float], Sequence[float], np.ndarray, Callable[[Any], float]]


@dataclass(frozen=True)
class GraphConstants:
    """Regularity constants of a graph.

    Attributes:
        M: max(sup 1/m_x, sup k_xy)
        d: max(max degree, 2)
        max_degree: d_0, the largest node degree
        node_count: |V| (finite graphs only)
        edge_count: |E| (finite graphs only)
        A: 2Md*sqrt((|V|+|E|)M) (finite graphs only)
    """

    M: float
    d: float
    max_degree: int
    node_count: Optional[int] = None
    edge_count: Optional[int] = None
    A: Optional[float] = None

    @property
    def Md(self) -> float:
        return self.M * self.d


class Graph(ABC):
    """Common interface of finite and lazily materialized graphs.

    Nodes and edges are addressed by dense integer indices in the order in
    which they were created; user-facing ids are translated with
    :meth:`node_index` and :meth:`node_id`.
    """

    kind: str = "abstract"

    @property
    @abstractmethod
    def is_finite(self) -> bool:
        """True if the node set is explicit and finite."""

    @property
    @abstractmethod
    def node_count(self) -> int:
        """Number of (materialized) nodes."""

    @property
    @abstractmethod
    def edge_count(self) -> int:
        """Number of (materialized) edges."""

    @property
    @abstractmethod
    def constants(self) -> GraphConstants:
        """Cached regularity constants."""

    @abstractmethod
    def node_index(self, node_id: NodeId) -> int:
        """Translate a node id into its integer index."""

    @abstractmethod
    def node_id(self, index: int) -> NodeId:
        """Translate an integer index into the node id."""

    @abstractmethod
    def incident(self, index: int) -> Tuple[np.ndarray, np.ndarray]:
        """Edges incident to a node and their orientation flags.

        Returns:
            (edge indices, signs) where the sign is +1 if the edge's
            canonical orientation leaves the node and -1 if it enters it.
        """

    @abstractmethod
    def node_mass(self, index: int) -> float:
        """Mass m_x of a node."""

    @abstractmethod
    def edge_weight(self, edge: int) -> float:
        """Weight k_xy of an edge."""

    @abstractmethod
    def edge_ends(self, edge: int) -> Tuple[int, int]:
        """Canonical (tail, head) node indices of an edge."""

    @abstractmethod
    def is_fixed(self, index: int) -> bool:
        """True if the node belongs to the Dirichlet boundary V_1."""

    @abstractmethod
    def unit_vector(self, edge: int) -> np.ndarray:
        """Unit vector e_xy of an edge along its canonical orientation."""

    # Array views over the materialized part -------------------------------

    @property
    @abstractmethod
    def mass(self) -> np.ndarray:
        """Node masses, indexed by node index."""

    @property
    @abstractmethod
    def weight(self) -> np.ndarray:
        """Edge weights, indexed by edge index."""

    @property
    @abstractmethod
    def tail(self) -> np.ndarray:
        """Tail node index of every edge."""

    @property
    @abstractmethod
    def head(self) -> np.ndarray:
        """Head node index of every edge."""

    @property
    @abstractmethod
    def fixed(self) -> np.ndarray:
        """Boolean mask of V_1 nodes."""

    # Shared helpers ---------------------------------------------------------

    def degree(self, index: int) -> int:
        return len(self.incident(index)[0])

    def neighbors(self, node_id: NodeId) -> List[NodeId]:
        """Ids of the nodes adjacent to ``node_id``."""
        index = self.node_index(node_id)
        edges, signs = self.incident(index)
        result = []
        for edge, sign in zip(edges, signs):
            tail, head = self.edge_ends(int(edge))
            result.append(self.node_id(head if sign > 0 else tail))
        return result

    def edge_label(self, edge: int) -> str:
        tail, head = self.edge_ends(edge)
        return f"{self.node_id(tail)}-{self.node_id(head)}"

    def node_label(self, index: int) -> str:
        return str(self.node_id(index))


class FiniteGraph(Graph):
    """Explicit finite graph G=(V,E,K,m) with a Dirichlet boundary mask.

    The graph is immutable after construction; its arrays are read-only and
    it can be shared between workers.
    """

    def __init__(
        self,
        node_ids: Sequence[NodeId],
        mass: Sequence[float],
        coords: np.ndarray,
        fixed: Sequence[bool],
        tail: Sequence[int],
        head: Sequence[int],
        weight: Sequence[float],
        kind: str = "finite",
        period: Optional[float] = None,
    ):
        """Initialize from validated arrays.

        Args:
            node_ids: Node ids in index order
            mass: Node masses m_x > 0
            coords: (|V|, k) embedding coordinates
            fixed: V_1 membership per node
            tail: Tail index per edge (canonical orientation)
            head: Head index per edge
            weight: Edge weights k_xy > 0
            kind: "finite" or "ring"
            period: Coordinate period for periodic embeddings (ring: 1.0)

        Raises:
            GraphError: If the arrays violate the graph invariants
        """
        self.kind = kind
        self.period = period
        self._ids: List[NodeId] = list(node_ids)
        self._index: Dict[NodeId, int] = {}
        for i, node_id in enumerate(self._ids):
            if node_id in self._index:
                raise GraphError(f"Duplicate node id: {node_id!r}", {"node": str(node_id)})
            self._index[node_id] = i

        self._mass = _readonly(np.asarray(mass, dtype=np.float64))
        self._coords = _readonly(np.atleast_2d(np.asarray(coords, dtype=np.float64)).reshape(len(self._ids), -1))
        self._fixed = _readonly(np.asarray(fixed, dtype=bool))
        self._tail = _readonly(np.asarray(tail, dtype=np.int64))
        self._head = _readonly(np.asarray(head, dtype=np.int64))
        self._weight = _readonly(np.asarray(weight, dtype=np.float64))

        self._validate()

        self._edge_index: Dict[Tuple[int, int], int] = {
            (int(t), int(h)): e for e, (t, h) in enumerate(zip(self._tail, self._head))
        }
        self._build_incidence()
        self._constants = self._compute_constants()

    def _validate(self) -> None:
        n_nodes = len(self._ids)
        if n_nodes == 0:
            raise GraphError("Graph must have at least one node")
        if self._mass.shape != (n_nodes,) or self._fixed.shape != (n_nodes,):
            raise GraphError("Node arrays have inconsistent lengths")
        if not np.all(np.isfinite(self._mass)) or np.any(self._mass <= 0):
            raise GraphError("Node masses must be positive", {"min_mass": float(np.min(self._mass))})
        if not (self._tail.shape == self._head.shape == self._weight.shape):
            raise GraphError("Edge arrays have inconsistent lengths")
        if len(self._weight) and (not np.all(np.isfinite(self._weight)) or np.any(self._weight <= 0)):
            raise GraphError("Edge weights must be positive", {"min_weight": float(np.min(self._weight))})
        if len(self._tail) and (self._tail.min() < 0 or self._head.min() < 0
                                or self._tail.max() >= n_nodes or self._head.max() >= n_nodes):
            raise GraphError("Edge refers to an unknown node index")
        seen = set()
        for t, h in zip(self._tail.tolist(), self._head.tolist()):
            if t == h:
                raise GraphError(
                    f"Self-edge at node {self._ids[t]!r} is not allowed", {"node": str(self._ids[t])}
                )
            pair = (min(t, h), max(t, h))
            if pair in seen:
                raise GraphError(
                    f"Duplicate edge between {self._ids[t]!r} and {self._ids[h]!r}",
                    {"tail": str(self._ids[t]), "head": str(self._ids[h])},
                )
            seen.add(pair)

    def _build_incidence(self) -> None:
        n_nodes = len(self._ids)
        n_edges = len(self._tail)
        ends = np.concatenate([self._tail, self._head])
        edges = np.concatenate([np.arange(n_edges), np.arange(n_edges)])
        signs = np.concatenate([np.ones(n_edges, dtype=np.int64), -np.ones(n_edges, dtype=np.int64)])
        order = np.lexsort((edges, ends))
        counts = np.bincount(ends, minlength=n_nodes)
        self.inc_ptr = _readonly(np.concatenate([[0], np.cumsum(counts)]).astype(np.int64))
        self.inc_edge = _readonly(edges[order].astype(np.int64))
        self.inc_sign = _readonly(signs[order].astype(np.int64))

    def _compute_constants(self) -> GraphConstants:
        degrees = np.diff(self.inc_ptr)
        max_degree = int(degrees.max()) if len(degrees) else 0
        inv_mass = float(np.max(1.0 / self._mass))
        max_weight = float(np.max(self._weight)) if len(self._weight) else 0.0
        M = max(inv_mass, max_weight)
        d = float(max(max_degree, 2))
        n_nodes, n_edges = len(self._ids), len(self._tail)
        A = 2.0 * M * d * math.sqrt((n_nodes + n_edges) * M)
        return GraphConstants(M=M, d=d, max_degree=max_degree,
                              node_count=n_nodes, edge_count=n_edges, A=A)

    # Interface ---------------------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return True

    @property
    def node_count(self) -> int:
        return len(self._ids)

    @property
    def edge_count(self) -> int:
        return len(self._tail)

    @property
    def constants(self) -> GraphConstants:
        return self._constants

    @property
    def node_ids(self) -> List[NodeId]:
        return list(self._ids)

    def node_index(self, node_id: NodeId) -> int:
        try:
            return self._index[node_id]
        except (KeyError, TypeError):
            raise GraphError(f"Unknown node id: {node_id!r}", {"node": str(node_id)})

    def node_id(self, index: int) -> NodeId:
        return self._ids[index]

    def incident(self, index: int) -> Tuple[np.ndarray, np.ndarray]:
        lo, hi = self.inc_ptr[index], self.inc_ptr[index + 1]
        return self.inc_edge[lo:hi], self.inc_sign[lo:hi]

    def edge_index(self, tail_id: NodeId, head_id: NodeId) -> Tuple[int, int]:
        """Locate the edge joining two nodes.

        Returns:
            (edge index, orientation) with orientation +1 if the edge is
            stored as (tail_id, head_id) and -1 if stored reversed.

        Raises:
            GraphError: If the nodes are not adjacent
        """
        t, h = self.node_index(tail_id), self.node_index(head_id)
        if (t, h) in self._edge_index:
            return self._edge_index[(t, h)], 1
        if (h, t) in self._edge_index:
            return self._edge_index[(h, t)], -1
        raise GraphError(f"No edge between {tail_id!r} and {head_id!r}")

    def node_mass(self, index: int) -> float:
        return float(self._mass[index])

    def edge_weight(self, edge: int) -> float:
        return float(self._weight[edge])

    def edge_ends(self, edge: int) -> Tuple[int, int]:
        return int(self._tail[edge]), int(self._head[edge])

    def is_fixed(self, index: int) -> bool:
        return bool(self._fixed[index])

    def unit_vector(self, edge: int) -> np.ndarray:
        t, h = self.edge_ends(edge)
        delta = self._coords[h] - self._coords[t]
        if self.period is not None:
            delta = delta - self.period * np.round(delta / self.period)
            # a half-period offset is ambiguous; the stored orientation wins
            delta = np.where(np.isclose(np.abs(delta), self.period / 2), np.abs(delta), delta)
        norm = np.linalg.norm(delta)
        if norm == 0:
            raise GraphError(f"Edge {self.edge_label(edge)} joins nodes with equal coordinates")
        return delta / norm

    @property
    def mass(self) -> np.ndarray:
        return self._mass

    @property
    def weight(self) -> np.ndarray:
        return self._weight

    @property
    def tail(self) -> np.ndarray:
        return self._tail

    @property
    def head(self) -> np.ndarray:
        return self._head

    @property
    def fixed(self) -> np.ndarray:
        return self._fixed

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    def node_array(self, values: Optional[NodeValues], default: float = 0.0) -> np.ndarray:
        """Convert node data (mapping, sequence or callable) to an array in index order."""
        out = np.full(self.node_count, default, dtype=np.float64)
        if values is None:
            return out
        if callable(values):
            for i, node_id in enumerate(self._ids):
                out[i] = float(values(node_id))
        elif isinstance(values, Mapping):
            for node_id, value in values.items():
                out[self.node_index(node_id)] = float(value)
        else:
            arr = np.asarray(values, dtype=np.float64)
            if arr.shape != (self.node_count,):
                raise GraphError(
                    f"Node data has length {arr.size}, expected {self.node_count}"
                )
            out[:] = arr
        return out

    def __repr__(self) -> str:
        return f"FiniteGraph(kind={self.kind!r}, nodes={self.node_count}, edges={self.edge_count})"


class LatticeGraph(Graph):
    """The integer lattice Z^d with uniform mass and weight, materialized lazily.

    Nodes are d-tuples of integers. A node (and the edges around it) is
    created the first time it is touched; edges are oriented from the
    lexicographically smaller to the larger endpoint.
    """

    kind = "lattice"

    def __init__(self, dim: int, mass: float = 1.0, weight: float = 1.0):
        if int(dim) != dim or dim < 1:
            raise GraphError(f"Lattice dimension must be a positive integer, got {dim}")
        if not (mass > 0 and math.isfinite(mass)):
            raise GraphError(f"Lattice mass must be positive, got {mass}")
        if not (weight > 0 and math.isfinite(weight)):
            raise GraphError(f"Lattice weight must be positive, got {weight}")
        self.dim = int(dim)
        self._m = float(mass)
        self._k = float(weight)
        self._ids: List[Tuple[int, ...]] = []
        self._index: Dict[Tuple[int, ...], int] = {}
        self._tail: List[int] = []
        self._head: List[int] = []
        self._edge_index: Dict[Tuple[int, int], int] = {}
        self._incident: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        M = max(1.0 / self._m, self._k)
        self._constants = GraphConstants(M=M, d=float(max(2 * self.dim, 2)), max_degree=2 * self.dim)

    def _key(self, node_id: NodeId) -> Tuple[int, ...]:
        if isinstance(node_id, (int, np.integer)) and self.dim == 1:
            return (int(node_id),)
        try:
            key = tuple(int(c) for c in node_id)
        except TypeError:
            raise GraphError(f"Lattice node id must be a {self.dim}-tuple of integers, got {node_id!r}")
        if len(key) != self.dim:
            raise GraphError(f"Lattice node id must have {self.dim} coordinates, got {node_id!r}")
        return key

    def _touch(self, key: Tuple[int, ...]) -> int:
        index = self._index.get(key)
        if index is None:
            index = len(self._ids)
            self._ids.append(key)
            self._index[key] = index
        return index

    def _edge(self, a: int, b: int) -> int:
        tail, head = (a, b) if self._ids[a] < self._ids[b] else (b, a)
        edge = self._edge_index.get((tail, head))
        if edge is None:
            edge = len(self._tail)
            self._tail.append(tail)
            self._head.append(head)
            self._edge_index[(tail, head)] = edge
        return edge

    @property
    def is_finite(self) -> bool:
        return False

    @property
    def node_count(self) -> int:
        return len(self._ids)

    @property
    def edge_count(self) -> int:
        return len(self._tail)

    @property
    def constants(self) -> GraphConstants:
        return self._constants

    def node_index(self, node_id: NodeId) -> int:
        return self._touch(self._key(node_id))

    def node_id(self, index: int) -> Tuple[int, ...]:
        return self._ids[index]

    def incident(self, index: int) -> Tuple[np.ndarray, np.ndarray]:
        cached = self._incident.get(index)
        if cached is not None:
            return cached
        key = self._ids[index]
        edges, signs = [], []
        for axis in range(self.dim):
            for step in (-1, 1):
                other = list(key)
                other[axis] += step
                j = self._touch(tuple(other))
                edge = self._edge(index, j)
                edges.append(edge)
                signs.append(1 if self._tail[edge] == index else -1)
        result = (np.asarray(edges, dtype=np.int64), np.asarray(signs, dtype=np.int64))
        self._incident[index] = result
        return result

    def node_mass(self, index: int) -> float:
        return self._m

    def edge_weight(self, edge: int) -> float:
        return self._k

    def edge_ends(self, edge: int) -> Tuple[int, int]:
        return self._tail[edge], self._head[edge]

    def is_fixed(self, index: int) -> bool:
        return False

    def unit_vector(self, edge: int) -> np.ndarray:
        t, h = self.edge_ends(edge)
        return np.asarray(self._ids[h], dtype=np.float64) - np.asarray(self._ids[t], dtype=np.float64)

    @property
    def mass(self) -> np.ndarray:
        return np.full(self.node_count, self._m)

    @property
    def weight(self) -> np.ndarray:
        return np.full(self.edge_count, self._k)

    @property
    def tail(self) -> np.ndarray:
        return np.asarray(self._tail, dtype=np.int64)

    @property
    def head(self) -> np.ndarray:
        return np.asarray(self._head, dtype=np.int64)

    @property
    def fixed(self) -> np.ndarray:
        return np.zeros(self.node_count, dtype=bool)

    def __repr__(self) -> str:
        return f"LatticeGraph(dim={self.dim}, materialized_nodes={self.node_count})"


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True, order="C")
    arr.setflags(write=False)
    return arr


def ring_graph(n: int) -> FiniteGraph:
    """Periodic ring G_n used by the hydrodynamic experiments.

    Node k sits at k/n with mass 1/n; edges <k, k+1 mod n> carry weight n
    and all point along the positive direction, including <n-1, 0>.

    Raises:
        GraphError: If n < 3 (n = 2 would duplicate the pair <0,1>/<1,0>)
    """
    if int(n) != n or n < 3:
        raise GraphError("ring requires n ≥ 3", {"n": n})
    n = int(n)
    nodes = np.arange(n)
    return FiniteGraph(
        node_ids=list(range(n)),
        mass=np.full(n, 1.0 / n),
        coords=(nodes / n).reshape(n, 1),
        fixed=np.zeros(n, dtype=bool),
        tail=nodes,
        head=(nodes + 1) % n,
        weight=np.full(n, float(n)),
        kind="ring",
        period=1.0,
    )


def lattice_graph(dim: int, mass: float = 1.0, weight: float = 1.0) -> LatticeGraph:
    """Lazily materialized lattice Z^d with uniform mass and weight."""
    return LatticeGraph(dim, mass, weight)


def build_graph(spec: Mapping[str, Any]) -> Graph:
    """Build a graph from a declarative description.

    Accepted forms:
        {"type": "ring", "n": 64}
        {"type": "lattice", "dim": 2, "mass": 1.0, "weight": 1.0}
        {"nodes": [{"id", "mass", "coord", "boundary"}],
         "edges": [{"tail", "head", "weight"}]}

    Args:
        spec: Graph description (already parsed JSON)

    Returns:
        Graph with canonical orientations fixed by listing order

    Raises:
        GraphError: For duplicate or self edges, non-positive masses or
            weights, unknown node ids or malformed descriptions
    """
    if not isinstance(spec, Mapping):
        raise GraphError("Graph description must be a JSON object")

    graph_type = spec.get("type", "explicit")
    if graph_type == "ring":
        if "n" not in spec:
            raise GraphError("Ring description requires 'n'")
        return ring_graph(spec["n"])
    if graph_type == "lattice":
        return lattice_graph(spec.get("dim", 1), spec.get("mass", 1.0), spec.get("weight", 1.0))
    if graph_type == "file":
        return load_graph(spec["path"])
    if graph_type != "explicit":
        raise GraphError(f"Unknown graph type: {graph_type!r}")

    nodes = spec.get("nodes")
    edges = spec.get("edges", [])
    if not nodes:
        raise GraphError("Graph description requires a non-empty 'nodes' list")

    node_ids, masses, coords, fixed = [], [], [], []
    for entry in nodes:
        try:
            node_id = entry["id"]
            mass = float(entry["mass"])
        except (KeyError, TypeError, ValueError) as e:
            raise GraphError(f"Invalid node entry {entry!r}: {e}")
        boundary = entry.get("boundary", "V0")
        if boundary not in ("V0", "V1"):
            raise GraphError(f"Node {node_id!r} has invalid boundary {boundary!r}; use 'V0' or 'V1'")
        if mass <= 0 or not math.isfinite(mass):
            raise GraphError(f"Node {node_id!r} has non-positive mass {mass}", {"node": str(node_id)})
        node_ids.append(node_id)
        masses.append(mass)
        coords.append(list(entry.get("coord", [float(len(coords))])))
        fixed.append(boundary == "V1")

    widths = {len(c) for c in coords}
    if len(widths) != 1:
        raise GraphError("All node coordinates must have the same dimension")

    index = {}
    for i, node_id in enumerate(node_ids):
        if node_id in index:
            raise GraphError(f"Duplicate node id: {node_id!r}", {"node": str(node_id)})
        index[node_id] = i

    tails, heads, weights = [], [], []
    for entry in edges:
        try:
            tail_id, head_id = entry["tail"], entry["head"]
            weight = float(entry.get("weight", 1.0))
        except (KeyError, TypeError, ValueError) as e:
            raise GraphError(f"Invalid edge entry {entry!r}: {e}")
        for end in (tail_id, head_id):
            if end not in index:
                raise GraphError(f"Edge refers to unknown node id {end!r}", {"node": str(end)})
        if weight <= 0 or not math.isfinite(weight):
            raise GraphError(
                f"Edge ({tail_id!r}, {head_id!r}) has non-positive weight {weight}",
                {"tail": str(tail_id), "head": str(head_id)},
            )
        tails.append(index[tail_id])
        heads.append(index[head_id])
        weights.append(weight)

    return FiniteGraph(
        node_ids=node_ids,
        mass=masses,
        coords=np.asarray(coords, dtype=np.float64),
        fixed=fixed,
        tail=tails,
        head=heads,
        weight=weights,
    )


def load_graph(path: Union[str, Path]) -> Graph:
    """Load a graph description from a JSON file.

    Raises:
        GraphError: If the file is missing, unreadable or invalid
    """
    graph_path = Path(path)
    if not graph_path.exists():
        raise GraphError(f"Graph file does not exist: {graph_path}", {"path": str(graph_path)})
    try:
        with open(graph_path) as f:
            spec = json.load(f)
    except json.JSONDecodeError as e:
        raise GraphError(f"Invalid JSON in graph file {graph_path}: {e}", {"path": str(graph_path)})
    return build_graph(spec)


def two_node_graph(mass: float = 1.0, weight: float = 1.0, boundary: Iterable[str] = ("V0", "V0")) -> FiniteGraph:
    """Two nodes a, b at coordinates 0 and 1 joined by the edge <a, b>."""
    ba, bb = tuple(boundary)
    return build_graph({
        "nodes": [
            {"id": "a", "mass": mass, "coord": [0.0], "boundary": ba},
            {"id": "b", "mass": mass, "coord": [1.0], "boundary": bb},
        ],
        "edges": [{"tail": "a", "head": "b", "weight": weight}],
    })


def resolve_node_id(graph: Graph, token: Any) -> NodeId:
    """Node id for a value read from JSON or the command line.

    JSON object keys are strings, so ``"3"`` resolves to the integer id 3
    and ``"1,-2"``, ``"(1, -2)"`` or ``[1, -2]`` to the lattice node (1, -2)
    whenever no node carries the literal id.

    Raises:
        GraphError: If no node matches
    """
    if isinstance(token, list):
        token = tuple(token)
    if graph.is_finite:
        try:
            graph.node_index(token)
            return token
        except GraphError:
            pass
    if isinstance(token, str):
        try:
            parts = tuple(int(p) for p in token.strip().strip("()").split(",") if p.strip())
        except ValueError:
            parts = ()
        if not parts:
            raise GraphError(f"Unknown node id: {token!r}", {"node": token})
        token = parts[0] if len(parts) == 1 and graph.is_finite else parts
    graph.node_index(token)
    return token


def resolve_edge_ids(graph: Graph, text: str) -> Tuple[NodeId, NodeId]:
    """Tail and head ids from an edge name ``"<tail>-<head>"``.

    Node ids may contain "-" themselves (negative integers or lattice
    coordinates), so every "-" is tried as the separator. On finite graphs
    a split must also name an existing edge.

    Raises:
        GraphError: If no split, or more than one, names an edge
    """
    text = str(text)
    matches = []
    for k, char in enumerate(text):
        if char != "-":
            continue
        try:
            tail = resolve_node_id(graph, text[:k])
            head = resolve_node_id(graph, text[k + 1:])
            if graph.is_finite:
                graph.edge_index(tail, head)
        except GraphError:
            continue
        matches.append((tail, head))
    if not matches:
        raise GraphError(f"Edge name {text!r} does not name an edge as 'tail-head'", {"edge": text})
    if len(matches) > 1:
        raise GraphError(f"Edge name {text!r} is ambiguous: {matches}", {"edge": text})
    return matches[0]
