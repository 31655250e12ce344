"""Metric graphs and tropical curves: the ambient spaces for divisor theory.

A graph is a finite connected multigraph (loops and parallel edges allowed).
A metric graph assigns every edge a positive exact rational length; a
tropical curve additionally allows edges of infinite length, whose far
endpoint (the *unbounded end*) must be a valence-1 vertex.

Everything here is immutable after validation.  Operations that change the
metric (rescaling, unit subdivision, retraction of ends) return new graphs
together with explicit correspondences so that divisors and functions can
be transported between them.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .rationals import INF, Infinite, Scalar, is_finite


class GraphError(ValueError):
    """Raised for structurally invalid graphs, points, or operations."""


@dataclass(frozen=True)
class Edge:
    """An edge with its two stored endpoints; ``u == v`` is a loop.

    Offsets along the edge are measured from ``u``.  For infinite edges the
    constructor of MetricGraph normalizes the orientation so that ``u`` is
    the attachment vertex and ``v`` is the unbounded end.
    """

    id: str
    u: str
    v: str

    def is_loop(self) -> bool:
        return self.u == self.v


@dataclass(frozen=True)
class Graph:
    """Combinatorial layer: vertex ids plus an edge sequence."""

    vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]

    def __post_init__(self):
        seen = set()
        for v in self.vertices:
            if v in seen:
                raise GraphError(f"duplicate vertex id {v!r}")
            seen.add(v)
        if not self.vertices:
            raise GraphError("graph needs at least one vertex")
        eids = set()
        for e in self.edges:
            if e.id in eids:
                raise GraphError(f"duplicate edge id {e.id!r}")
            eids.add(e.id)
            if e.u not in seen or e.v not in seen:
                raise GraphError(f"edge {e.id!r} references unknown vertex")
        self._check_connected()

    def _check_connected(self):
        adjacency = {v: set() for v in self.vertices}
        for e in self.edges:
            adjacency[e.u].add(e.v)
            adjacency[e.v].add(e.u)
        stack = [self.vertices[0]]
        seen = set()
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(adjacency[v] - seen)
        if len(seen) != len(self.vertices):
            raise GraphError("graph is not connected")

    def edge(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise GraphError(f"unknown edge {edge_id!r}")

    def valence(self, vertex: str) -> int:
        """Number of edge-ends at the vertex; a loop counts twice."""
        if vertex not in self.vertices:
            raise GraphError(f"unknown vertex {vertex!r}")
        count = 0
        for e in self.edges:
            if e.u == vertex:
                count += 1
            if e.v == vertex:
                count += 1
        return count

    def genus(self) -> int:
        """First Betti number: |E| - |V| + 1 for a connected graph."""
        return len(self.edges) - len(self.vertices) + 1

    def max_valence(self) -> int:
        return max(self.valence(v) for v in self.vertices)


@dataclass(frozen=True)
class GraphPoint:
    """A point of the geometric representation, in canonical form.

    Exactly one of the two shapes is used:
      * vertex point: ``edge is None`` and ``vertex`` set;
      * edge-interior point: ``vertex is None``, ``edge`` set, and
        ``0 < offset < length(edge)`` measured from the edge's ``u`` side.

    Offsets 0 and length(e) are never stored; MetricGraph collapses them to
    the corresponding vertex so that point equality is structural equality.
    """

    vertex: Optional[str] = None
    edge: Optional[str] = None
    offset: Optional[Fraction] = None

    def is_vertex(self) -> bool:
        return self.vertex is not None

    def sort_key(self):
        if self.vertex is not None:
            return (0, self.vertex, Fraction(0))
        return (1, self.edge, self.offset)

    def __repr__(self) -> str:
        if self.vertex is not None:
            return f"@{self.vertex}"
        return f"@{self.edge}[{self.offset}]"


class MetricGraph:
    """A connected multigraph with exact positive (or infinite) edge lengths.

    Infinite edges model unbounded ends: each must have exactly one
    valence-1 endpoint, which plays the role of the point at infinity.
    Instances are immutable; all operations are pure.
    """

    def __init__(self, vertices: Sequence[str], edges: Sequence[Tuple[str, str, str]],
                 lengths: Mapping[str, Scalar]):
        """Build and validate.  ``edges`` are (id, u, v) triples."""
        edge_objs = []
        for eid, u, v in edges:
            edge_objs.append(Edge(eid, u, v))
        graph = Graph(tuple(vertices), tuple(edge_objs))
        self._lengths: Dict[str, Scalar] = {}
        for e in graph.edges:
            if e.id not in lengths:
                raise GraphError(f"edge {e.id!r} has no length")
            l = lengths[e.id]
            if isinstance(l, Infinite):
                if l != INF:
                    raise GraphError(f"edge {e.id!r} has negative infinite length")
            else:
                l = Fraction(l)
                if l <= 0:
                    raise GraphError(f"edge {e.id!r} must have positive length")
            self._lengths[e.id] = l
        # Normalize infinite edges: u = attachment, v = unbounded end.
        fixed_edges = []
        for e in graph.edges:
            if self._lengths[e.id] == INF:
                val_u, val_v = graph.valence(e.u), graph.valence(e.v)
                if e.is_loop():
                    raise GraphError(f"infinite edge {e.id!r} cannot be a loop")
                if val_v == 1:
                    fixed_edges.append(e)
                elif val_u == 1:
                    fixed_edges.append(Edge(e.id, e.v, e.u))
                else:
                    raise GraphError(
                        f"infinite edge {e.id!r} needs a valence-1 endpoint (its end)")
            else:
                fixed_edges.append(e)
        self.graph = Graph(graph.vertices, tuple(fixed_edges))
        self._edge_by_id = {e.id: e for e in self.graph.edges}
        self._vertex_distances: Optional[Dict[str, Dict[str, Fraction]]] = None

    # -- basic accessors ------------------------------------------------

    @property
    def vertices(self) -> Tuple[str, ...]:
        return self.graph.vertices

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return self.graph.edges

    def length(self, edge_id: str) -> Scalar:
        try:
            return self._lengths[edge_id]
        except KeyError:
            raise GraphError(f"unknown edge {edge_id!r}") from None

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edge_by_id[edge_id]
        except KeyError:
            raise GraphError(f"unknown edge {edge_id!r}") from None

    def valence(self, vertex: str) -> int:
        return self.graph.valence(vertex)

    def genus(self) -> int:
        return self.graph.genus()

    def infinite_edges(self) -> Tuple[Edge, ...]:
        return tuple(e for e in self.edges if self._lengths[e.id] == INF)

    def finite_edges(self) -> Tuple[Edge, ...]:
        return tuple(e for e in self.edges if self._lengths[e.id] != INF)

    def end_vertex(self, edge_id: str) -> str:
        """The unbounded end of an infinite edge (its normalized `v` side)."""
        e = self.edge(edge_id)
        if self.length(edge_id) != INF:
            raise GraphError(f"edge {edge_id!r} is not infinite")
        return e.v

    def end_vertices(self) -> Tuple[str, ...]:
        return tuple(e.v for e in self.infinite_edges())

    def is_end(self, vertex: str) -> bool:
        return any(e.v == vertex for e in self.infinite_edges())

    def is_z_graph(self) -> bool:
        """All lengths finite positive integers."""
        return all(is_finite(l) and l.denominator == 1 for l in self._lengths.values())

    def has_infinite_edges(self) -> bool:
        return any(l == INF for l in self._lengths.values())

    # -- points ----------------------------------------------------------

    def vertex_point(self, vertex: str) -> GraphPoint:
        if vertex not in self.graph.vertices:
            raise GraphError(f"unknown vertex {vertex!r}")
        return GraphPoint(vertex=vertex)

    def edge_point(self, edge_id: str, offset) -> GraphPoint:
        """Canonical point at `offset` from the u-endpoint of the edge."""
        e = self.edge(edge_id)
        l = self.length(edge_id)
        t = Fraction(offset)
        if t < 0:
            raise GraphError(f"negative offset {t} on edge {edge_id!r}")
        if t == 0:
            return GraphPoint(vertex=e.u)
        if isinstance(l, Infinite):
            return GraphPoint(edge=edge_id, offset=t)
        if t > l:
            raise GraphError(f"offset {t} exceeds length {l} of edge {edge_id!r}")
        if t == l:
            return GraphPoint(vertex=e.v)
        return GraphPoint(edge=edge_id, offset=t)

    def end_point(self, edge_id: str) -> GraphPoint:
        """The point at infinity of an infinite edge (a valence-1 vertex)."""
        return GraphPoint(vertex=self.end_vertex(edge_id))

    def contains_point(self, p: GraphPoint) -> bool:
        if p.vertex is not None:
            return p.vertex in self.graph.vertices
        if p.edge not in self._lengths:
            return False
        l = self._lengths[p.edge]
        return p.offset > 0 and (isinstance(l, Infinite) or p.offset < l)

    def is_z_point(self, p: GraphPoint) -> bool:
        """Integer distance to the vertices (on a Z-graph: integer offset)."""
        if p.vertex is not None:
            return True
        return p.offset.denominator == 1

    def z_points(self) -> List[GraphPoint]:
        """All Z-points of a finite Z-graph, vertices first, deterministic."""
        if not self.is_z_graph():
            raise GraphError("Z-points require an integer-length graph")
        points = [self.vertex_point(v) for v in sorted(self.vertices)]
        for e in sorted(self.edges, key=lambda e: e.id):
            l = self._lengths[e.id]
            for k in range(1, int(l)):
                points.append(GraphPoint(edge=e.id, offset=Fraction(k)))
        return points

    # -- metric ----------------------------------------------------------

    def _vertex_distance_table(self) -> Dict[str, Dict[str, Fraction]]:
        if self._vertex_distances is not None:
            return self._vertex_distances
        # Dijkstra from every vertex over the finite part; loops never help.
        weight: Dict[str, List[Tuple[str, Fraction]]] = {v: [] for v in self.vertices}
        for e in self.finite_edges():
            if e.is_loop():
                continue
            l = self._lengths[e.id]
            weight[e.u].append((e.v, l))
            weight[e.v].append((e.u, l))
        table = {}
        for src in self.vertices:
            dist: Dict[str, Fraction] = {src: Fraction(0)}
            heap: List[Tuple[Fraction, str]] = [(Fraction(0), src)]
            while heap:
                d, v = heapq.heappop(heap)
                if d > dist[v]:
                    continue
                for w, l in weight[v]:
                    nd = d + l
                    if w not in dist or nd < dist[w]:
                        dist[w] = nd
                        heapq.heappush(heap, (nd, w))
            table[src] = dist
        self._vertex_distances = table
        return table

    def _point_anchors(self, p: GraphPoint) -> List[Tuple[str, Fraction]]:
        """(vertex, finite distance to it along p's own edge) pairs."""
        if p.vertex is not None:
            if self.is_end(p.vertex):
                return []
            return [(p.vertex, Fraction(0))]
        e = self.edge(p.edge)
        l = self._lengths[p.edge]
        if isinstance(l, Infinite):
            return [(e.u, p.offset)]
        return [(e.u, p.offset), (e.v, l - p.offset)]

    def distance(self, p: GraphPoint, q: GraphPoint) -> Scalar:
        """Shortest-path distance in the geometric representation.

        Infinite iff exactly one argument is an unbounded end, or both are
        distinct ends.
        """
        for x in (p, q):
            if not self.contains_point(x):
                raise GraphError(f"point {x!r} does not lie on this graph")
        if p == q:
            return Fraction(0)
        best: Scalar = INF
        if p.edge is not None and q.edge is not None and p.edge == q.edge:
            best = abs(p.offset - q.offset)
        table = self._vertex_distance_table()
        for (a, da) in self._point_anchors(p):
            for (b, db) in self._point_anchors(q):
                if b in table[a]:
                    d = da + table[a][b] + db
                    if best == INF or d < best:
                        best = d
        return best

    def distance_to_set(self, p: GraphPoint, targets: Iterable[GraphPoint]) -> Scalar:
        best: Scalar = INF
        for t in targets:
            d = self.distance(p, t)
            if best == INF or (is_finite(d) and d < best):
                best = d
        return best

    # -- transformations --------------------------------------------------

    def rescale(self, factor) -> "Rescaling":
        """Multiply every finite length by ``factor`` (> 0); ends stay infinite.

        Points transport linearly: (e, t) goes to (e, factor*t).
        """
        lam = Fraction(factor)
        if lam <= 0:
            raise GraphError("rescaling factor must be positive")
        lengths = {eid: (l if isinstance(l, Infinite) else l * lam)
                   for eid, l in self._lengths.items()}
        target = MetricGraph(self.vertices, [(e.id, e.u, e.v) for e in self.edges], lengths)
        return Rescaling(source=self, target=target, factor=lam)

    def retract_core(self) -> Tuple["MetricGraph", Dict[str, str]]:
        """Delete all infinite edges (with their ends); keep the finite core.

        Returns the core graph and the attachment map edge id -> core vertex
        where that infinite edge used to meet the core.
        """
        ends = set(self.end_vertices())
        attachment = {e.id: e.u for e in self.infinite_edges()}
        core_vertices = [v for v in self.vertices if v not in ends]
        core_edges = [(e.id, e.u, e.v) for e in self.finite_edges()]
        if not core_vertices:
            raise GraphError("curve has no finite part")
        lengths = {e.id: self._lengths[e.id] for e in self.finite_edges()}
        core = MetricGraph(core_vertices, core_edges, lengths)
        return core, attachment

    def unit_subdivide(self) -> "Subdivision":
        return Subdivision.of(self)

    def __repr__(self) -> str:
        return f"MetricGraph(|V|={len(self.vertices)}, |E|={len(self.edges)}, g={self.genus()})"


@dataclass(frozen=True)
class Rescaling:
    """Result of MetricGraph.rescale: the new graph plus point transport."""

    source: MetricGraph
    target: MetricGraph
    factor: Fraction

    def point(self, p: GraphPoint) -> GraphPoint:
        if p.vertex is not None:
            return self.target.vertex_point(p.vertex)
        return self.target.edge_point(p.edge, p.offset * self.factor)

    def inverse_point(self, p: GraphPoint) -> GraphPoint:
        if p.vertex is not None:
            return self.source.vertex_point(p.vertex)
        return self.source.edge_point(p.edge, p.offset / self.factor)


class Subdivision:
    """Unit subdivision of a finite Z-graph.

    Vertices of the subdivision are exactly the Z-points of the base graph;
    every edge has length 1.  Loops of length 1 are rejected (rescale by 2
    first); longer loops are broken into chains, so the result is loopless.

    The correspondence is exposed through ``points`` (index -> base
    GraphPoint) and ``index_of``.
    """

    def __init__(self, base: MetricGraph, points: List[GraphPoint],
                 unit_edges: List[Tuple[int, int]]):
        self.base = base
        self.points: Tuple[GraphPoint, ...] = tuple(points)
        self.index: Dict[GraphPoint, int] = {p: i for i, p in enumerate(points)}
        self.unit_edges: Tuple[Tuple[int, int], ...] = tuple(unit_edges)
        n = len(points)
        neighbor_counts: List[Dict[int, int]] = [dict() for _ in range(n)]
        for (a, b) in unit_edges:
            if a == b:
                raise GraphError("unit subdivision produced a loop")
            neighbor_counts[a][b] = neighbor_counts[a].get(b, 0) + 1
            neighbor_counts[b][a] = neighbor_counts[b].get(a, 0) + 1
        self.adjacency: Tuple[Tuple[Tuple[int, int], ...], ...] = tuple(
            tuple(sorted(nc.items())) for nc in neighbor_counts)
        self.degree: Tuple[int, ...] = tuple(
            sum(m for _, m in adj) for adj in self.adjacency)

    @staticmethod
    def of(base: MetricGraph) -> "Subdivision":
        if not base.is_z_graph():
            raise GraphError("unit subdivision requires an integer-length graph")
        for e in base.edges:
            if e.is_loop() and base.length(e.id) == 1:
                raise GraphError(
                    f"loop {e.id!r} of length 1: rescale by at least 2 first")
        points = base.z_points()
        index = {p: i for i, p in enumerate(points)}
        unit_edges: List[Tuple[int, int]] = []
        for e in sorted(base.edges, key=lambda e: e.id):
            l = int(base.length(e.id))
            chain = [index[base.vertex_point(e.u)]]
            for k in range(1, l):
                chain.append(index[GraphPoint(edge=e.id, offset=Fraction(k))])
            chain.append(index[base.vertex_point(e.v)])
            for a, b in zip(chain, chain[1:]):
                unit_edges.append((a, b))
        return Subdivision(base, points, unit_edges)

    @property
    def n(self) -> int:
        return len(self.points)

    def index_of(self, p: GraphPoint) -> int:
        try:
            return self.index[p]
        except KeyError:
            raise GraphError(f"{p!r} is not a Z-point of the base graph") from None

    def as_graph(self) -> Graph:
        """Materialize the combinatorial unit graph with readable ids."""
        names = []
        for p in self.points:
            if p.vertex is not None:
                names.append(p.vertex)
            else:
                names.append(f"{p.edge}:{p.offset}")
        edges = [Edge(f"u{i}", names[a], names[b])
                 for i, (a, b) in enumerate(self.unit_edges)]
        return Graph(tuple(names), tuple(edges))

    def genus(self) -> int:
        return len(self.unit_edges) - self.n + 1
