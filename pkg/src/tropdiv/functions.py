"""Tropical rational functions: continuous piecewise-linear, integer slopes.

A function is stored per edge as an ordered breakpoint list, affine with
integer slope between consecutive breakpoints.  On an infinite edge the
data ends with a constant integer slope toward the unbounded end, where the
value is +/-infinity unless that slope is zero.

Orders, principal divisors, the end ramps used to retract divisors off
unbounded edges, the snap-to-lattice ramp, and the a-priori slope bound all
live here.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .divisors import Divisor
from .graphs import Graph, GraphError, GraphPoint, MetricGraph
from .rationals import INF, NEG_INF, Infinite, Scalar, is_finite


class FunctionError(ValueError):
    pass


@dataclass(frozen=True)
class EdgePL:
    """Piecewise-linear data on one edge.

    ``breakpoints`` is ((0, v0), ..., (tk, vk)) with strictly increasing
    offsets; on a finite edge tk equals the edge length and ``end_slope``
    is None, on an infinite edge ``end_slope`` is the integer slope of the
    final ray toward the end.
    """

    breakpoints: Tuple[Tuple[Fraction, Fraction], ...]
    end_slope: Optional[int] = None


def _slope(p0: Tuple[Fraction, Fraction], p1: Tuple[Fraction, Fraction]) -> Fraction:
    return (p1[1] - p0[1]) / (p1[0] - p0[0])


def _canonical_edge(data: EdgePL) -> EdgePL:
    bps = list(data.breakpoints)
    out = [bps[0]]
    for i in range(1, len(bps)):
        if len(out) >= 2 and _slope(out[-2], out[-1]) == _slope(out[-1], bps[i]):
            out[-1] = bps[i]
        else:
            out.append(bps[i])
    if data.end_slope is not None and len(out) >= 2:
        if _slope(out[-2], out[-1]) == data.end_slope:
            out.pop()
    return EdgePL(tuple(out), data.end_slope)


class RationalFunction:
    """A rational function on a metric graph (tropical curve).

    Immutable; arithmetic returns new functions.  Values are exact
    rationals except at unbounded ends, where they may be the symbolic
    infinities.
    """

    __slots__ = ("host", "_edges", "_vertex_values")

    def __init__(self, host: MetricGraph, edge_data: Mapping[str, EdgePL],
                 constant: Optional[Fraction] = None):
        self.host = host
        edges = host.edges
        if not edges:
            if constant is None:
                raise FunctionError("edgeless graph requires an explicit constant")
            self._edges: Dict[str, EdgePL] = {}
            self._vertex_values = {host.vertices[0]: Fraction(constant)}
            return
        self._edges = {}
        for e in edges:
            if e.id not in edge_data:
                raise FunctionError(f"no data for edge {e.id!r}")
            data = edge_data[e.id]
            l = host.length(e.id)
            bps = tuple((Fraction(t), Fraction(v)) for t, v in data.breakpoints)
            if not bps or bps[0][0] != 0:
                raise FunctionError(f"edge {e.id!r}: breakpoints must start at offset 0")
            for (t0, v0), (t1, v1) in zip(bps, bps[1:]):
                if t1 <= t0:
                    raise FunctionError(f"edge {e.id!r}: offsets must increase")
                if _slope((t0, v0), (t1, v1)).denominator != 1:
                    raise FunctionError(
                        f"edge {e.id!r}: non-integer slope between {t0} and {t1}")
            if isinstance(l, Infinite):
                if data.end_slope is None or int(data.end_slope) != data.end_slope:
                    raise FunctionError(f"infinite edge {e.id!r} needs an integer end slope")
                self._edges[e.id] = _canonical_edge(EdgePL(bps, int(data.end_slope)))
            else:
                if data.end_slope is not None:
                    raise FunctionError(f"finite edge {e.id!r} cannot carry an end slope")
                if bps[-1][0] != l:
                    raise FunctionError(
                        f"edge {e.id!r}: breakpoints must reach the far endpoint")
                self._edges[e.id] = _canonical_edge(EdgePL(bps, None))
        # Continuity: all edge-ends meeting at a vertex must agree.
        values: Dict[str, Fraction] = {}

        def put(vertex: str, value: Fraction, eid: str):
            if vertex in values:
                if values[vertex] != value:
                    raise FunctionError(
                        f"discontinuous at vertex {vertex!r} (edge {eid!r})")
            else:
                values[vertex] = value

        ends = set(host.end_vertices())
        for e in edges:
            data = self._edges[e.id]
            put(e.u, data.breakpoints[0][1], e.id)
            if not isinstance(host.length(e.id), Infinite):
                put(e.v, data.breakpoints[-1][1], e.id)
        for v in host.vertices:
            if v not in values and v not in ends:
                raise FunctionError(f"vertex {v!r} has no incident finite value")
        self._vertex_values = values

    # -- constructors -----------------------------------------------------

    @staticmethod
    def constant(host: MetricGraph, value) -> "RationalFunction":
        c = Fraction(value)
        if not host.edges:
            return RationalFunction(host, {}, constant=c)
        data = {}
        for e in host.edges:
            l = host.length(e.id)
            if isinstance(l, Infinite):
                data[e.id] = EdgePL(((Fraction(0), c),), 0)
            else:
                data[e.id] = EdgePL(((Fraction(0), c), (l, c)), None)
        return RationalFunction(host, data)

    @staticmethod
    def from_breakpoints(host: MetricGraph,
                         mapping: Mapping[str, Tuple[Sequence[Tuple[Fraction, Fraction]],
                                                     Optional[int]]]) -> "RationalFunction":
        data = {eid: EdgePL(tuple((Fraction(t), Fraction(v)) for t, v in bps), es)
                for eid, (bps, es) in mapping.items()}
        return RationalFunction(host, data)

    @staticmethod
    def from_z_values(host: MetricGraph, values: Mapping[GraphPoint, Fraction]) -> "RationalFunction":
        """Interpolate values given on all Z-points of a finite Z-graph."""
        if not host.edges:
            v = host.vertex_point(host.vertices[0])
            return RationalFunction(host, {}, constant=Fraction(values[v]))
        data = {}
        for e in host.edges:
            l = int(host.length(e.id))
            bps = []
            for k in range(l + 1):
                p = host.edge_point(e.id, Fraction(k))
                bps.append((Fraction(k), Fraction(values[p])))
            data[e.id] = EdgePL(tuple(bps), None)
        return RationalFunction(host, data)

    # -- structure --------------------------------------------------------

    def edge_data(self, edge_id: str) -> EdgePL:
        return self._edges[edge_id]

    def vertex_value(self, vertex: str) -> Scalar:
        if vertex in self._vertex_values:
            return self._vertex_values[vertex]
        # unbounded end: value comes from its edge's tail
        for e in self.host.infinite_edges():
            if e.v == vertex:
                return self._tail_value(e.id)
        raise FunctionError(f"unknown vertex {vertex!r}")

    def _tail_value(self, edge_id: str) -> Scalar:
        data = self._edges[edge_id]
        if data.end_slope > 0:
            return INF
        if data.end_slope < 0:
            return NEG_INF
        return data.breakpoints[-1][1]

    def _first_slope(self, edge_id: str) -> int:
        data = self._edges[edge_id]
        if len(data.breakpoints) >= 2:
            return int(_slope(data.breakpoints[0], data.breakpoints[1]))
        return int(data.end_slope or 0)

    def _last_slope(self, edge_id: str) -> int:
        """Slope of the final segment of a finite edge (toward its v side)."""
        data = self._edges[edge_id]
        return int(_slope(data.breakpoints[-2], data.breakpoints[-1]))

    def all_slopes(self) -> List[int]:
        slopes = []
        for data in self._edges.values():
            for p0, p1 in zip(data.breakpoints, data.breakpoints[1:]):
                slopes.append(int(_slope(p0, p1)))
            if data.end_slope is not None:
                slopes.append(data.end_slope)
        return slopes

    # -- evaluation and orders ---------------------------------------------

    def evaluate(self, p: GraphPoint) -> Scalar:
        if p.vertex is not None:
            return self.vertex_value(p.vertex)
        data = self._edges[p.edge]
        offsets = [t for t, _ in data.breakpoints]
        t = p.offset
        i = bisect.bisect_right(offsets, t) - 1
        if i == len(offsets) - 1:
            if data.end_slope is None:
                return data.breakpoints[-1][1]
            t0, v0 = data.breakpoints[-1]
            return v0 + data.end_slope * (t - t0)
        t0, v0 = data.breakpoints[i]
        t1, v1 = data.breakpoints[i + 1]
        return v0 + _slope((t0, v0), (t1, v1)) * (t - t0)

    def order(self, p: GraphPoint) -> int:
        """Sum of outgoing slopes over all directions emanating from p."""
        if p.vertex is not None:
            v = p.vertex
            total = 0
            for e in self.host.edges:
                infinite = isinstance(self.host.length(e.id), Infinite)
                if e.u == v:
                    total += self._first_slope(e.id)
                if e.v == v:
                    if infinite:
                        total += -int(self._edges[e.id].end_slope)
                    else:
                        total += -self._last_slope(e.id)
            return total
        data = self._edges[p.edge]
        offsets = [t for t, _ in data.breakpoints]
        i = bisect.bisect_left(offsets, p.offset)
        if i >= len(offsets) or offsets[i] != p.offset:
            return 0
        if i == 0:
            return 0  # offset 0 is a vertex, never stored here
        left = int(_slope(data.breakpoints[i - 1], data.breakpoints[i]))
        if i == len(offsets) - 1 and data.end_slope is not None:
            right = data.end_slope
        elif i == len(offsets) - 1:
            return 0  # far endpoint of a finite edge is a vertex
        else:
            right = int(_slope(data.breakpoints[i], data.breakpoints[i + 1]))
        return right - left

    def principal_divisor(self) -> Divisor:
        """(f) = sum of ord_P(f) * P over the finitely many nonzero orders."""
        coeffs: Dict[GraphPoint, int] = {}
        for v in self.host.vertices:
            a = self.order(self.host.vertex_point(v))
            if a != 0:
                coeffs[self.host.vertex_point(v)] = a
        for e in self.host.edges:
            data = self._edges.get(e.id)
            if data is None:
                continue
            l = self.host.length(e.id)
            for t, _ in data.breakpoints[1:]:
                if not isinstance(l, Infinite) and t == l:
                    continue
                p = GraphPoint(edge=e.id, offset=t)
                a = self.order(p)
                if a != 0:
                    coeffs[p] = a
        return Divisor(self.host, coeffs)

    # -- arithmetic ---------------------------------------------------------

    def add(self, other: "RationalFunction") -> "RationalFunction":
        if self.host is not other.host:
            raise FunctionError("functions live on different host graphs")
        if not self.host.edges:
            c = self._vertex_values[self.host.vertices[0]] + \
                other._vertex_values[other.host.vertices[0]]
            return RationalFunction(self.host, {}, constant=c)
        data = {}
        for e in self.host.edges:
            a, b = self._edges[e.id], other._edges[e.id]
            if a.end_slope is not None:
                va, vb = self._tail_value(e.id), other._tail_value(e.id)
                if isinstance(va, Infinite) and isinstance(vb, Infinite) and va != vb:
                    raise FunctionError(
                        f"edge {e.id!r}: opposite infinite end values cannot be added")
            offsets = sorted({t for t, _ in a.breakpoints} | {t for t, _ in b.breakpoints})
            bps = []
            for t in offsets:
                p = GraphPoint(edge=e.id, offset=t) if t != 0 else None
                fa = a.breakpoints[0][1] if t == 0 else self.evaluate(p)
                fb = b.breakpoints[0][1] if t == 0 else other.evaluate(p)
                bps.append((t, fa + fb))
            es = None
            if a.end_slope is not None:
                es = a.end_slope + b.end_slope
            data[e.id] = EdgePL(tuple(bps), es)
        return RationalFunction(self.host, data)

    def add_constant(self, c) -> "RationalFunction":
        c = Fraction(c)
        if not self.host.edges:
            return RationalFunction(self.host, {}, constant=self._vertex_values[self.host.vertices[0]] + c)
        data = {eid: EdgePL(tuple((t, v + c) for t, v in d.breakpoints), d.end_slope)
                for eid, d in self._edges.items()}
        return RationalFunction(self.host, data)

    def scale(self, k: int) -> "RationalFunction":
        """Multiply by an integer (keeps slopes integral)."""
        k = int(k)
        if not self.host.edges:
            return RationalFunction(self.host, {}, constant=k * self._vertex_values[self.host.vertices[0]])
        data = {eid: EdgePL(tuple((t, k * v) for t, v in d.breakpoints),
                            None if d.end_slope is None else k * d.end_slope)
                for eid, d in self._edges.items()}
        return RationalFunction(self.host, data)

    def negate(self) -> "RationalFunction":
        return self.scale(-1)

    def transport(self, rescaling) -> "RationalFunction":
        """Move along a Rescaling: offsets and values scale by the factor."""
        lam = rescaling.factor
        target = rescaling.target
        if not target.edges:
            return RationalFunction(target, {},
                                    constant=lam * self._vertex_values[self.host.vertices[0]])
        data = {eid: EdgePL(tuple((lam * t, lam * v) for t, v in d.breakpoints),
                            d.end_slope)
                for eid, d in self._edges.items()}
        return RationalFunction(target, data)

    def __eq__(self, other) -> bool:
        return (isinstance(other, RationalFunction) and self.host is other.host
                and self._edges == other._edges
                and self._vertex_values == other._vertex_values)

    def __repr__(self) -> str:
        return f"RationalFunction(on {self.host!r})"


def slope_bound(g, p: int) -> int:
    """(N + p) ** alpha: any function with at most p poles (with multiplicity)
    on any metrization of the combinatorial graph has all slopes below this.
    """
    if p < 1:
        raise FunctionError("pole count must be at least 1")
    graph = g.graph if isinstance(g, MetricGraph) else g
    n = graph.max_valence()
    alpha = len(graph.edges)
    return (n + p) ** alpha


def end_ramp(g: MetricGraph, p: GraphPoint) -> RationalFunction:
    """The retraction ramp attached to a point of an unbounded edge.

    Zero on the finite core; on the edge of ``p`` it climbs with slope 1
    from the attachment vertex until the depth of ``p``, then stays
    constant.  Its divisor is (attachment) - p, a simple pole at p.  For a
    core point the zero function is returned.
    """
    if not g.contains_point(p):
        raise GraphError(f"{p!r} is not on the graph")
    infinite_ids = {e.id for e in g.infinite_edges()}
    on_edge = p.edge if (p.edge in infinite_ids) else None
    if on_edge is None and p.vertex is not None and g.is_end(p.vertex):
        on_edge = next(e.id for e in g.infinite_edges() if e.v == p.vertex)
        depth = None  # the end itself
    elif on_edge is None:
        return RationalFunction.constant(g, 0)
    else:
        depth = p.offset
    zero = RationalFunction.constant(g, 0)
    data = {eid: d for eid, d in zero._edges.items()}
    if depth is None:
        data[on_edge] = EdgePL(((Fraction(0), Fraction(0)),), 1)
    else:
        data[on_edge] = EdgePL(((Fraction(0), Fraction(0)), (depth, depth)), 0)
    return RationalFunction(g, data)


def distance_to_lattice(g: MetricGraph, p: GraphPoint) -> Fraction:
    """Distance from a point of a Z-graph to the nearest Z-point.

    The nearest lattice point always lies on the point's own edge, so this
    is just the fractional part of the offset, folded.
    """
    if p.vertex is not None:
        return Fraction(0)
    frac = p.offset - int(p.offset)
    return min(frac, 1 - frac)


def snap_ramp(g: MetricGraph, zeros: Sequence[GraphPoint], target: GraphPoint) -> RationalFunction:
    """The constructive move of lattice snapping.

    Given the points ``zeros`` (all off the lattice, interior to edges) of
    an effective divisor and a Z-point ``target`` realizing the minimal
    distance d from the nearest of them to the lattice, build h with
      h(Q) = -min(d, dist(Q, zeros))   on the component of the complement
                                       of the zeros containing target,
      h(Q) = 0                         elsewhere.
    All slopes of h are in {0, +1, -1}; h has order >= 1 at target and
    poles only at the zeros.
    """
    if not g.is_z_graph():
        raise FunctionError("lattice snapping requires a Z-graph")
    if g.has_infinite_edges():
        raise FunctionError("lattice snapping requires a finite graph")
    if not zeros:
        raise FunctionError("need at least one zero to snap")
    for z in zeros:
        if z.vertex is not None or g.is_z_point(z):
            raise FunctionError(f"zero {z!r} must be an off-lattice edge point")
    if not g.is_z_point(target):
        raise FunctionError(f"target {target!r} must be a Z-point")
    d = min(distance_to_lattice(g, z) for z in zeros)
    if d <= 0:
        raise FunctionError("zeros already on the lattice")
    if g.distance_to_set(target, zeros) != d:
        raise FunctionError("target does not realize the minimal lattice distance")

    component = _component_of(g, zeros, target)

    data: Dict[str, EdgePL] = {}
    for e in g.edges:
        l = g.length(e.id)
        cuts = sorted(z.offset for z in zeros if z.edge == e.id)
        boundaries = [Fraction(0)] + cuts + [l]
        candidates = set(boundaries)
        # Kinks of dist(., zeros) restricted to this edge: all crossings of
        # the slope +-1 cones; include apexes and pairwise intersections.
        pieces = []  # affine pieces as (slope, value_at_0)
        for z in zeros:
            dzu = g.distance(g.vertex_point(e.u), z)
            dzv = g.distance(g.vertex_point(e.v), z)
            if is_finite(dzu):
                pieces.append((Fraction(1), dzu))
            if is_finite(dzv):
                pieces.append((Fraction(-1), dzv + l))
            if z.edge == e.id:
                pieces.append((Fraction(1), -z.offset))
                pieces.append((Fraction(-1), z.offset))
        pieces.append((Fraction(0), d))  # the cap at depth d
        for i in range(len(pieces)):
            for j in range(i + 1, len(pieces)):
                s1, c1 = pieces[i]
                s2, c2 = pieces[j]
                if s1 != s2:
                    t = (c2 - c1) / (s1 - s2)
                    if 0 < t < l:
                        candidates.add(t)
        offsets = sorted(candidates)
        bps = []
        for t in offsets:
            inside = _offset_in_component(e.id, t, cuts, component, g)
            if inside:
                pt = g.edge_point(e.id, t)
                dist = g.distance_to_set(pt, zeros)
                value = -min(d, dist)
            else:
                value = Fraction(0)
            bps.append((t, value))
        data[e.id] = EdgePL(tuple(bps), None)
    return RationalFunction(g, data)


def _component_of(g: MetricGraph, cuts: Sequence[GraphPoint], target: GraphPoint):
    """Connected component of the graph minus the cut points, as a set of
    (edge id, segment index) pieces plus the vertices it contains."""
    segments = {}  # (eid, k) -> (u-side anchor vertex or None, v-side ...)
    cut_offsets: Dict[str, List[Fraction]] = {}
    for c in cuts:
        cut_offsets.setdefault(c.edge, []).append(c.offset)
    for eid in cut_offsets:
        cut_offsets[eid].sort()
    parent: Dict = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for v in g.vertices:
        parent[("v", v)] = ("v", v)
    for e in g.edges:
        offs = cut_offsets.get(e.id, [])
        nseg = len(offs) + 1
        for k in range(nseg):
            key = ("s", e.id, k)
            parent[key] = key
            segments[(e.id, k)] = key
        union(("s", e.id, 0), ("v", e.u))
        union(("s", e.id, len(offs)), ("v", e.v))

    if target.vertex is not None:
        root = find(("v", target.vertex))
    else:
        offs = cut_offsets.get(target.edge, [])
        k = bisect.bisect_right(offs, target.offset)
        root = find(("s", target.edge, k))
    return {
        "root": root,
        "find": find,
        "cut_offsets": cut_offsets,
    }


def _offset_in_component(eid: str, t: Fraction, cuts: List[Fraction], component, g) -> bool:
    if t in cuts:
        return False  # cut points carry value 0 on both sides (continuity)
    find = component["find"]
    k = bisect.bisect_right(cuts, t)
    key = ("s", eid, k)
    if t == 0:
        key = ("v", g.edge(eid).u)
    elif t == g.length(eid):
        key = ("v", g.edge(eid).v)
    return find(key) == component["root"]


def random_function(rng, g: MetricGraph, value_bound: int = 4,
                    bump_prob: float = 0.4, max_denominator: int = 4,
                    poles_at_vertices: bool = False) -> RationalFunction:
    """Sample a random rational function, exactly continuous by construction.

    Integer values are drawn at the vertices and each edge is filled in
    with one or two integer-slope segments; the two-segment fill can place
    its kink at an arbitrary rational offset.  With ``poles_at_vertices``
    the interior kinks are always convex, so every pole lands on a vertex
    (used by the lattice-cycle property checks).  Optional tent bumps
    enrich the breakpoint structure.
    """
    values = {v: Fraction(rng.randint(-value_bound, value_bound)) for v in g.vertices}
    if not g.edges:
        return RationalFunction(g, {}, constant=values[g.vertices[0]])
    data = {}
    for e in g.edges:
        l = g.length(e.id)
        a = values[e.u]
        if isinstance(l, Infinite):
            data[e.id] = EdgePL(((Fraction(0), a),), 0)
            continue
        b = values[e.v]
        diff = b - a
        s = diff / l
        if s.denominator == 1:
            data[e.id] = EdgePL(((Fraction(0), a), (l, b)), None)
            continue
        s0 = Fraction(s.numerator // s.denominator)  # floor toward -inf
        m = diff - s0 * l  # in (0, l)
        if poles_at_vertices or rng.random() < 0.5:
            # convex: slope s0 then s0 + 1, kink order +1
            kink = l - m
            mid = a + s0 * kink
        else:
            # concave: slope s0 + 1 then s0, kink order -1
            kink = m
            mid = a + (s0 + 1) * kink
        data[e.id] = EdgePL(((Fraction(0), a), (kink, mid), (l, b)), None)
    f = RationalFunction(g, data)
    if not poles_at_vertices:
        for e in g.finite_edges():
            if rng.random() >= bump_prob:
                continue
            l = g.length(e.id)
            den = rng.randint(1, max_denominator)
            grid = [Fraction(k, den) for k in range(1, int(l * den))]
            if len(grid) < 2:
                continue
            x, y = sorted(rng.sample(grid, 2))
            k = rng.choice([1, -1]) * rng.randint(1, 2)
            apex = (x + y) / 2
            peak = k * (y - x) / 2
            bump = {eid: d for eid, d in RationalFunction.constant(g, 0)._edges.items()}
            bump[e.id] = EdgePL(((Fraction(0), Fraction(0)), (x, Fraction(0)),
                                 (apex, peak), (y, Fraction(0)), (l, Fraction(0))), None)
            f = f.add(RationalFunction(g, bump))
    return f
