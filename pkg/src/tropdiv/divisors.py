"""Divisors: finite integer combinations of points of a metric graph."""

from __future__ import annotations

from typing import Dict, List, Tuple

from .graphs import GraphPoint, MetricGraph


class DivisorError(ValueError):
    pass


class Divisor:
    """An element of the free abelian group on the points of a host graph.

    Stored as a mapping from canonical GraphPoint to a nonzero integer
    coefficient; arithmetic is pointwise and never leaves zero entries
    behind, so ``support`` is exactly the nonzero locus.
    """

    __slots__ = ("host", "_coeff")

    def __init__(self, host: MetricGraph, coefficients: Dict[GraphPoint, int] = None):
        self.host = host
        self._coeff: Dict[GraphPoint, int] = {}
        for p, a in (coefficients or {}).items():
            a = int(a)
            if a == 0:
                continue
            if not host.contains_point(p):
                raise DivisorError(f"point {p!r} is not on the host graph")
            self._coeff[p] = a

    @staticmethod
    def zero(host: MetricGraph) -> "Divisor":
        return Divisor(host, {})

    @staticmethod
    def of(host: MetricGraph, *terms: Tuple[int, GraphPoint]) -> "Divisor":
        """Build from (coefficient, point) pairs, summing repeats."""
        acc: Dict[GraphPoint, int] = {}
        for a, p in terms:
            acc[p] = acc.get(p, 0) + int(a)
        return Divisor(host, acc)

    def coefficient(self, p: GraphPoint) -> int:
        return self._coeff.get(p, 0)

    def items(self) -> List[Tuple[GraphPoint, int]]:
        return sorted(self._coeff.items(), key=lambda kv: kv[0].sort_key())

    def support(self) -> List[GraphPoint]:
        return sorted(self._coeff.keys(), key=lambda p: p.sort_key())

    def degree(self) -> int:
        return sum(self._coeff.values())

    def is_zero(self) -> bool:
        return not self._coeff

    def is_effective(self) -> bool:
        return all(a >= 0 for a in self._coeff.values())

    def _require_same_host(self, other: "Divisor"):
        if self.host is not other.host:
            raise DivisorError("divisors live on different host graphs")

    def add(self, other: "Divisor") -> "Divisor":
        self._require_same_host(other)
        acc = dict(self._coeff)
        for p, a in other._coeff.items():
            acc[p] = acc.get(p, 0) + a
        return Divisor(self.host, acc)

    def negate(self) -> "Divisor":
        return Divisor(self.host, {p: -a for p, a in self._coeff.items()})

    def subtract(self, other: "Divisor") -> "Divisor":
        return self.add(other.negate())

    def scale(self, k: int) -> "Divisor":
        return Divisor(self.host, {p: k * a for p, a in self._coeff.items()})

    def subtract_point(self, p: GraphPoint, times: int = 1) -> "Divisor":
        acc = dict(self._coeff)
        acc[p] = acc.get(p, 0) - times
        return Divisor(self.host, acc)

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        return self.subtract(other)

    def __neg__(self):
        return self.negate()

    def __eq__(self, other) -> bool:
        return (isinstance(other, Divisor) and self.host is other.host
                and self._coeff == other._coeff)

    def __hash__(self):
        return hash(frozenset(self._coeff.items()))

    def __repr__(self) -> str:
        if not self._coeff:
            return "Div(0)"
        parts = [f"{a}*{p!r}" for p, a in self.items()]
        return "Div(" + " + ".join(parts) + ")"

    def rehost(self, new_host: MetricGraph) -> "Divisor":
        """Interpret this divisor on another graph with the same ids.

        Used to move a core-supported divisor between a curve and its
        retracted core, or between a graph and its rescaling source.
        """
        acc = {}
        for p, a in self._coeff.items():
            if p.vertex is not None:
                acc[new_host.vertex_point(p.vertex)] = a
            else:
                acc[new_host.edge_point(p.edge, p.offset)] = a
        return Divisor(new_host, acc)

    def transport(self, rescaling) -> "Divisor":
        """Move the divisor along a Rescaling (positions scale linearly)."""
        return Divisor(rescaling.target,
                       {rescaling.point(p): a for p, a in self._coeff.items()})


def canonical_divisor(g: MetricGraph) -> Divisor:
    """K = sum over vertices of (valence - 2) * vertex.

    Unbounded ends are valence-1 vertices, so each contributes -1; on a
    curve with ends this is what makes K equivalent to the core canonical.
    """
    coeffs = {}
    for v in g.vertices:
        a = g.valence(v) - 2
        if a != 0:
            coeffs[g.vertex_point(v)] = a
    return Divisor(g, coeffs)


def is_z_divisor(g: MetricGraph, d: Divisor) -> bool:
    """Support contained in the Z-points of a Z-graph."""
    if not g.is_z_graph():
        raise DivisorError("Z-divisor test requires a Z-graph")
    return all(g.is_z_point(p) for p in d.support())


def is_q_divisor(g: MetricGraph, d: Divisor) -> bool:
    """Support contained in the Q-points (always true for exact inputs)."""
    for l in (g.length(e.id) for e in g.finite_edges()):
        if l.denominator < 1:  # pragma: no cover - Fractions guarantee this
            return False
    return all(p.vertex is not None or p.offset is not None for p in d.support())


def retract_divisor(g: MetricGraph, d: Divisor):
    """Push a divisor off the unbounded edges onto the finite core.

    Returns (d_core, f) where f is a sum of end ramps with d_core = d + (f),
    supp d_core inside the core, the degree unchanged, and effectivity
    preserved.  Points on an infinite edge (including the end itself) slide
    to the attachment vertex.
    """
    from .functions import RationalFunction, end_ramp

    core_ok = not g.has_infinite_edges()
    f = RationalFunction.constant(g, 0)
    if core_ok:
        return d, f
    ends = {e.id for e in g.infinite_edges()}
    moved: Dict[GraphPoint, int] = {}
    for p, a in d.items():
        on_infinite = (p.edge in ends if p.edge is not None
                       else g.is_end(p.vertex))
        if not on_infinite:
            moved[p] = moved.get(p, 0) + a
            continue
        ramp = end_ramp(g, p)
        f = f.add(ramp.scale(a))
        if p.edge is not None:
            q = g.vertex_point(g.edge(p.edge).u)
        else:
            eid = next(e.id for e in g.infinite_edges() if e.v == p.vertex)
            q = g.vertex_point(g.edge(eid).u)
        moved[q] = moved.get(q, 0) + a
    return Divisor(g, moved), f
