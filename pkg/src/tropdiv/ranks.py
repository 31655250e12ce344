"""Rank computations: discrete lattice ranks, metric ranks via the scale
schedule, tropical-curve ranks via retraction, and linear equivalence.

The discrete rank of a Z-divisor is the largest k such that subtracting any
k lattice points leaves a winnable configuration.  It is computed by the
equivalent recursion  r(D) = 1 + min_P r(D - P)  (with r = -1 exactly on
non-winnable classes), memoized on q-reduced forms, which visits the same
information as the definitional multiset enumeration but shares work across
equivalent configurations.  The enumeration form survives as a test oracle.

The metric rank runs the discrete rank over the rescaling schedule
sigma * lcm(1..k) and takes the minimum, reporting stabilization when two
consecutive scales agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Dict, List, Optional, Sequence, Tuple

from .chipfiring import UnitGraph, _reduce_in_place, dhar_reduce
from .divisors import Divisor, DivisorError, is_z_divisor, retract_divisor
from .functions import EdgePL, RationalFunction
from .graphs import GraphPoint, MetricGraph
from .rationals import Infinite, denominator_lcm


class RankError(ValueError):
    pass


@dataclass
class RankReport:
    """A rank value plus the evidence trail.

    ``witness`` is an effective divisor E with R(D - E) empty, certifying
    rank < deg E; for rank -1 it is the zero divisor (the failure is D
    itself).  ``scales_tested`` lists the rescaling factors applied to the
    input graph, and ``stabilized`` records whether two consecutive scales
    agreed before the cap.
    """

    rank: int
    scales_tested: List[int]
    stabilized: bool
    witness: Optional[Divisor] = None


class _RankEngine:
    """Iterative-deepening rank search on a unit graph, with lower/upper
    bound memos keyed by q-reduced form (ranks are class functions).

    rank(D) >= k iff for every lattice point P, rank(D - P) >= k - 1, so the
    decision only ever explores k levels deep; the exact rank is found by
    deepening k until the decision fails.
    """

    __slots__ = ("unit", "q", "lo", "hi", "candidates", "_intern", "_children")

    def __init__(self, unit: UnitGraph, q: int = 0):
        self.unit = unit
        self.q = q
        self.lo: Dict[Tuple[int, ...], int] = {}
        self.hi: Dict[Tuple[int, ...], int] = {}
        self._intern: Dict[Tuple[int, ...], Tuple[int, ...]] = {}
        self._children: Dict[Tuple[int, ...], Tuple[Tuple[int, ...], ...]] = {}
        # Fail-fast order: deep interior chain points defeat a divisor more
        # often than the original branch vertices, so try them first.
        depth = []
        for i, name in enumerate(unit.names):
            depth.append((0, i) if ":" not in name else (1, i))
        interior = [i for flag, i in depth if flag]
        interior.reverse()
        vertices = [i for flag, i in depth if not flag]
        self.candidates = tuple(interior + vertices)

    def reduce(self, config: Sequence[int]) -> Tuple[int, ...]:
        red = tuple(dhar_reduce(self.unit, config, self.q))
        return self._intern.setdefault(red, red)

    def _child(self, red: Tuple[int, ...], p: int) -> Tuple[int, ...]:
        child = list(red)
        child[p] -= 1
        _reduce_in_place(self.unit, child, self.q, None)
        child_t = tuple(child)
        return self._intern.setdefault(child_t, child_t)

    def children_of(self, red: Tuple[int, ...]) -> Tuple[Tuple[int, ...], ...]:
        """Distinct reduced classes of red minus one lattice point, in
        fail-fast candidate order.  Points on bridge chains are pairwise
        equivalent, so deduplication shrinks the branching a lot there."""
        got = self._children.get(red)
        if got is None:
            seen = dict.fromkeys(self._child(red, p) for p in self.candidates)
            got = tuple(seen)
            self._children[red] = got
        return got

    def rank_ge(self, red: Tuple[int, ...], deg: int, k: int) -> bool:
        """Decide rank(red) >= k for a q-reduced configuration of degree deg."""
        if red[self.q] < 0:
            return k <= -1
        if k <= 0:
            return True
        if k > deg:
            return False
        lo = self.lo.get(red)
        if lo is not None and lo >= k:
            return True
        hi = self.hi.get(red)
        if hi is not None and hi < k:
            return False
        for child in self.children_of(red):
            if not self.rank_ge(child, deg - 1, k - 1):
                self.hi[red] = min(hi, k - 1) if hi is not None else k - 1
                return False
        self.lo[red] = k
        return True

    def rank(self, config: Sequence[int]) -> int:
        deg = sum(config)
        if deg < 0:
            return -1
        red = self.reduce(config)
        if red[self.q] < 0:
            return -1
        k = 0
        while k < deg and self.rank_ge(red, deg, k + 1):
            k += 1
        return k

    def witness_chain(self, config: Sequence[int]) -> List[int]:
        """Lattice point indices P_1..P_{r+1} with D - sum(P_i) not winnable."""
        deg = sum(config)
        if deg < 0:
            return []
        red = self.reduce(config)
        rank = self.rank(config)
        chain: List[int] = []
        k = rank + 1
        while red[self.q] >= 0:
            for p in self.candidates:
                child = self._child(red, p)
                if not self.rank_ge(child, deg - 1, k - 1):
                    chain.append(p)
                    red = child
                    deg -= 1
                    k -= 1
                    break
            else:  # pragma: no cover - a failing point always exists
                raise RankError("witness search failed")
        return chain


def _chips_of(sub, d: Divisor) -> List[int]:
    config = [0] * sub.n
    for p, a in d.items():
        config[sub.index_of(p)] += a
    return config


def discrete_rank(g: MetricGraph, d: Divisor) -> int:
    """The lattice rank of a Z-divisor on a finite Z-graph.

    Largest k such that every subtraction of k lattice points leaves a
    configuration equivalent to an effective one; -1 when D itself is not.
    Loops must have length at least 2 (rescale first).
    """
    rank, _ = discrete_rank_with_witness(g, d)
    return rank


def discrete_rank_with_witness(g: MetricGraph, d: Divisor) -> Tuple[int, List[GraphPoint]]:
    if g.has_infinite_edges():
        raise RankError("discrete rank requires a finite graph (retract ends first)")
    if not g.is_z_graph():
        raise RankError("discrete rank requires integer edge lengths")
    if not is_z_divisor(g, d):
        raise DivisorError("divisor is not supported on the lattice points")
    sub = g.unit_subdivide()
    unit = UnitGraph.from_subdivision(sub)
    engine = _RankEngine(unit)
    config = _chips_of(sub, d)
    rank = engine.rank(config)
    chain = engine.witness_chain(config)
    return rank, [sub.points[i] for i in chain]


def _clearing_scale(g: MetricGraph, divisors: Sequence[Divisor]) -> int:
    offsets = [l for l in (g.length(e.id) for e in g.edges)]
    for x in offsets:
        if isinstance(x, Infinite):
            raise RankError("metric rank requires finite edge lengths")
    values = list(offsets)
    for d in divisors:
        for p in d.support():
            if p.offset is not None:
                values.append(p.offset)
    sigma = denominator_lcm(values)
    for e in g.edges:
        if e.is_loop() and sigma * g.length(e.id) == 1:
            sigma *= 2
            break
    return sigma


def metric_rank(g: MetricGraph, d: Divisor, scale_cap: int = 4) -> RankReport:
    """Rank of a Q-divisor on a Q-graph via the rescaling schedule.

    Clears denominators, then computes the discrete rank at scales
    sigma * lcm(1..k) for k = 1..scale_cap.  The discrete rank upper-bounds
    the metric rank at every scale and agrees with it on all sufficiently
    divisible ones, so the minimum over the schedule is reported, with
    ``stabilized`` set once two consecutive scales agree.
    """
    if scale_cap < 1:
        raise RankError("scale cap must be at least 1")
    if g.has_infinite_edges():
        raise RankError("metric rank is for finite graphs; use tropical_rank")
    if d.host is not g:
        raise DivisorError("divisor does not live on the given graph")
    sigma = _clearing_scale(g, [d])
    scales: List[int] = []
    ranks: List[int] = []
    best: Optional[Tuple[int, List[GraphPoint], object]] = None
    stabilized = False
    for k in range(1, scale_cap + 1):
        factor = sigma * lcm(*range(1, k + 1))
        resc = g.rescale(factor)
        dk = d.transport(resc)
        rank_k, chain = discrete_rank_with_witness(resc.target, dk)
        scales.append(factor)
        ranks.append(rank_k)
        if best is None or rank_k < best[0]:
            best = (rank_k, chain, resc)
        if k >= 2 and ranks[-1] == ranks[-2]:
            stabilized = True
            break
    rank, chain, resc = best
    if rank == -1:
        witness = Divisor.zero(g)
    else:
        witness = Divisor.of(g, *[(1, resc.inverse_point(p)) for p in chain])
    return RankReport(rank=rank, scales_tested=scales, stabilized=stabilized,
                      witness=witness)


def tropical_rank(g: MetricGraph, d: Divisor, scale_cap: int = 4) -> RankReport:
    """Rank on a tropical curve: retract onto the finite core, then rank
    there.  Retraction moves the divisor by a principal divisor, so the
    rank is unchanged."""
    if not g.has_infinite_edges():
        return metric_rank(g, d, scale_cap)
    core, _ = g.retract_core()
    d_core, _ = retract_divisor(g, d)
    report = metric_rank(core, d_core.rehost(core), scale_cap)
    if report.witness is not None:
        report.witness = report.witness.rehost(g)
    return report


def _function_from_unit_values(g: MetricGraph, sigma: int, values_at, scale_back: bool) -> RationalFunction:
    """Interpolate integer values given on the sigma-lattice of g.

    ``values_at(edge_id, k)`` returns the value at offset k/sigma.  With
    ``scale_back`` the values are divided by sigma (transport from the
    rescaled graph back to g keeps slopes integral).
    """
    if not g.edges:
        v = Fraction(values_at(None, 0))
        return RationalFunction(g, {}, constant=v / sigma if scale_back else v)
    den = Fraction(sigma) if scale_back else Fraction(1)
    data = {}
    for e in g.edges:
        l = g.length(e.id)
        steps = int(l * sigma)
        bps = []
        for k in range(steps + 1):
            bps.append((Fraction(k, sigma), Fraction(values_at(e.id, k)) / den))
        data[e.id] = EdgePL(tuple(bps), None)
    return RationalFunction(g, data)


def _extend_constant_on_ends(g: MetricGraph, core_fn: RationalFunction) -> RationalFunction:
    """View a core function on the whole curve, constant on unbounded edges."""
    data = {}
    for e in g.finite_edges():
        data[e.id] = core_fn.edge_data(e.id)
    for e in g.infinite_edges():
        value = core_fn.vertex_value(e.u)
        data[e.id] = EdgePL(((Fraction(0), Fraction(value)),), 0)
    return RationalFunction(g, data)


def linear_equiv(g: MetricGraph, d1: Divisor, d2: Divisor):
    """Decide d1 ~ d2; on success also return f with d2 = d1 + (f).

    Divisors of different degree are never equivalent (principal divisors
    have degree zero).  Supports on unbounded edges are first retracted to
    the core; the core decision runs on the unit subdivision at the
    denominator-clearing scale, where equal q-reduced forms characterize
    equivalence.
    """
    if d1.host is not g or d2.host is not g:
        raise DivisorError("divisors must live on the given graph")
    if d1.degree() != d2.degree():
        return False, None
    if g.has_infinite_edges():
        core, _ = g.retract_core()
        d1c, f1 = retract_divisor(g, d1)
        d2c, f2 = retract_divisor(g, d2)
        ok, h_core = linear_equiv(core, d1c.rehost(core), d2c.rehost(core))
        if not ok:
            return False, None
        h = _extend_constant_on_ends(g, h_core)
        witness = f1.add(h).add(f2.negate())
        return True, witness

    sigma = _clearing_scale(g, [d1, d2])
    resc = g.rescale(sigma)
    sub = resc.target.unit_subdivide()
    unit = UnitGraph.from_subdivision(sub)
    diff = d1.transport(resc).subtract(d2.transport(resc))
    config = _chips_of(sub, diff)
    reduced, firing = dhar_reduce(unit, config, 0, with_firing=True)
    if any(reduced):
        return False, None

    def values_at(edge_id, k):
        if edge_id is None:
            return firing[0]
        p = resc.target.edge_point(edge_id, Fraction(k))
        return firing[sub.index_of(p)]

    witness = _function_from_unit_values(g, sigma, values_at, scale_back=True)
    return True, witness
