"""Desk-scale enumeration of the cell structure of the function spaces.

For a divisor D of degree n on a finite metric graph, the configurations
(f, P_1..P_n) with (f) + D = P_1 + ... + P_n stratify into cells indexed by
discrete data: which edge or vertex each P_i occupies, and the integer
slope of f on each edge at its starting vertex.  Within a stratum the
remaining parameters are the edge offsets of the placed points plus one
additive constant, subject to exact linear compatibility (continuity around
cycles) and strict bounds (offsets interior to their edges).

The enumerator solves each stratum exactly over the rationals and reports
feasible cells with their dimensions.  Signatures are enumerated per
placement as an affine lattice of rank = genus (the vertex balance
equations determine tree-edge slopes from the non-tree ones), pruned by
interval propagation before exact feasibility runs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, factorial, floor
from typing import Dict, List, Optional, Sequence, Tuple

from .divisors import Divisor
from .functions import EdgePL, RationalFunction, slope_bound
from .graphs import GraphPoint, MetricGraph


class CellError(ValueError):
    pass


@dataclass(frozen=True)
class CellCaps:
    """Enumeration limits; the defaults fit the small fixtures."""

    max_edges: int = 4
    max_degree: int = 3
    slope_cap: Optional[int] = None  # None: the a-priori (N+p)^alpha bound
    max_signatures: int = 2_000_000


@dataclass(frozen=True)
class CellSignature:
    placement: Tuple[Tuple[str, str], ...]  # ("vertex", id) or ("edge", id), sorted
    slopes: Tuple[Tuple[str, int], ...]     # (edge id, slope at its u side)


@dataclass
class Cell:
    signature: CellSignature
    dimension: int
    orbit_size: int                       # labeled configurations folded here
    sample_offsets: Tuple[Fraction, ...]  # one interior choice for the edge-placed points
    feasible: bool = True


@dataclass
class CellReport:
    cells: List[Cell] = field(default_factory=list)
    truncated: bool = False

    def dims(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for c in self.cells:
            out[c.dimension] = out.get(c.dimension, 0) + 1
        return out


def max_cell_dimension(cells: Sequence[Cell]) -> int:
    """Largest feasible cell dimension; 0 when the space is empty."""
    dims = [c.dimension for c in cells if c.feasible]
    return max(dims) if dims else 0


# ------------------------------------------------------------------ core


def _spanning_tree(g: MetricGraph):
    """BFS tree: parent vertex/edge maps plus the non-tree edge list."""
    root = g.vertices[0]
    parent_edge: Dict[str, object] = {root: None}
    order = [root]
    used = set()
    frontier = [root]
    while frontier:
        nxt = []
        for v in frontier:
            for e in g.edges:
                if e.id in used or e.is_loop():
                    continue
                other = None
                if e.u == v and e.v not in parent_edge:
                    other = e.v
                elif e.v == v and e.u not in parent_edge:
                    other = e.u
                if other is not None:
                    used.add(e.id)
                    parent_edge[other] = e
                    order.append(other)
                    nxt.append(other)
        frontier = nxt
    non_tree = [e for e in g.edges if e.id not in used]
    return root, order, parent_edge, non_tree


def _tree_path(g, parent_edge, root, x):
    """Edges with direction signs along the tree path root -> x."""
    path = []
    v = x
    while v != root:
        e = parent_edge[v]
        if e.v == v:
            path.append((e, 1))   # traversed u -> v
            v = e.u
        else:
            path.append((e, -1))  # traversed v -> u
            v = e.v
    path.reverse()
    return path


def _cycle_of(g, parent_edge, root, e):
    """Fundamental cycle of a non-tree edge: e (u to v) plus the tree path
    from v back to u, with the common root prefix cancelled."""
    cycle = [(e, 1)]
    to_u = {ed.id for ed, _ in _tree_path(g, parent_edge, root, e.u)}
    to_v = {ed.id for ed, _ in _tree_path(g, parent_edge, root, e.v)}
    for ed, s in _tree_path(g, parent_edge, root, e.v):
        if ed.id not in to_u:
            cycle.append((ed, -s))
    for ed, s in _tree_path(g, parent_edge, root, e.u):
        if ed.id not in to_v:
            cycle.append((ed, s))
    return cycle


class _Affine:
    """Integer affine form c + sum coeff_j * lambda_j."""

    __slots__ = ("const", "coeffs")

    def __init__(self, const=0, coeffs=None):
        self.const = const
        self.coeffs = dict(coeffs or {})

    def add(self, other, sign=1):
        out = _Affine(self.const + sign * other.const, self.coeffs)
        for j, c in other.coeffs.items():
            out.coeffs[j] = out.coeffs.get(j, 0) + sign * c
        return out

    def shift(self, c):
        return _Affine(self.const + c, self.coeffs)

    def value(self, lam):
        return self.const + sum(c * lam[j] for j, c in self.coeffs.items())


def _solve_slopes(g, placement_counts_v, placed_edges, d_vertex, d_interior):
    """Express each edge's starting slope as an integer affine form in the
    non-tree-edge parameters, using the vertex balance equations."""
    root, order, parent_edge, non_tree = _spanning_tree(g)
    slopes: Dict[str, _Affine] = {}
    for j, e in enumerate(non_tree):
        slopes[e.id] = _Affine(0, {j: 1})

    def delta(eid):  # total interior jump along the edge, u -> v
        return placed_edges.get(eid, 0) - sum(a for _, a in d_interior.get(eid, ()))

    def b_value(w):
        total = placement_counts_v.get(w, 0) - d_vertex.get(w, 0)
        for e in g.edges:
            if e.v == w:  # loops enter once too: their s-terms cancel but
                total += delta(e.id)  # the interior jumps do not
        return total

    for w in reversed(order[1:]):
        eq = _Affine(-b_value(w))
        pe = parent_edge[w]
        coeff = None
        for e in g.edges:
            if e.is_loop():
                continue  # loops cancel in their vertex equation
            sign = (1 if e.u == w else 0) - (1 if e.v == w else 0)
            if sign == 0:
                continue
            if e.id == pe.id:
                coeff = sign
                continue
            if e.id in slopes:
                eq = eq.add(slopes[e.id], sign)
            else:
                raise CellError("tree elimination order broke")  # pragma: no cover
        # eq + coeff * s_pe = 0
        slopes[pe.id] = _Affine(-eq.const * coeff,
                                {j: -c * coeff for j, c in eq.coeffs.items()})
    return slopes, non_tree, root, parent_edge


def _gauss_solve(equations, nvars):
    """Exact elimination; returns (consistent, expressions, free_vars) where
    expressions[i] gives t_i as (const, {free_var: coeff})."""
    rows = [list(eq) for eq in equations]  # each: nvars coeffs + const with A t + c = 0
    pivots: Dict[int, List[Fraction]] = {}
    for row in rows:
        for _ in range(2):
            for col, prow in pivots.items():
                if row[col] != 0:
                    f = row[col] / prow[col]
                    for i in range(nvars + 1):
                        row[i] -= f * prow[i]
        col = next((i for i in range(nvars) if row[i] != 0), None)
        if col is None:
            if row[nvars] != 0:
                return False, None, None
            continue
        pivots[col] = row
    free = [i for i in range(nvars) if i not in pivots]
    exprs = []
    for i in range(nvars):
        if i in free:
            expr = (Fraction(0), {i: Fraction(1)})
        else:
            row = pivots[i]
            # i's coefficient row: t_i = -(const + sum free coeffs)/a
            a = row[i]
            const = -row[nvars] / a
            coeffs = {}
            for j in free:
                if row[j] != 0:
                    coeffs[j] = -row[j] / a
            expr = (const, coeffs)
        exprs.append(expr)
    return True, exprs, free


def _fourier_motzkin(strict_ineqs, free_vars):
    """Feasibility of strict inequalities  expr > 0  over the free vars;
    returns a satisfying assignment or None.  Tiny dimensions only."""
    if not free_vars:
        return {} if all(c > 0 for c, coeffs in strict_ineqs) else None
    var = free_vars[-1]
    rest = free_vars[:-1]
    lowers, uppers, others = [], [], []
    for c, coeffs in strict_ineqs:
        a = coeffs.get(var, Fraction(0))
        reduced = {k: v for k, v in coeffs.items() if k != var}
        if a == 0:
            others.append((c, reduced))
        elif a > 0:
            # var > -(c + rest)/a
            lowers.append((Fraction(-c) / a, {k: -v / a for k, v in reduced.items()}))
        else:
            uppers.append((Fraction(c) / (-a), {k: v / (-a) for k, v in reduced.items()}))
    for (lc, lco) in lowers:
        for (uc, uco) in uppers:
            coeffs = dict(uco)
            for k, v in lco.items():
                coeffs[k] = coeffs.get(k, Fraction(0)) - v
            others.append((uc - lc, coeffs))
    sol = _fourier_motzkin(others, rest)
    if sol is None:
        return None
    lo = max((c + sum(v * sol[k] for k, v in coeffs.items()) for c, coeffs in lowers),
             default=None)
    hi = min((c + sum(v * sol[k] for k, v in coeffs.items()) for c, coeffs in uppers),
             default=None)
    if lo is None and hi is None:
        sol[var] = Fraction(0)
    elif lo is None:
        sol[var] = hi - 1
    elif hi is None:
        sol[var] = lo + 1
    else:
        if lo >= hi:
            return None
        sol[var] = (lo + hi) / 2
    return sol


def enumerate_cells(g: MetricGraph, d: Divisor, caps: CellCaps = CellCaps()) -> CellReport:
    """All feasible cells of the configuration space of D, with dimensions.

    Cells are reported for the labeled space (before dividing by point
    permutations); ``orbit_size`` counts how many labeled placements fold
    onto the reported multiset.  Quotienting permutes coordinates only, so
    the dimensions also describe the quotient space.
    """
    if g.has_infinite_edges():
        raise CellError("cell enumeration handles finite graphs")
    if d.host is not g:
        raise CellError("divisor must live on the given graph")
    if len(g.edges) > caps.max_edges:
        raise CellError(f"graph exceeds the {caps.max_edges}-edge cap")
    n = d.degree()
    if n > caps.max_degree:
        raise CellError(f"degree exceeds the {caps.max_degree} cap")
    report = CellReport()
    if n < 0:
        return report

    d_vertex: Dict[str, int] = {}
    d_interior: Dict[str, List[Tuple[Fraction, int]]] = {}
    for p, a in d.items():
        if p.vertex is not None:
            d_vertex[p.vertex] = a
        else:
            d_interior.setdefault(p.edge, []).append((p.offset, a))
    for eid in d_interior:
        d_interior[eid].sort()

    pole_mult = sum(a for _, a in d.items() if a > 0)
    bound = caps.slope_cap if caps.slope_cap is not None else slope_bound(g, max(pole_mult, 1))

    slots = [("vertex", v) for v in sorted(g.vertices)] + \
            [("edge", e.id) for e in sorted(g.edges, key=lambda e: e.id)]
    lengths = {e.id: g.length(e.id) for e in g.edges}
    checked = 0

    for placement in itertools.combinations_with_replacement(slots, n):
        placed_v: Dict[str, int] = {}
        placed_e: Dict[str, int] = {}
        for kind, name in placement:
            if kind == "vertex":
                placed_v[name] = placed_v.get(name, 0) + 1
            else:
                placed_e[name] = placed_e.get(name, 0) + 1
        orbit = factorial(n)
        for c in placed_v.values():
            orbit //= factorial(c)
        for c in placed_e.values():
            orbit //= factorial(c)

        slopes, non_tree, root, parent_edge = _solve_slopes(
            g, placed_v, placed_e, d_vertex, d_interior)

        # offset variables, grouped per edge in placement order
        var_edge: List[str] = []
        for kind, name in placement:
            if kind == "edge":
                var_edge.append(name)
        nvars = len(var_edge)

        # cycle-closure equations: sum over the cycle of the value change,
        # where the change along e (u->v) is s_e*l + sum_jumps k*(l - pos)
        cycles = [_cycle_of(g, parent_edge, root, e) for e in non_tree]

        def closure(cycle, lam):
            """(constant, t-coefficients) of the cycle equation at lambda."""
            const = Fraction(0)
            coeffs = [Fraction(0)] * nvars
            for e, sign in cycle:
                l = lengths[e.id]
                s_e = slopes[e.id].value(lam)
                const += sign * s_e * l
                for pos, a in d_interior.get(e.id, ()):
                    const += sign * (-a) * (l - pos)
                for i, eid in enumerate(var_edge):
                    if eid == e.id:
                        const += sign * l
                        coeffs[i] -= sign
            return const, coeffs

        # interval propagation on the lambda box before enumeration; each
        # form constrains  coeffs . lam  to the interval [lo, hi]
        nlam = len(non_tree)
        lam_lo = [-bound] * nlam
        lam_hi = [bound] * nlam
        forms = []
        for e in g.edges:
            a = slopes[e.id]  # slope within [-B, B]
            forms.append((a.coeffs, Fraction(-bound - a.const), Fraction(bound - a.const)))
        for cycle in cycles:
            const = Fraction(0)
            coeffs: Dict[int, Fraction] = {}
            slack_lo = Fraction(0)
            slack_hi = Fraction(0)
            for e, sign in cycle:
                l = lengths[e.id]
                a = slopes[e.id]
                const += sign * a.const * l
                for j, cc in a.coeffs.items():
                    coeffs[j] = coeffs.get(j, Fraction(0)) + sign * cc * l
                for pos, aa in d_interior.get(e.id, ()):
                    const += sign * (-aa) * (l - pos)
                m_e = placed_e.get(e.id, 0)
                if m_e:
                    if sign > 0:
                        slack_hi += m_e * l
                    else:
                        slack_lo -= m_e * l
            # const + coeffs . lam + slack = 0 with slack in [slack_lo, slack_hi]
            forms.append((coeffs, -const - slack_hi, -const - slack_lo))
        infeasible_box = False
        changed = True
        rounds = 0
        while changed and rounds < 16 and not infeasible_box:
            changed = False
            rounds += 1
            for coeffs, tlo, thi in forms:
                for j, cj in coeffs.items():
                    if cj == 0:
                        continue
                    rest_lo, rest_hi = Fraction(0), Fraction(0)
                    for k, ck in coeffs.items():
                        if k == j or ck == 0:
                            continue
                        a, b = ck * lam_lo[k], ck * lam_hi[k]
                        rest_lo += min(a, b)
                        rest_hi += max(a, b)
                    lo_b = (tlo - rest_hi) / cj
                    hi_b = (thi - rest_lo) / cj
                    if cj < 0:
                        lo_b, hi_b = hi_b, lo_b
                    new_lo = max(lam_lo[j], ceil(lo_b))
                    new_hi = min(lam_hi[j], floor(hi_b))
                    if new_lo > lam_lo[j] or new_hi < lam_hi[j]:
                        lam_lo[j], lam_hi[j] = new_lo, new_hi
                        changed = True
                    if new_lo > new_hi:
                        infeasible_box = True
                        break
                if infeasible_box:
                    break
        if infeasible_box:
            continue

        for lam in itertools.product(*[range(lam_lo[j], lam_hi[j] + 1)
                                       for j in range(nlam)]):
            checked += 1
            if checked > caps.max_signatures:
                report.truncated = True
                return report
            svals = {e.id: slopes[e.id].value(lam) for e in g.edges}
            if any(abs(s) > bound for s in svals.values()):
                continue
            equations = []
            feasible_interval = True
            for cycle in cycles:
                const, coeffs = closure(cycle, lam)
                lo = const + sum(min(c * Fraction(0), c * lengths[var_edge[i]])
                                 for i, c in enumerate(coeffs))
                hi = const + sum(max(c * Fraction(0), c * lengths[var_edge[i]])
                                 for i, c in enumerate(coeffs))
                if not (lo <= 0 <= hi):
                    feasible_interval = False
                    break
                equations.append(coeffs + [const])
            if not feasible_interval:
                continue
            ok, exprs, free = _gauss_solve(equations, nvars)
            if not ok:
                continue
            # strict box constraints 0 < t_i < l_i as expr > 0 pairs
            ineqs = []
            for i in range(nvars):
                const, coeffs = exprs[i]
                ineqs.append((const, dict(coeffs)))                      # t_i > 0
                neg = {k: -v for k, v in coeffs.items()}
                ineqs.append((lengths[var_edge[i]] - const, neg))        # t_i < l
            sol = _fourier_motzkin(ineqs, list(free))
            if sol is None:
                continue
            sample = []
            for i in range(nvars):
                const, coeffs = exprs[i]
                sample.append(const + sum(v * sol[k] for k, v in coeffs.items()))
            signature = CellSignature(
                placement=tuple(placement),
                slopes=tuple(sorted((eid, int(s)) for eid, s in svals.items())))
            report.cells.append(Cell(signature=signature,
                                     dimension=len(free) + 1,
                                     orbit_size=orbit,
                                     sample_offsets=tuple(sample)))
    return report


def reconstruct_function(g: MetricGraph, d: Divisor, cell: Cell,
                         offsets: Optional[Sequence[Fraction]] = None):
    """Rebuild (f, placed points) from a cell's signature and a parameter
    choice (the cell's own sample by default, additive constant 0).

    The reconstruction integrates the starting slopes across each edge,
    jumping by +1 at each placed point and by -coeff at the fixed interior
    points of D; cycle closure holds because the cell was feasible.
    """
    svals = dict(cell.signature.slopes)
    offsets = list(offsets if offsets is not None else cell.sample_offsets)
    d_interior: Dict[str, List[Tuple[Fraction, int]]] = {}
    for p, a in d.items():
        if p.vertex is None:
            d_interior.setdefault(p.edge, []).append((p.offset, -a))
    placed_pts: List[GraphPoint] = []
    jumps: Dict[str, List[Tuple[Fraction, int]]] = {eid: list(v) for eid, v in d_interior.items()}
    it = iter(offsets)
    for kind, name in cell.signature.placement:
        if kind == "vertex":
            placed_pts.append(g.vertex_point(name))
        else:
            t = Fraction(next(it))
            placed_pts.append(g.edge_point(name, t))
            jumps.setdefault(name, []).append((t, 1))

    def edge_profile(eid, start_value):
        l = g.length(eid)
        events = sorted(jumps.get(eid, []))
        bps = [(Fraction(0), start_value)]
        slope = svals[eid]
        pos, val = Fraction(0), start_value
        i = 0
        while i < len(events):
            t = events[i]
            k = 0
            j = i
            while j < len(events) and events[j][0] == events[i][0]:
                k += events[j][1]
                j += 1
            tpos = events[i][0]
            val = val + slope * (tpos - pos)
            if 0 < tpos < l:
                bps.append((tpos, val))
            slope += k
            pos = tpos
            i = j
        val = val + slope * (l - pos)
        bps.append((l, val))
        return bps, val

    root, order, parent_edge, non_tree = _spanning_tree(g)
    values = {root: Fraction(0)}
    data: Dict[str, EdgePL] = {}
    for w in order[1:]:
        e = parent_edge[w]
        if e.u in values:
            bps, endval = edge_profile(e.id, values[e.u])
            values[e.v] = endval
        else:
            # integrate backwards from the v side
            bps, endval = edge_profile(e.id, Fraction(0))
            shift = values[e.v] - endval
            bps = [(t, v + shift) for t, v in bps]
            values[e.u] = bps[0][1]
        data[e.id] = EdgePL(tuple(bps), None)
    for e in non_tree:
        bps, _ = edge_profile(e.id, values[e.u])
        data[e.id] = EdgePL(tuple(bps), None)
    f = RationalFunction(g, data)
    return f, placed_pts
