"""Chip-firing on loopless unit graphs: Dhar burning and q-reduction.

This is the discrete machinery behind the rank computations: divisors on a
unit-subdivided Z-graph become integer chip configurations on the vertices,
linear equivalence becomes chip-firing equivalence, and every class has a
unique q-reduced representative found by (multiplicity-accelerated) Dhar
burning.
"""

from __future__ import annotations

from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .graphs import Graph, Subdivision


class ChipFiringError(ValueError):
    pass


class UnitGraph:
    """Indexed loopless multigraph with unit edge lengths.

    ``adjacency[v]`` is a tuple of (neighbor, multiplicity) pairs; ``names``
    keeps human-readable ids for reporting.  The reduction base vertex q is
    index 0 by convention of the builders (lowest original vertex id).
    """

    __slots__ = ("n", "adjacency", "degree", "names")

    def __init__(self, n: int, adjacency: Sequence[Sequence[Tuple[int, int]]],
                 names: Optional[Sequence[str]] = None):
        self.n = n
        self.adjacency: Tuple[Tuple[Tuple[int, int], ...], ...] = tuple(
            tuple(adj) for adj in adjacency)
        for v, adj in enumerate(self.adjacency):
            for w, mult in adj:
                if w == v:
                    raise ChipFiringError("unit graph must be loopless")
                if mult <= 0:
                    raise ChipFiringError("edge multiplicities must be positive")
        self.degree: Tuple[int, ...] = tuple(
            sum(m for _, m in adj) for adj in self.adjacency)
        self.names: Tuple[str, ...] = tuple(names) if names else tuple(
            str(i) for i in range(n))

    @staticmethod
    def from_subdivision(sub: Subdivision) -> "UnitGraph":
        names = []
        for p in sub.points:
            names.append(p.vertex if p.vertex is not None else f"{p.edge}:{p.offset}")
        return UnitGraph(sub.n, sub.adjacency, names)

    @staticmethod
    def from_graph(graph: Graph) -> "UnitGraph":
        """Index a combinatorial loopless graph in vertex-id order."""
        order = {v: i for i, v in enumerate(graph.vertices)}
        counts: List[Dict[int, int]] = [dict() for _ in graph.vertices]
        for e in graph.edges:
            a, b = order[e.u], order[e.v]
            if a == b:
                raise ChipFiringError(f"loop {e.id!r} not allowed in a unit graph")
            counts[a][b] = counts[a].get(b, 0) + 1
            counts[b][a] = counts[b].get(a, 0) + 1
        adjacency = [sorted(c.items()) for c in counts]
        return UnitGraph(len(graph.vertices), adjacency, graph.vertices)

    def config_from_mapping(self, chips: Mapping[str, int]) -> List[int]:
        index = {name: i for i, name in enumerate(self.names)}
        config = [0] * self.n
        for name, a in chips.items():
            if name not in index:
                raise ChipFiringError(f"unknown vertex {name!r}")
            config[index[name]] = int(a)
        return config


def _burn(g: UnitGraph, config: Sequence[int], q: int):
    """Dhar's burning pass from q.

    Returns (unburnt, to_burnt) where ``unburnt`` is the list of vertices
    the fire never reached and ``to_burnt[v]`` counts edges from v into the
    burnt region; empty ``unburnt`` means the configuration is q-reduced
    (given nonnegativity off q).
    """
    n = g.n
    burnt = [False] * n
    burnt[q] = True
    count = [0] * n
    stack = [q]
    adjacency = g.adjacency
    while stack:
        v = stack.pop()
        for w, mult in adjacency[v]:
            if not burnt[w]:
                count[w] += mult
                if count[w] > config[w]:
                    burnt[w] = True
                    stack.append(w)
    unburnt = [v for v in range(n) if not burnt[v]]
    return unburnt, count


def dhar_reduce(g: UnitGraph, config: Sequence[int], q: int = 0,
                with_firing: bool = False):
    """The unique q-reduced configuration equivalent to ``config``.

    q-reduced means nonnegative off q and no nonempty subset avoiding q can
    fire without driving one of its members negative (checked by burning).
    With ``with_firing`` the total integer firing vector f is returned too,
    satisfying reduced = config - L f.
    """
    n = g.n
    if isinstance(config, Mapping):
        config = g.config_from_mapping(config)
    if isinstance(q, str):
        q = g.names.index(q)
    if not 0 <= q < n:
        raise ChipFiringError(f"base vertex {q} out of range")
    if len(config) != n:
        raise ChipFiringError("configuration length mismatch")
    c = list(config)
    firing = [0] * n if with_firing else None
    _reduce_in_place(g, c, q, firing)
    if with_firing:
        return c, firing
    return c


def _reduce_in_place(g: UnitGraph, c: List[int], q: int, firing: Optional[List[int]]):
    n = g.n
    adjacency = g.adjacency
    degree = g.degree

    # Phase 1: clear debts off q by borrowing (reverse firing).  This is an
    # anti-chip stabilization with sink q, so it terminates.
    stack = [v for v in range(n) if c[v] < 0 and v != q]
    while stack:
        v = stack.pop()
        if c[v] >= 0:
            continue
        m = (-c[v] + degree[v] - 1) // degree[v]
        c[v] += m * degree[v]
        if firing is not None:
            firing[v] -= m
        for w, mult in adjacency[v]:
            was = c[w]
            cw = was - m * mult
            c[w] = cw
            if cw < 0 <= was and w != q:
                stack.append(w)

    # Phase 2: superstabilize by repeated burning; fire each stalled set
    # with the largest multiplicity that keeps it legal.
    burnt = bytearray(n)
    count = [0] * n
    while True:
        for v in range(n):
            burnt[v] = 0
            count[v] = 0
        burnt[q] = 1
        bstack = [q]
        nburnt = 1
        while bstack:
            v = bstack.pop()
            for w, mult in adjacency[v]:
                if not burnt[w]:
                    cw = count[w] + mult
                    count[w] = cw
                    if cw > c[w]:
                        burnt[w] = 1
                        nburnt += 1
                        bstack.append(w)
        if nburnt == n:
            break
        m = -1
        for v in range(n):
            if not burnt[v]:
                b = count[v]
                if b > 0:
                    k = c[v] // b
                    if m < 0 or k < m:
                        m = k
        if m < 1:  # pragma: no cover - burning guarantees m >= 1
            raise ChipFiringError("burning stalled without a legal firing")
        for v in range(n):
            if not burnt[v]:
                c[v] -= m * count[v]
                if firing is not None:
                    firing[v] += m
            else:
                gained = 0
                for w, mult in adjacency[v]:
                    if not burnt[w]:
                        gained += mult
                if gained:
                    c[v] += m * gained


def is_q_reduced(g: UnitGraph, config: Sequence[int], q: int = 0) -> bool:
    if any(config[v] < 0 for v in range(g.n) if v != q):
        return False
    unburnt, _ = _burn(g, config, q)
    return not unburnt


def wins_effective(g: UnitGraph, config: Sequence[int], q: int = 0) -> bool:
    """True iff the configuration is chip-firing equivalent to an effective one.

    Decided by q-reduction: the reduced form is effective off q, so the
    class contains an effective divisor exactly when the reduced value at q
    is nonnegative.
    """
    if isinstance(q, str):
        q = g.names.index(q)
    return dhar_reduce(g, config, q)[q] >= 0


def laplacian_apply(g: UnitGraph, f: Sequence[int]) -> List[int]:
    """L f, with L = degree diagonal minus adjacency (multigraph counts)."""
    out = []
    for v in range(g.n):
        acc = g.degree[v] * f[v]
        for w, mult in g.adjacency[v]:
            acc -= mult * f[w]
        out.append(acc)
    return out
