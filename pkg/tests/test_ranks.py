import itertools
import random
from fractions import Fraction

import pytest

from tropdiv import (Divisor, DivisorError, MetricGraph, RankError, UnitGraph,
                     canonical_divisor, discrete_rank, linear_equiv, metric_rank,
                     random_function, tropical_rank, wins_effective)
from tropdiv.chipfiring import dhar_reduce
from conftest import make_path


def naive_discrete_rank(g, d):
    """The definitional algorithm: enumerate all multisets of lattice
    points of each size and test winnability of every subtraction."""
    sub = g.unit_subdivide()
    unit = UnitGraph.from_subdivision(sub)
    config = [0] * sub.n
    for p, a in d.items():
        config[sub.index_of(p)] += a
    deg = sum(config)
    if deg < 0 or not wins_effective(unit, config, 0):
        return -1
    for k in range(1, deg + 2):
        for combo in itertools.combinations_with_replacement(range(sub.n), k):
            trial = list(config)
            for v in combo:
                trial[v] -= 1
            if not wins_effective(unit, trial, 0):
                return k - 1
    return deg  # pragma: no cover - k = deg + 1 always fails


def test_discrete_rank_matches_naive_oracle():
    rng = random.Random(42)
    graphs = [
        make_path([2, 3]),
        MetricGraph(["A", "B", "C"],
                    [("ab", "A", "B"), ("bc", "B", "C"), ("ca", "C", "A")],
                    {"ab": 2, "bc": 2, "ca": 2}),
        MetricGraph(["P"], [("c", "P", "P")], {"c": Fraction(3)}),
        MetricGraph(["P", "Q"],
                    [("c1", "P", "P"), ("e", "P", "Q"), ("c2", "Q", "Q")],
                    {"c1": 2, "e": 2, "c2": 2}),
    ]
    for g in graphs:
        zpts = g.z_points()
        for _ in range(6):
            terms = [(rng.randint(-1, 2), p) for p in rng.sample(zpts, min(3, len(zpts)))]
            d = Divisor.of(g, *terms)
            if d.degree() > 4:
                continue
            assert discrete_rank(g, d) == naive_discrete_rank(g, d)


def test_discrete_rank_negative_degree(triangle):
    d = Divisor.of(triangle, (-1, triangle.vertex_point("A")))
    assert discrete_rank(triangle, d) == -1


def test_discrete_rank_two_a_on_triangle(triangle):
    d = Divisor.of(triangle, (2, triangle.vertex_point("A")))
    assert discrete_rank(triangle, d) == 1


def test_discrete_rank_tree_degree_one(segment):
    d = Divisor.of(segment, (1, segment.vertex_point("A")))
    assert discrete_rank(segment, d) == 1


def test_discrete_rank_requires_lattice_divisor(triangle):
    d = Divisor.of(triangle, (1, triangle.edge_point("ab", Fraction(1, 2))))
    with pytest.raises(DivisorError):
        discrete_rank(triangle, d)


def test_discrete_riemann_roch_exhaustive():
    """Baker-Norine identity on Z-graphs with all lengths > 1, checked for
    randomized divisors: r(D) - r(K - D) = deg D + 1 - g exactly."""
    rng = random.Random(7)
    graphs = [
        make_path([2, 2]),
        MetricGraph(["P"], [("c", "P", "P")], {"c": Fraction(2)}),
        MetricGraph(["A", "B"], [("a", "A", "B"), ("b", "A", "B")],
                    {"a": 2, "b": 3}),
        MetricGraph(["P", "Q"],
                    [("c1", "P", "P"), ("e", "P", "Q"), ("c2", "Q", "Q")],
                    {"c1": 2, "e": 2, "c2": 2}),
        MetricGraph(["A", "B", "C"],
                    [("ab", "A", "B"), ("bc", "B", "C"), ("ca", "C", "A"),
                     ("ab2", "A", "B")],
                    {"ab": 2, "bc": 3, "ca": 2, "ab2": 2}),
    ]
    for g in graphs:
        k = canonical_divisor(g)
        genus = g.genus()
        zpts = g.z_points()
        for _ in range(8):
            terms = [(rng.randint(-2, 2), p) for p in rng.sample(zpts, min(3, len(zpts)))]
            d = Divisor.of(g, *terms)
            if d.degree() > 5 or d.degree() < -4:
                continue
            lhs = discrete_rank(g, d) - discrete_rank(g, k - d)
            assert lhs == d.degree() + 1 - genus


def test_metric_rank_dumbbell_canonical(dumbbell):
    k = canonical_divisor(dumbbell)
    report = metric_rank(dumbbell, k)
    assert report.rank == 1
    assert report.stabilized
    # the witness certifies rank < 2 exactly
    assert report.witness.degree() == 2
    assert report.witness.is_effective()


def test_metric_rank_dumbbell_interior_pair(dumbbell):
    d = Divisor.of(dumbbell,
                   (1, dumbbell.edge_point("c1", Fraction(1, 2))),
                   (1, dumbbell.edge_point("c2", Fraction(1, 2))))
    report = metric_rank(dumbbell, d)
    assert report.rank == 0


def test_metric_rank_zero_divisor(dumbbell, segment, triangle):
    for g in (dumbbell, segment, triangle):
        report = metric_rank(g, Divisor.zero(g))
        assert report.rank == 0


def test_metric_rank_negative_degree(dumbbell):
    d = Divisor.of(dumbbell, (-2, dumbbell.vertex_point("P")))
    report = metric_rank(dumbbell, d)
    assert report.rank == -1
    assert report.witness.is_zero()


def test_metric_rank_scale_schedule(dumbbell):
    k = canonical_divisor(dumbbell)
    report = metric_rank(dumbbell, k)
    # unit loops force the doubling, then lcm(1..2) stabilizes
    assert report.scales_tested == [2, 4]


def test_metric_rank_witness_fails(dumbbell):
    k = canonical_divisor(dumbbell)
    report = metric_rank(dumbbell, k)
    # the witness E satisfies R(K - E) = empty set: check via a fresh
    # metric rank computation of K - E
    failing = metric_rank(dumbbell, k - report.witness)
    assert failing.rank == -1


def test_metric_rank_equivalence_invariance(dumbbell):
    rng = random.Random(123)
    pts = [dumbbell.vertex_point("P"), dumbbell.edge_point("e", Fraction(1, 2)),
           dumbbell.edge_point("c1", Fraction(1, 4))]
    for _ in range(6):
        d = Divisor.of(dumbbell, *[(rng.randint(-1, 2), p) for p in pts])
        f = random_function(rng, dumbbell, bump_prob=0.3)
        d2 = d + f.principal_divisor()
        assert metric_rank(dumbbell, d).rank == metric_rank(dumbbell, d2).rank


def test_metric_rank_rescaling_invariance(dumbbell):
    k = canonical_divisor(dumbbell)
    base = metric_rank(dumbbell, k).rank
    for lam in (2, 3, Fraction(1, 2)):
        resc = dumbbell.rescale(lam)
        assert metric_rank(resc.target, k.transport(resc)).rank == base


def test_rank_monotonicity(dumbbell):
    k = canonical_divisor(dumbbell)
    r = metric_rank(dumbbell, k).rank
    for p in (dumbbell.vertex_point("P"), dumbbell.edge_point("e", Fraction(1, 3)),
              dumbbell.edge_point("c1", Fraction(1, 2))):
        r2 = metric_rank(dumbbell, k.subtract_point(p)).rank
        assert r - 1 <= r2 <= r


def test_rank_upper_bound(dumbbell):
    rng = random.Random(9)
    pts = [dumbbell.vertex_point("P"), dumbbell.vertex_point("Q"),
           dumbbell.edge_point("c2", Fraction(3, 4))]
    for _ in range(8):
        d = Divisor.of(dumbbell, *[(rng.randint(-1, 2), p) for p in pts])
        r = metric_rank(dumbbell, d).rank
        assert -1 <= r <= max(-1, d.degree())


def test_discrete_rank_never_below_metric(dumbbell):
    # one-sided bound: the discrete rank at each schedule scale is an upper
    # bound for the reported metric rank
    k = canonical_divisor(dumbbell)
    report = metric_rank(dumbbell, k)
    for factor in report.scales_tested:
        resc = dumbbell.rescale(factor)
        assert discrete_rank(resc.target, k.transport(resc)) >= report.rank


def test_linear_equiv_reflexive(dumbbell):
    d = canonical_divisor(dumbbell)
    ok, f = linear_equiv(dumbbell, d, d)
    assert ok
    assert f.principal_divisor().is_zero()


def test_linear_equiv_triangle_vertices(triangle):
    a = Divisor.of(triangle, (1, triangle.vertex_point("A")))
    b = Divisor.of(triangle, (1, triangle.vertex_point("B")))
    ok, _ = linear_equiv(triangle, a, b)
    assert not ok


def test_linear_equiv_different_degrees(triangle):
    a = Divisor.of(triangle, (1, triangle.vertex_point("A")))
    ok, f = linear_equiv(triangle, a, Divisor.zero(triangle))
    assert not ok and f is None


def test_linear_equiv_tree_points(segment):
    a = Divisor.of(segment, (1, segment.vertex_point("A")))
    b = Divisor.of(segment, (1, segment.vertex_point("B")))
    ok, f = linear_equiv(segment, a, b)
    assert ok
    assert a + f.principal_divisor() == b


def test_linear_equiv_witness_exact(dumbbell):
    rng = random.Random(31)
    for _ in range(5):
        d = Divisor.of(dumbbell, (1, dumbbell.vertex_point("P")),
                       (rng.randint(0, 2), dumbbell.edge_point("c1", Fraction(1, 2))))
        f = random_function(rng, dumbbell, bump_prob=0.3)
        d2 = d + f.principal_divisor()
        ok, w = linear_equiv(dumbbell, d, d2)
        assert ok
        assert d + w.principal_divisor() == d2


def test_linear_equiv_q_choice_independent(triangle):
    # the verdict must not depend on the reduction base: check both via
    # reduced forms at two bases
    sub = triangle.rescale(2).target.unit_subdivide()
    unit = UnitGraph.from_subdivision(sub)
    rng = random.Random(2)
    for _ in range(20):
        c1 = [rng.randint(-2, 2) for _ in range(unit.n)]
        c2 = list(c1)
        shift = rng.sample(range(unit.n), 2)
        c2[shift[0]] += 1
        c2[shift[1]] -= 1
        for q in (0, unit.n - 1):
            same_q = dhar_reduce(unit, c1, q) == dhar_reduce(unit, c2, q)
            if q == 0:
                verdict = same_q
            else:
                assert verdict == same_q


def test_linear_equiv_canonical_retraction(loop_with_end):
    g = loop_with_end
    k_curve = canonical_divisor(g)
    core, _ = g.retract_core()
    k_core = canonical_divisor(core).rehost(g)
    ok, f = linear_equiv(g, k_curve, k_core)
    assert ok
    assert k_curve + f.principal_divisor() == k_core


def test_tropical_rank_no_ends_same_as_metric(dumbbell):
    k = canonical_divisor(dumbbell)
    assert tropical_rank(dumbbell, k).rank == metric_rank(dumbbell, k).rank


def test_tropical_rank_end_point(loop_with_end):
    g = loop_with_end
    d = Divisor.of(g, (1, g.end_point("u")))
    report = tropical_rank(g, d)
    assert report.rank == 0  # degree 1 on genus 1


def test_tropical_rank_star(star_of_ends):
    g = star_of_ends
    d = Divisor.of(g, (1, g.end_point("u1")))
    report = tropical_rank(g, d)
    assert report.rank == 1  # tree case: rank = degree


def test_metric_rank_rejects_infinite_edges(loop_with_end):
    with pytest.raises(RankError):
        metric_rank(loop_with_end, Divisor.zero(loop_with_end))


def test_closed_form_trees():
    rng = random.Random(18)
    for _ in range(10):
        lengths = [Fraction(rng.randint(1, 4), rng.choice([1, 2])) for _ in range(3)]
        g = make_path(lengths)
        pts = [g.vertex_point(v) for v in g.vertices]
        d = Divisor.of(g, *[(rng.randint(0, 2), rng.choice(pts)) for _ in range(2)])
        assert metric_rank(g, d).rank == d.degree()


def test_closed_form_unit_cycle():
    g = MetricGraph(["v"], [("c", "v", "v")], {"c": Fraction(1)})
    v = g.vertex_point("v")
    for n in range(1, 4):
        d = Divisor.of(g, (n, v))
        assert metric_rank(g, d).rank == n - 1
