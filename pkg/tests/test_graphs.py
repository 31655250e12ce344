from fractions import Fraction

import pytest

from tropdiv import GraphError, MetricGraph
from tropdiv.rationals import INF

from conftest import make_path


def test_genus_dumbbell(dumbbell):
    assert dumbbell.genus() == 2


def test_genus_segment(segment):
    assert segment.genus() == 0


def test_genus_unit_loop(unit_loop):
    assert unit_loop.genus() == 1


def test_genus_with_ends(loop_with_end, star_of_ends):
    # infinite edges never create cycles
    assert loop_with_end.genus() == 1
    assert star_of_ends.genus() == 0


def test_valence(dumbbell, unit_loop):
    assert dumbbell.valence("P") == 3
    assert dumbbell.valence("Q") == 3
    assert unit_loop.valence("v") == 2


def test_valence_isolated_vertex():
    g = MetricGraph(["v"], [], {})
    assert g.valence("v") == 0
    assert g.genus() == 0


def test_valence_path_middle():
    g = make_path([1, 1])
    assert g.valence("v1") == 2


def test_valence_unknown_vertex(dumbbell):
    with pytest.raises(GraphError):
        dumbbell.valence("nope")


def test_disconnected_rejected():
    with pytest.raises(GraphError):
        MetricGraph(["a", "b"], [], {})


def test_nonpositive_length_rejected():
    with pytest.raises(GraphError):
        MetricGraph(["a", "b"], [("e", "a", "b")], {"e": Fraction(0)})


def test_infinite_edge_needs_valence_one_end():
    with pytest.raises(GraphError):
        # both endpoints have valence 2: no end
        MetricGraph(["a", "b"],
                    [("e", "a", "b"), ("f", "a", "b")],
                    {"e": INF, "f": Fraction(1)})


def test_infinite_edge_orientation_normalized():
    # listed with the end first; MetricGraph flips it so u = attachment
    g = MetricGraph(["w", "a", "b"],
                    [("u", "w", "a"), ("e", "a", "b")],
                    {"u": INF, "e": Fraction(1)})
    assert g.edge("u").u == "a"
    assert g.end_vertex("u") == "w"


def test_distance_identity(dumbbell):
    p = dumbbell.edge_point("e", Fraction(1, 3))
    assert dumbbell.distance(p, p) == 0


def test_distance_parallel_oracle(parallel):
    # brute-force over the two routes: direct 3 vs 5
    x, y = parallel.vertex_point("X"), parallel.vertex_point("Y")
    assert parallel.distance(x, y) == 3
    # midpoint of the long edge: 5/2 both ways around
    m = parallel.edge_point("b", Fraction(5, 2))
    assert parallel.distance(x, m) == Fraction(5, 2)
    # point near Y on the long edge: shortcut through Y
    p = parallel.edge_point("b", Fraction(9, 2))
    assert parallel.distance(x, p) == Fraction(7, 2)


def test_distance_loop_midpoint(unit_loop):
    v = unit_loop.vertex_point("v")
    m = unit_loop.edge_point("c", Fraction(1, 2))
    assert unit_loop.distance(v, m) == Fraction(1, 2)


def test_distance_same_loop_two_ways(unit_loop):
    a = unit_loop.edge_point("c", Fraction(1, 8))
    b = unit_loop.edge_point("c", Fraction(7, 8))
    # around through the vertex is shorter than across
    assert unit_loop.distance(a, b) == Fraction(1, 4)


def test_distance_to_end_infinite(loop_with_end):
    q = loop_with_end.vertex_point("Q")
    w = loop_with_end.end_point("u")
    assert loop_with_end.distance(q, w) == INF
    assert loop_with_end.distance(w, w) == 0
    p = loop_with_end.edge_point("u", Fraction(5))
    assert loop_with_end.distance(q, p) == 5
    assert loop_with_end.distance(p, w) == INF


def test_distance_metric_axioms(dumbbell):
    pts = [
        dumbbell.vertex_point("P"),
        dumbbell.vertex_point("Q"),
        dumbbell.edge_point("c1", Fraction(1, 4)),
        dumbbell.edge_point("c1", Fraction(3, 4)),
        dumbbell.edge_point("e", Fraction(1, 2)),
        dumbbell.edge_point("c2", Fraction(1, 3)),
    ]
    for p in pts:
        for q in pts:
            d = dumbbell.distance(p, q)
            assert d == dumbbell.distance(q, p)
            assert (d == 0) == (p == q)
            for r in pts:
                assert dumbbell.distance(p, r) <= d + dumbbell.distance(q, r)


def test_point_canonicalization(segment):
    assert segment.edge_point("e", 0) == segment.vertex_point("A")
    assert segment.edge_point("e", 1) == segment.vertex_point("B")
    with pytest.raises(GraphError):
        segment.edge_point("e", Fraction(3, 2))


def test_rescale_identity(dumbbell):
    r = dumbbell.rescale(1)
    assert r.target.length("e") == 1
    p = dumbbell.edge_point("e", Fraction(1, 2))
    assert r.point(p) == r.target.edge_point("e", Fraction(1, 2))


def test_rescale_loop_midpoint(unit_loop):
    r = unit_loop.rescale(2)
    assert r.target.length("c") == 2
    m = unit_loop.edge_point("c", Fraction(1, 2))
    assert r.point(m) == r.target.edge_point("c", Fraction(1))
    assert r.inverse_point(r.point(m)) == m


def test_rescale_fractional():
    g = MetricGraph(["a", "b"], [("e", "a", "b")], {"e": Fraction(2, 3)})
    r = g.rescale(3)
    assert r.target.length("e") == 2


def test_rescale_rejects_nonpositive(dumbbell):
    with pytest.raises(GraphError):
        dumbbell.rescale(0)


def test_rescale_preserves_genus(dumbbell, triangle):
    for g in (dumbbell, triangle):
        for lam in (2, Fraction(1, 2), Fraction(5, 3)):
            assert g.rescale(lam).target.genus() == g.genus()


def test_unit_subdivide_path():
    g = MetricGraph(["A", "B"], [("e", "A", "B")], {"e": Fraction(3)})
    sub = g.unit_subdivide()
    assert sub.n == 4  # A, two interior points, B
    assert len(sub.unit_edges) == 3
    assert sub.genus() == 0
    graph = sub.as_graph()
    assert sorted(graph.vertices) == ["A", "B", "e:1", "e:2"]


def test_unit_subdivide_loop_of_length_two():
    g = MetricGraph(["P"], [("c", "P", "P")], {"c": Fraction(2)})
    sub = g.unit_subdivide()
    assert sub.n == 2
    assert len(sub.unit_edges) == 2  # two parallel unit edges
    assert sub.genus() == 1
    assert all(a != b for a, b in sub.unit_edges)


def test_unit_subdivide_identity_on_unit_graph(triangle):
    sub = triangle.unit_subdivide()
    assert sub.n == 3
    assert len(sub.unit_edges) == 3


def test_unit_subdivide_rejects_unit_loop(unit_loop):
    with pytest.raises(GraphError):
        unit_loop.unit_subdivide()


def test_unit_subdivide_preserves_genus(dumbbell):
    sub = dumbbell.rescale(2).target.unit_subdivide()
    assert sub.genus() == dumbbell.genus()


def test_handshake_identity(dumbbell, triangle, unit_loop):
    # sum of (val - 2) = 2g - 2 on graphs without infinite edges
    for g in (dumbbell, triangle, unit_loop):
        total = sum(g.valence(v) - 2 for v in g.vertices)
        assert total == 2 * g.genus() - 2


def test_retract_core_noop(dumbbell):
    core, attach = dumbbell.retract_core()
    assert attach == {}
    assert len(core.edges) == 3


def test_retract_core_loop_with_end(loop_with_end):
    core, attach = loop_with_end.retract_core()
    assert [e.id for e in core.edges] == ["c"]
    assert attach == {"u": "Q"}
    assert core.genus() == 1


def test_retract_core_star(star_of_ends):
    core, attach = star_of_ends.retract_core()
    assert core.vertices == ("O",)
    assert core.edges == ()
    assert set(attach.values()) == {"O"}
