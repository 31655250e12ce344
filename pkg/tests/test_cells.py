from fractions import Fraction

import pytest

from tropdiv import Divisor, canonical_divisor, metric_rank
from tropdiv.cells import (Cell, CellCaps, CellError, enumerate_cells,
                           max_cell_dimension, reconstruct_function)


def interior_pair(dumbbell):
    return Divisor.of(dumbbell,
                      (1, dumbbell.edge_point("c1", Fraction(1, 2))),
                      (1, dumbbell.edge_point("c2", Fraction(1, 2))))


def test_dumbbell_canonical_dimensions(dumbbell):
    k = canonical_divisor(dumbbell)
    report = enumerate_cells(dumbbell, k)
    assert not report.truncated
    dims = set(report.dims())
    assert 2 in dims and 3 in dims
    assert max(dims) == 3


def test_dumbbell_canonical_max_vs_rank(dumbbell):
    k = canonical_divisor(dumbbell)
    report = enumerate_cells(dumbbell, k)
    assert max_cell_dimension(report.cells) == 3
    assert max_cell_dimension(report.cells) >= metric_rank(dumbbell, k).rank + 1


def test_dumbbell_interior_pair_pure_dimension_one(dumbbell):
    d = interior_pair(dumbbell)
    report = enumerate_cells(dumbbell, d)
    assert not report.truncated
    assert report.cells
    assert max_cell_dimension(report.cells) == 1
    assert set(report.dims()) == {1}
    assert 1 >= metric_rank(dumbbell, d).rank + 1


def test_zero_divisor_single_constant_cell(dumbbell):
    report = enumerate_cells(dumbbell, Divisor.zero(dumbbell))
    assert len(report.cells) == 1
    cell = report.cells[0]
    assert cell.dimension == 1
    assert all(s == 0 for _, s in cell.signature.slopes)
    assert max_cell_dimension(report.cells) == 1 == metric_rank(
        dumbbell, Divisor.zero(dumbbell)).rank + 1


def test_negative_degree_no_cells(dumbbell):
    d = Divisor.of(dumbbell, (-1, dumbbell.vertex_point("P")))
    report = enumerate_cells(dumbbell, d)
    assert report.cells == []
    assert max_cell_dimension(report.cells) == 0


def test_opposite_point_constraint(dumbbell):
    """With one point inside a cycle, the paired point is pinned to the
    opposite position of the same cycle: the reflection through the
    junction, t1 + t2 = l(C) (checked independently via linear_equiv in
    test_ranks).  Points split across the two cycles are never feasible."""
    k = canonical_divisor(dumbbell)
    report = enumerate_cells(dumbbell, k)
    seen = 0
    for cell in report.cells:
        kinds = [slot for slot in cell.signature.placement]
        if kinds == [("edge", "c1"), ("edge", "c1")]:
            t1, t2 = cell.sample_offsets
            assert t1 + t2 == dumbbell.length("c1")
            assert cell.dimension == 2  # one free offset plus the constant
            seen += 1
        if kinds == [("edge", "c1"), ("edge", "c2")]:
            pytest.fail("points split across the two cycles cannot be feasible")
    assert seen >= 1


def test_cells_reconstruct_to_valid_functions(dumbbell):
    k = canonical_divisor(dumbbell)
    report = enumerate_cells(dumbbell, k)
    assert report.cells
    for cell in report.cells:
        f, placed = reconstruct_function(dumbbell, k, cell)
        total = f.principal_divisor() + k
        assert total.degree() == k.degree()
        assert total.is_effective()
        expected = Divisor.of(dumbbell, *[(1, p) for p in placed])
        assert total == expected


def test_cells_reconstruct_interior_pair(dumbbell):
    d = interior_pair(dumbbell)
    report = enumerate_cells(dumbbell, d)
    for cell in report.cells:
        f, placed = reconstruct_function(dumbbell, d, cell)
        total = f.principal_divisor() + d
        assert total == Divisor.of(dumbbell, *[(1, p) for p in placed])
        assert total.is_effective()


def test_cell_dimensions_invariant_under_rescaling(dumbbell):
    k = canonical_divisor(dumbbell)
    base = enumerate_cells(dumbbell, k)
    resc = dumbbell.rescale(2)
    scaled = enumerate_cells(resc.target, k.transport(resc))
    assert sorted(c.dimension for c in base.cells) == \
        sorted(c.dimension for c in scaled.cells)


def test_slope_cap_respected(dumbbell):
    k = canonical_divisor(dumbbell)
    report = enumerate_cells(dumbbell, k)
    from tropdiv import slope_bound
    bound = slope_bound(dumbbell, 2)
    for cell in report.cells:
        for _, s in cell.signature.slopes:
            assert abs(s) <= bound


def test_caps_rejected(dumbbell):
    k = canonical_divisor(dumbbell)
    with pytest.raises(CellError):
        enumerate_cells(dumbbell, k, CellCaps(max_degree=1))
    big = Divisor.of(dumbbell, (5, dumbbell.vertex_point("P")))
    with pytest.raises(CellError):
        enumerate_cells(dumbbell, big)


def test_segment_degree_one(segment):
    d = Divisor.of(segment, (1, segment.vertex_point("A")))
    report = enumerate_cells(segment, d)
    # the point can sit anywhere: a 2-cell (offset + constant) plus
    # vertex placements of dimension 1
    assert max_cell_dimension(report.cells) == 2
    assert 2 == metric_rank(segment, d).rank + 1
