from fractions import Fraction

import pytest

from tropdiv import MetricGraph
from tropdiv.rationals import INF


@pytest.fixture
def dumbbell():
    """Two unit cycles joined by a unit bridge: P and Q are 3-valent."""
    return MetricGraph(
        ["P", "Q"],
        [("c1", "P", "P"), ("e", "P", "Q"), ("c2", "Q", "Q")],
        {"c1": Fraction(1), "e": Fraction(1), "c2": Fraction(1)},
    )


@pytest.fixture
def segment():
    return MetricGraph(["A", "B"], [("e", "A", "B")], {"e": Fraction(1)})


@pytest.fixture
def unit_loop():
    return MetricGraph(["v"], [("c", "v", "v")], {"c": Fraction(1)})


@pytest.fixture
def triangle():
    return MetricGraph(
        ["A", "B", "C"],
        [("ab", "A", "B"), ("bc", "B", "C"), ("ca", "C", "A")],
        {"ab": Fraction(1), "bc": Fraction(1), "ca": Fraction(1)},
    )


@pytest.fixture
def parallel():
    """Two vertices joined by edges of lengths 3 and 5."""
    return MetricGraph(
        ["X", "Y"],
        [("a", "X", "Y"), ("b", "X", "Y")],
        {"a": Fraction(3), "b": Fraction(5)},
    )


@pytest.fixture
def loop_with_end():
    """Unit loop at Q with one unbounded edge attached at Q."""
    return MetricGraph(
        ["Q", "W"],
        [("c", "Q", "Q"), ("u", "Q", "W")],
        {"c": Fraction(1), "u": INF},
    )


@pytest.fixture
def star_of_ends():
    """Three unbounded edges meeting at one vertex (genus 0)."""
    return MetricGraph(
        ["O", "W1", "W2", "W3"],
        [("u1", "O", "W1"), ("u2", "O", "W2"), ("u3", "O", "W3")],
        {"u1": INF, "u2": INF, "u3": INF},
    )


def make_path(lengths):
    """Path graph v0 - v1 - ... with the given edge lengths."""
    n = len(lengths)
    vertices = [f"v{i}" for i in range(n + 1)]
    edges = [(f"e{i}", f"v{i}", f"v{i+1}") for i in range(n)]
    return MetricGraph(vertices, edges, {f"e{i}": Fraction(l) for i, l in enumerate(lengths)})
