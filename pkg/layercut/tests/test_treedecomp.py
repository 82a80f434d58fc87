# Copyright (C) 2026 The layercut developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import functools

from hypothesis import given, settings
import networkx as nx
import pytest

from layercut.exceptions import PreconditionError, ValidationError
import layercut.hypothesis_strategies as strategies
from layercut.tests.layercut_data import integer_graph, planar_graphs
from layercut.treedecomp import (
    Condition,
    TreeDecomposition,
    Violation,
    build_pd_from_slabs,
    build_td,
    min_fill_order,
    validate_td,
)


@given(strategies.graphs(max_vertices=9))
def test_build_td_is_valid(graph):
    td = build_td(graph)
    assert validate_td(graph, td) is None
    assert td.root == 0


@given(strategies.trees(max_vertices=10))
def test_trees_have_width_one(graph):
    assert build_td(graph).width <= 1


@pytest.mark.parametrize(
    "graph,width",
    [
        (nx.complete_graph(4), 3),
        (nx.cycle_graph(5), 2),
        (nx.path_graph(6), 1),
        (nx.empty_graph(4), 0),
        (integer_graph(nx.grid_2d_graph(2, 6)), 2),
    ],
)
def test_widths(graph, width):
    assert build_td(graph).width == width


def test_empty_graph():
    td = build_td(nx.Graph())
    assert td.bags == ((),)
    assert td.width == -1
    assert validate_td(nx.Graph(), td) is None


def test_planar_fixtures_decompose():
    for graph in planar_graphs():
        assert validate_td(graph, build_td(graph)) is None


def test_min_fill_order_on_path():
    assert min_fill_order(nx.path_graph(3)) == [(0, (1,)), (1, (2,)), (2, ())]


def test_redundant_bags_are_merged():
    td = build_td(nx.path_graph(3))
    assert td.bags == ((1, 2), (0, 1))
    assert td.tree_edges == ((0, 1),)


@pytest.mark.parametrize(
    "graph,td,expected",
    [
        (
            nx.path_graph(2),
            TreeDecomposition([[0, 5]], []),
            Violation(Condition.UNKNOWN_VERTEX, 5),
        ),
        (
            nx.cycle_graph(3),
            TreeDecomposition([[0, 1], [1, 2], [0, 2]], [(0, 1), (1, 2), (2, 0)]),
            Violation(Condition.NOT_A_TREE),
        ),
        (
            nx.path_graph(2),
            TreeDecomposition([[0, 1], [1]], []),
            Violation(Condition.NOT_A_TREE),
        ),
        (
            nx.path_graph(2),
            TreeDecomposition([[0, 1]], [(0, 3)]),
            Violation(Condition.NOT_A_TREE),
        ),
        (
            nx.path_graph(3),
            TreeDecomposition([[0, 1]], []),
            Violation(Condition.VERTEX_UNCOVERED, 2),
        ),
        (
            nx.path_graph(3),
            TreeDecomposition([[0, 1], [2]], [(0, 1)]),
            Violation(Condition.EDGE_UNCOVERED, (1, 2)),
        ),
        (
            nx.path_graph(3),
            TreeDecomposition([[0, 1], [1, 2], [0]], [(0, 1), (1, 2)]),
            Violation(Condition.SUBTREE_DISCONNECTED, 0),
        ),
    ],
)
def test_violations(graph, td, expected):
    assert validate_td(graph, td) == expected


def test_violation_str():
    assert str(Violation(Condition.NOT_A_TREE)) == "not-a-tree"
    assert str(Violation(Condition.VERTEX_UNCOVERED, 2)) == "vertex-uncovered: 2"


def test_bags_are_sorted_sets():
    td = TreeDecomposition([[2, 0, 2]], [])
    assert td.bags == ((0, 2),)


def test_root_must_be_a_bag():
    with pytest.raises(ValidationError) as excinfo:
        TreeDecomposition([[0]], [], root=2)
    assert excinfo.value.code == "root"


def test_pd_from_slabs():
    td = build_pd_from_slabs([[0, 1], [2], [3, 4]], nx.path_graph(5))
    assert td.bags == ((0, 1, 2), (2, 3, 4))
    assert td.tree_edges == ((0, 1),)
    assert validate_td(nx.path_graph(5), td) is None


@pytest.mark.parametrize(
    "groups,bags", [([[0, 1]], ((0, 1),)), ([], ((),))]
)
def test_pd_from_few_slabs(groups, bags):
    assert build_pd_from_slabs(groups).bags == bags


@pytest.mark.parametrize(
    "groups,graph,code",
    [
        ([[0, 1], [1]], None, "overlapping-groups"),
        ([[0], [2], [1]], nx.path_graph(3), "edge-spans-groups"),
    ],
)
def test_pd_from_slabs_errors(groups, graph, code):
    with pytest.raises(PreconditionError) as excinfo:
        build_pd_from_slabs(groups, graph)
    assert excinfo.value.code == code


def exhaustive_treewidth(graph):
    """Treewidth by dynamic programming over the sets of vertices eliminated
    first."""

    def later_neighbours(eliminated, v):
        # vertices outside ``eliminated`` reached from ``v`` through it
        seen, stack, found = {v}, [v], set()
        while stack:
            for w in graph[stack.pop()]:
                if w in seen:
                    continue
                seen.add(w)
                if w in eliminated:
                    stack.append(w)
                else:
                    found.add(w)
        return len(found)

    @functools.lru_cache(maxsize=None)
    def width(eliminated):
        if not eliminated:
            return -1
        return min(
            max(width(eliminated - {v}), later_neighbours(eliminated - {v}, v))
            for v in eliminated
        )

    return width(frozenset(graph.nodes))


@pytest.mark.parametrize(
    "graph,expected",
    [
        (nx.complete_graph(4), 3),
        (nx.cycle_graph(6), 2),
        (nx.path_graph(5), 1),
        (nx.empty_graph(3), 0),
        (integer_graph(nx.grid_2d_graph(3, 3)), 3),
    ],
)
def test_exhaustive_treewidth(graph, expected):
    assert exhaustive_treewidth(graph) == expected


@settings(max_examples=60)
@given(strategies.graphs(min_vertices=1, max_vertices=8))
def test_width_is_at_least_the_treewidth(graph):
    assert build_td(graph).width >= exhaustive_treewidth(graph)


@given(strategies.graphs(max_vertices=9))
def test_build_td_is_deterministic(graph):
    copy = nx.Graph()
    copy.add_nodes_from(sorted(graph.nodes, reverse=True))
    copy.add_edges_from((v, u) for u, v in sorted(graph.edges, reverse=True))
    assert build_td(copy) == build_td(graph)
    assert build_td(graph) == build_td(graph)
