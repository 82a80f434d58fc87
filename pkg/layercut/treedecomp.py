# Copyright (C) 2026 The layercut developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Tree and path decompositions.

A decomposition is valid for a graph when its bags, joined by ``tree_edges``,
form a tree; every vertex and every edge of the graph is contained in some
bag; and the bags containing any given vertex induce a connected subtree.
"""

from enum import Enum
import itertools
import logging
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

import attr
from attrs_strict import type_validator
import networkx as nx

from .exceptions import PreconditionError, ValidationError
from .model import BaseModel

logger = logging.getLogger(__name__)


def _freeze_bags(bags) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(sorted(set(int(v) for v in bag))) for bag in bags)


def _freeze_tree_edges(edges) -> Tuple[Tuple[int, int], ...]:
    return tuple((int(a), int(b)) for a, b in edges)


@attr.s(frozen=True, slots=True)
class TreeDecomposition(BaseModel):
    """Bags (sorted vertex tuples) and the tree joining them. Bag ``root``
    (index 0 unless stated otherwise) roots the tree for dynamic
    programming."""

    bags = attr.ib(type=Tuple[Tuple[int, ...], ...], converter=_freeze_bags)
    tree_edges = attr.ib(
        type=Tuple[Tuple[int, int], ...], converter=_freeze_tree_edges
    )
    root = attr.ib(type=int, default=0, validator=type_validator())

    @root.validator
    def check_root(self, attribute, value):
        if self.bags and not 0 <= value < len(self.bags):
            raise ValidationError(
                "Root %(root)s is not a bag index", code="root", params={"root": value}
            )

    @property
    def width(self) -> int:
        """Largest bag size minus one (-1 when every bag is empty)."""
        return max((len(bag) for bag in self.bags), default=0) - 1

    def tree(self) -> nx.Graph:
        tree = nx.Graph()
        tree.add_nodes_from(range(len(self.bags)))
        tree.add_edges_from(self.tree_edges)
        return tree


class Condition(Enum):
    """Defining conditions of a tree decomposition."""

    UNKNOWN_VERTEX = "unknown-vertex"
    NOT_A_TREE = "not-a-tree"
    VERTEX_UNCOVERED = "vertex-uncovered"
    EDGE_UNCOVERED = "edge-uncovered"
    SUBTREE_DISCONNECTED = "subtree-disconnected"


@attr.s(frozen=True, slots=True)
class Violation(BaseModel):
    """The first failed condition found by :func:`validate_td`, with the
    vertex or edge witnessing it."""

    condition = attr.ib(type=Condition, validator=type_validator())
    witness = attr.ib(type=Any, default=None)

    def __str__(self) -> str:
        if self.witness is None:
            return self.condition.value
        return "%s: %s" % (self.condition.value, self.witness)


def validate_td(graph: nx.Graph, td: TreeDecomposition) -> Optional[Violation]:
    """Checks ``td`` against ``graph``.

    Returns:
        None when ``td`` is a valid tree decomposition of ``graph``, the
        first :class:`Violation` found otherwise.

    >>> validate_td(nx.path_graph(3), TreeDecomposition([[0, 1], [2]], [(0, 1)]))
    Violation(condition=<Condition.EDGE_UNCOVERED: 'edge-uncovered'>, witness=(1, 2))
    """
    nodes = set(graph.nodes)
    for bag in td.bags:
        for v in bag:
            if v not in nodes:
                return Violation(Condition.UNKNOWN_VERTEX, v)

    count = len(td.bags)
    if count == 0 or any(
        not (0 <= a < count and 0 <= b < count) for a, b in td.tree_edges
    ):
        return Violation(Condition.NOT_A_TREE)
    tree = td.tree()
    if tree.number_of_edges() != len(td.tree_edges) or not nx.is_tree(tree):
        return Violation(Condition.NOT_A_TREE)

    holders: Dict[int, Set[int]] = {v: set() for v in nodes}
    for index, bag in enumerate(td.bags):
        for v in bag:
            holders[v].add(index)
    for v in sorted(nodes):
        if not holders[v]:
            return Violation(Condition.VERTEX_UNCOVERED, v)
    for u, v in sorted(tuple(sorted(e)) for e in graph.edges):
        if u != v and not holders[u] & holders[v]:
            return Violation(Condition.EDGE_UNCOVERED, (u, v))
    for v in sorted(nodes):
        if not nx.is_connected(tree.subgraph(holders[v])):
            return Violation(Condition.SUBTREE_DISCONNECTED, v)
    return None


def _fill_in(adjacency: Dict[int, Set[int]], v: int) -> int:
    return sum(
        1
        for a, b in itertools.combinations(sorted(adjacency[v]), 2)
        if b not in adjacency[a]
    )


def min_fill_order(graph: nx.Graph) -> List[Tuple[int, Tuple[int, ...]]]:
    """Greedy min-fill elimination, ties broken by smallest vertex id.

    Returns:
        the eliminated vertices in order, each with its neighbourhood at the
        time of its elimination.
    """
    adjacency = {v: set(graph.neighbors(v)) - {v} for v in graph.nodes}
    eliminated = []
    while adjacency:
        v = min(adjacency, key=lambda u: (_fill_in(adjacency, u), u))
        neighbours = adjacency.pop(v)
        for a, b in itertools.combinations(neighbours, 2):
            adjacency[a].add(b)
            adjacency[b].add(a)
        for u in neighbours:
            adjacency[u].discard(v)
        eliminated.append((v, tuple(sorted(neighbours))))
    return eliminated


def _contract_redundant(
    bags: Dict[int, Set[int]], tree: nx.Graph
) -> Tuple[Dict[int, Set[int]], nx.Graph]:
    """Merges every bag into a neighbouring superset; the surviving node
    keeps the smaller id and the larger content."""
    changed = True
    while changed:
        changed = False
        for a, b in sorted(tuple(sorted(e)) for e in tree.edges):
            if bags[a] <= bags[b] or bags[b] <= bags[a]:
                keep, drop = a, b
                bags[keep] = bags[a] | bags[b]
                for other in list(tree.neighbors(drop)):
                    if other != keep:
                        tree.add_edge(keep, other)
                tree.remove_node(drop)
                del bags[drop]
                changed = True
                break
    return bags, tree


def build_td(graph: nx.Graph) -> TreeDecomposition:
    """Tree decomposition from a min-fill elimination ordering.

    The bag of an eliminated vertex is the vertex with its neighbourhood at
    elimination time, attached to the bag of the earliest-eliminated of those
    neighbours. Bags contained in a neighbouring bag are merged away, and
    the bag of the last eliminated vertex becomes the root (index 0).

    >>> build_td(nx.complete_graph(4)).width
    3
    >>> build_td(nx.cycle_graph(5)).width
    2
    """
    order = min_fill_order(graph)
    if not order:
        return TreeDecomposition(bags=[()], tree_edges=[])

    last = len(order) - 1
    # index 0 is the last eliminated vertex
    node_of = {v: last - position for position, (v, _) in enumerate(order)}
    bags: Dict[int, Set[int]] = {}
    tree = nx.Graph()
    tree.add_nodes_from(range(len(order)))
    for position, (v, neighbours) in enumerate(order):
        node = node_of[v]
        bags[node] = {v, *neighbours}
        if neighbours:
            parent = max(node_of[u] for u in neighbours)
            tree.add_edge(node, parent)
        elif node != 0:
            # the root of another component of the elimination forest
            tree.add_edge(node, 0)
    bags, tree = _contract_redundant(bags, tree)

    renumber = {node: index for index, node in enumerate(sorted(bags))}
    td = TreeDecomposition(
        bags=[bags[node] for node in sorted(bags)],
        tree_edges=sorted(
            tuple(sorted((renumber[a], renumber[b]))) for a, b in tree.edges
        ),
        root=0,
    )
    logger.debug(
        "Min-fill decomposition of %d vertices: %d bags, width %d",
        graph.number_of_nodes(),
        len(td.bags),
        td.width,
    )
    return td


def build_pd_from_slabs(
    groups: Sequence[Sequence[int]], graph: Optional[nx.Graph] = None
) -> TreeDecomposition:
    """Path decomposition pairing consecutive groups.

    Bag ``t`` is ``groups[t] | groups[t + 1]``; a single group yields a single
    bag. When ``graph`` is given, every edge must join vertices of the same or
    of adjacent groups.

    >>> build_pd_from_slabs([[0], [1], [2]]).bags
    ((0, 1), (1, 2))

    Raises:
        PreconditionError: if an edge of ``graph`` spans non-adjacent groups,
            or a vertex belongs to several groups.
    """
    position: Dict[int, int] = {}
    for index, group in enumerate(groups):
        for v in group:
            if v in position:
                raise PreconditionError(
                    "Vertex %(vertex)s belongs to several groups",
                    code="overlapping-groups",
                    params={"vertex": v},
                )
            position[v] = index
    if graph is not None:
        for u, v in graph.edges:
            if u in position and v in position and abs(position[u] - position[v]) > 1:
                raise PreconditionError(
                    "Edge (%(u)s, %(v)s) spans non-adjacent groups",
                    code="edge-spans-groups",
                    params={"u": u, "v": v},
                )
    if len(groups) <= 1:
        return TreeDecomposition(bags=[groups[0] if groups else ()], tree_edges=[])
    bags = [set(groups[t]) | set(groups[t + 1]) for t in range(len(groups) - 1)]
    return TreeDecomposition(
        bags=bags, tree_edges=[(t, t + 1) for t in range(len(bags) - 1)]
    )
