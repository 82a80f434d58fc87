# Copyright (C) 2019-2026 The layercut developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import itertools

from hypothesis.strategies import (
    composite,
    floats,
    integers,
    just,
    lists,
    none,
    one_of,
    sampled_from,
    sets,
    tuples,
)
import networkx as nx

from .geometry import BallSet
from .model import Configuration, Instance, Partition


def optional(strategy):
    return one_of(none(), strategy)


def potentials(nonnegative=True):
    """Small integral potentials, so that sums are exact in any order."""
    return integers(0 if nonnegative else -9, 9).map(float)


@composite
def graphs(draw, *, min_vertices=0, max_vertices=8, directed=False):
    """Simple graphs on nodes ``0..n-1``."""
    n = draw(integers(min_vertices, max_vertices))
    if directed:
        pairs = list(itertools.permutations(range(n), 2))
    else:
        pairs = list(itertools.combinations(range(n), 2))
    edges = draw(lists(sampled_from(pairs), unique=True)) if pairs else []
    graph = nx.DiGraph() if directed else nx.Graph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from(sorted(edges))
    return graph


@composite
def trees(draw, *, max_vertices=8):
    n = draw(integers(1, max_vertices))
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    for v in range(1, n):
        graph.add_edge(draw(integers(0, v - 1)), v)
    return graph


@composite
def instances_d(
    draw,
    *,
    max_vertices=6,
    max_q=3,
    nonnegative=True,
    directed=False,
    restricted_labels=True,
):
    graph = draw(graphs(min_vertices=1, max_vertices=max_vertices, directed=directed))
    n = graph.number_of_nodes()
    q = draw(integers(1, max_q))
    values = potentials(nonnegative)
    row = lists(values, min_size=q, max_size=q)
    edges = [list(e) for e in graph.edges]
    allowed = None
    if restricted_labels:
        allowed = draw(
            optional(
                lists(
                    sets(integers(0, q - 1), min_size=1).map(sorted),
                    min_size=n,
                    max_size=n,
                )
            )
        )
    return dict(
        num_vertices=n,
        q=q,
        edges=edges,
        vertex_potentials=draw(lists(row, min_size=n, max_size=n)),
        edge_potentials=draw(
            lists(lists(row, min_size=q, max_size=q), min_size=len(edges), max_size=len(edges))
        ),
        directed=directed,
        allowed_labels=allowed,
    )


def instances(**kwargs):
    return instances_d(**kwargs).map(Instance.from_dict)


@composite
def partitions(draw, instance: Instance):
    """Random splits of the edges of ``instance``."""
    alphas = draw(
        lists(
            floats(min_value=0.0, max_value=1.0, allow_nan=False),
            min_size=instance.m,
            max_size=instance.m,
        )
    )
    return Partition(alphas=[(a, 1.0 - a) for a in alphas])


def configurations(instance: Instance):
    """Valid configurations of ``instance``."""
    if instance.num_vertices == 0:
        return just(Configuration(labels=()))
    return tuples(*(sampled_from(labels) for labels in instance.domains)).map(
        lambda labels: Configuration(labels=labels)
    )


def vertex_sets(instance: Instance):
    """Sorted tuples of distinct vertices of ``instance``."""
    if instance.num_vertices == 0:
        return just(())
    return sets(integers(0, instance.num_vertices - 1)).map(
        lambda vertices: tuple(sorted(vertices))
    )


@composite
def ball_sets(draw, *, d=2, max_balls=8, extent=5.0):
    n = draw(integers(0, max_balls))
    coordinate = floats(min_value=0.0, max_value=extent, allow_nan=False)
    centers = draw(
        lists(lists(coordinate, min_size=d, max_size=d), min_size=n, max_size=n)
    )
    diameters = draw(
        lists(
            floats(min_value=0.25, max_value=2.0, allow_nan=False),
            min_size=n,
            max_size=n,
        )
    )
    return BallSet(d=d, centers=centers, diameters=diameters)
