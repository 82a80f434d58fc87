# Copyright (C) 2019-2026 The layercut developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import attr
from hypothesis import given
from hypothesis.strategies import data
import numpy as np

from layercut.hypothesis_strategies import (
    ball_sets,
    configurations,
    graphs,
    instances,
    partitions,
    trees,
    vertex_sets,
)
from layercut.model import Instance, check_configuration


@given(graphs())
def test_graph_nodes_are_consecutive(graph):
    assert sorted(graph.nodes) == list(range(graph.number_of_nodes()))
    assert not graph.is_directed()


@given(graphs(directed=True))
def test_directed_graph_generation(graph):
    assert graph.is_directed()
    assert all(u != v for u, v in graph.edges)


@given(trees())
def test_tree_generation(tree):
    assert tree.number_of_edges() == tree.number_of_nodes() - 1


@given(instances())
def test_instance_generation(instance):
    attr.validate(instance)
    assert Instance.from_dict(instance.to_dict()) == instance
    assert (instance.vertex_potentials >= 0).all()


@given(instances(directed=True, nonnegative=False))
def test_directed_instance_generation(instance):
    assert instance.directed
    assert np.isfinite(instance.edge_potentials).all()


@given(data())
def test_configuration_generation(data):
    instance = data.draw(instances())
    cfg = data.draw(configurations(instance))
    assert len(check_configuration(instance, cfg)) == instance.num_vertices


@given(data())
def test_partition_generation(data):
    instance = data.draw(instances())
    part = data.draw(partitions(instance))
    assert part.alphas.shape == (instance.m, 2)
    assert np.allclose(part.alphas.sum(axis=1), 1.0)


@given(data())
def test_vertex_set_generation(data):
    instance = data.draw(instances())
    vertices = data.draw(vertex_sets(instance))
    assert list(vertices) == sorted(set(vertices))
    assert all(0 <= v < instance.num_vertices for v in vertices)


@given(ball_sets(d=3))
def test_ball_set_generation(balls):
    attr.validate(balls)
    assert balls.d == 3
    assert len(balls.diameters) == balls.n
