# Copyright (C) 2026 The layercut developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import itertools
import math

from hypothesis import given, settings
from hypothesis.strategies import data, sampled_from
import networkx as nx
import numpy as np
import pytest

from layercut.exceptions import CapacityError, ParameterError
import layercut.hypothesis_strategies as strategies
from layercut.model import (
    Instance,
    Objective,
    Partition,
    energy,
    folded_energy,
    folded_values,
)
from layercut.oracle import exact_opt, exact_opt_product
from layercut.problems import encode_maxcut


def brute_force(instance, score, objective=Objective.MAX):
    best = None
    for labels in itertools.product(*instance.domains):
        value = score(labels)
        if best is None or objective.improves(value, best[0]):
            best = (value, labels)
    return best


@pytest.mark.parametrize(
    "graph,expected",
    [
        (nx.complete_graph(3), 2.0),
        (nx.cycle_graph(4), 4.0),
        (nx.cycle_graph(5), 4.0),
        (nx.empty_graph(3), 0.0),
    ],
)
def test_maxcut_values(graph, expected):
    value, cfg = exact_opt(encode_maxcut(graph))
    assert value == expected
    assert energy(encode_maxcut(graph), cfg) == expected


def test_single_weighted_edge():
    graph = nx.Graph()
    graph.add_edge(0, 1, weight=5.0)
    value, cfg = exact_opt(encode_maxcut(graph))
    assert value == 5.0
    assert cfg.labels == (0, 1)


def test_ties_resolve_to_smallest_configuration():
    instance = encode_maxcut(nx.empty_graph(3))
    assert exact_opt(instance)[1].labels == (0, 0, 0)
    assert exact_opt(encode_maxcut(nx.path_graph(3)))[1].labels == (0, 1, 0)


def test_minimize():
    instance = Instance(
        num_vertices=2,
        q=3,
        edges=[(0, 1)],
        vertex_potentials=[[3, 1, 2], [0, 5, 5]],
        edge_potentials=[np.full((3, 3), 1.0)],
    )
    value, cfg = exact_opt(instance, Objective.MIN)
    assert value == 2.0
    assert cfg.labels == (1, 0)


def test_allowed_labels_restrict_search():
    instance = Instance(
        num_vertices=2,
        q=2,
        edges=[],
        vertex_potentials=[[0, 9], [0, 9]],
        edge_potentials=[],
        allowed_labels=[[0], [0, 1]],
    )
    value, cfg = exact_opt(instance)
    assert value == 9.0
    assert cfg.labels == (0, 1)


def test_empty_instance():
    instance = Instance(
        num_vertices=0, q=2, edges=[], vertex_potentials=[], edge_potentials=[]
    )
    value, cfg = exact_opt(instance)
    assert value == 0.0
    assert cfg.labels == ()


def test_cap():
    instance = encode_maxcut(nx.empty_graph(10))
    with pytest.raises(CapacityError) as excinfo:
        exact_opt(instance, cap=1000)
    assert excinfo.value.code == "oracle-cap-exceeded"


def test_folded_objective_needs_partition():
    with pytest.raises(ParameterError):
        exact_opt(encode_maxcut(nx.path_graph(3)), vertices=[0])


@settings(max_examples=40)
@given(data())
def test_matches_brute_force(data):
    instance = data.draw(strategies.instances(max_vertices=5))
    objective = data.draw(sampled_from(list(Objective)))
    value, cfg = exact_opt(instance, objective)
    expected, labels = brute_force(
        instance, lambda c: energy(instance, c), objective
    )
    assert math.isclose(value, expected, abs_tol=1e-9)
    assert cfg.labels == labels


@settings(max_examples=40)
@given(data())
def test_folded_matches_brute_force(data):
    instance = data.draw(strategies.instances(max_vertices=5))
    part = data.draw(strategies.partitions(instance))
    vertices = data.draw(strategies.vertex_sets(instance))
    value, cfg = exact_opt(instance, vertices=vertices, part=part)
    expected, _ = brute_force(
        instance, lambda c: folded_energy(instance, part, vertices, c)
    )
    assert math.isclose(value, expected, abs_tol=1e-9)
    assert math.isclose(
        folded_energy(instance, part, vertices, cfg), expected, abs_tol=1e-9
    )


def test_product_matches_brute_force():
    rng = np.random.default_rng(7)
    graph = nx.cycle_graph(4)
    instance = Instance(
        num_vertices=4,
        q=2,
        edges=sorted(graph.edges),
        vertex_potentials=rng.uniform(1.0, 2.0, size=(4, 2)),
        edge_potentials=rng.uniform(0.0, 1.0, size=(4, 2, 2)),
    )
    part = Partition.uniform(instance)
    value, cfg = exact_opt_product(instance, part)
    expected, labels = brute_force(
        instance, lambda c: float(np.prod(folded_values(instance, part, c)))
    )
    assert math.isclose(value, expected, rel_tol=1e-9)
    assert cfg.labels == labels
