# Copyright (C) 2026 The layercut developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import math

from hypothesis import given, settings
from hypothesis.strategies import data
import networkx as nx
import numpy as np
import pytest

from layercut.dp import Factor, dp_opt, pairwise_factors, solve_factors
from layercut.exceptions import CapacityError, PreconditionError
import layercut.hypothesis_strategies as strategies
from layercut.model import Instance, Objective, Partition, folded_energy, graph_of
from layercut.oracle import exact_opt
from layercut.problems import encode_maxcut
from layercut.tests.layercut_data import random_graph, random_instance, random_partition
from layercut.treedecomp import TreeDecomposition, build_pd_from_slabs, build_td


def random_domains(rng, n, q):
    return [
        sorted(rng.choice(q, size=int(rng.integers(1, q + 1)), replace=False).tolist())
        for _ in range(n)
    ]


@pytest.mark.slow
@pytest.mark.parametrize("objective", list(Objective))
def test_matches_oracle_on_random_instances(objective):
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = int(rng.integers(1, 8))
        q = int(rng.integers(2, 4))
        graph = random_graph(rng, n, 0.5)
        allowed = random_domains(rng, n, q) if rng.random() < 0.3 else None
        instance = random_instance(rng, graph, q, allowed_labels=allowed)
        part = random_partition(rng, instance)
        vertices = [v for v in range(n) if rng.random() < 0.7]

        value, cfg = dp_opt(instance, build_td(graph), part, vertices, objective)
        expected, _ = exact_opt(instance, objective, vertices=vertices, part=part)
        assert math.isclose(value, expected, rel_tol=1e-9, abs_tol=1e-9)
        assert math.isclose(
            folded_energy(instance, part, vertices, cfg),
            expected,
            rel_tol=1e-9,
            abs_tol=1e-9,
        )


@settings(max_examples=50)
@given(data())
def test_matches_oracle(data):
    instance = data.draw(strategies.instances(max_vertices=6))
    part = data.draw(strategies.partitions(instance))
    vertices = data.draw(strategies.vertex_sets(instance))
    value, cfg = dp_opt(instance, build_td(graph_of(instance)), part, vertices)
    expected, _ = exact_opt(instance, vertices=vertices, part=part)
    assert math.isclose(value, expected, abs_tol=1e-9)
    assert math.isclose(
        folded_energy(instance, part, vertices, cfg), expected, abs_tol=1e-9
    )


def test_no_vertices_gives_smallest_labels():
    instance = random_instance(
        np.random.default_rng(0),
        nx.path_graph(3),
        3,
        allowed_labels=[[2], [0, 1], [1, 2]],
    )
    part = Partition.uniform(instance)
    value, cfg = dp_opt(instance, build_td(nx.path_graph(3)), part, [])
    assert value == 0.0
    assert cfg.labels == (2, 0, 1)


def test_root_choice_does_not_change_optimum():
    graph = nx.path_graph(6)
    instance = random_instance(np.random.default_rng(5), graph, 3)
    part = Partition.uniform(instance)
    td = build_pd_from_slabs([[v] for v in range(6)])
    last = TreeDecomposition(td.bags, td.tree_edges, root=len(td.bags) - 1)
    everyone = range(6)
    first_value, _ = dp_opt(instance, td, part, everyone)
    last_value, _ = dp_opt(instance, last, part, everyone)
    assert math.isclose(first_value, last_value, rel_tol=1e-12)


def test_invalid_decomposition():
    instance = encode_maxcut(nx.path_graph(3))
    td = TreeDecomposition([[0, 1], [2]], [(0, 1)])
    with pytest.raises(PreconditionError) as excinfo:
        dp_opt(instance, td, Partition.uniform(instance), [0, 1, 2])
    assert excinfo.value.code == "edge-uncovered"


def test_table_cap():
    instance = encode_maxcut(nx.complete_graph(4))
    with pytest.raises(CapacityError) as excinfo:
        dp_opt(
            instance,
            build_td(nx.complete_graph(4)),
            Partition.uniform(instance),
            range(4),
            cap=15,
        )
    assert excinfo.value.code == "table-cap-exceeded"


def test_factor_scope_is_sorted():
    factor = Factor.create((1, 0), [[0, 1], [2, 3]])
    assert factor.scope == (0, 1)
    assert factor.table.tolist() == [[0, 2], [1, 3]]


def test_constant_factor():
    factors = [Factor.create((), 5.0), Factor.create((0,), [1.0, 3.0])]
    value, cfg = solve_factors(1, 2, [(0, 1)], factors, TreeDecomposition([[0]], []))
    assert value == 8.0
    assert cfg.labels == (1,)


def test_uncovered_vertex():
    with pytest.raises(PreconditionError) as excinfo:
        solve_factors(3, 2, [(0, 1)] * 3, [], TreeDecomposition([[0, 1]], []))
    assert excinfo.value.code == "vertex-uncovered"


def test_uncovered_scope():
    factors = [Factor.create((0, 2), np.zeros((2, 2)))]
    td = TreeDecomposition([[0, 1], [1, 2]], [(0, 1)])
    with pytest.raises(PreconditionError) as excinfo:
        solve_factors(3, 2, [(0, 1)] * 3, factors, td)
    assert excinfo.value.code == "scope-uncovered"


def test_ties_prefer_small_labels():
    instance = Instance(
        num_vertices=2,
        q=2,
        edges=[(0, 1)],
        vertex_potentials=np.zeros((2, 2)),
        edge_potentials=[[[0, 1], [1, 0]]],
    )
    td = build_td(graph_of(instance))
    value, cfg = dp_opt(instance, td, Partition.uniform(instance), [0, 1])
    assert value == 1.0
    assert cfg.labels == (0, 1)


def test_pairwise_factors_skip_unweighted_edges():
    instance = encode_maxcut(nx.path_graph(3))
    part = Partition(alphas=[[1.0, 0.0], [1.0, 0.0]])
    factors = pairwise_factors(instance, part, [2])
    assert [factor.scope for factor in factors] == [(2,)]


@pytest.mark.slow
def test_value_grows_with_the_vertex_set():
    rng = np.random.default_rng(23)
    for _ in range(100):
        n = int(rng.integers(1, 8))
        graph = random_graph(rng, n, 0.5)
        instance = random_instance(rng, graph, int(rng.integers(2, 4)))
        part = random_partition(rng, instance)
        td = build_td(graph)
        larger = [v for v in range(n) if rng.random() < 0.7]
        smaller = [v for v in larger if rng.random() < 0.5]
        small_value, _ = dp_opt(instance, td, part, smaller)
        large_value, _ = dp_opt(instance, td, part, larger)
        assert small_value <= large_value + 1e-9
