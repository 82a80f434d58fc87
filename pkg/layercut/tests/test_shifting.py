# Copyright (C) 2026 The layercut developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import math
import warnings

from hypothesis import given, settings
from hypothesis.strategies import data, integers
import networkx as nx
import numpy as np
import pytest

from layercut.exceptions import CapacityError, DomainError, ParameterError
import layercut.hypothesis_strategies as strategies
from layercut.model import (
    Configuration,
    Instance,
    Objective,
    Partition,
    balance_report,
    energy,
)
from layercut.oracle import exact_opt, exact_opt_product
from layercut.problems import encode_maxcut
from layercut.shifting import (
    Piece,
    ShiftOutcome,
    baker_max,
    baker_min_balanced,
    baker_ratio,
    bfs_layers,
    k_for_epsilon,
    max_product,
    min_sum_ratio,
    parallel_map,
    pieces_by_key,
    product_exponent,
    select_best,
    shift_split,
    td_exact,
)
from layercut.tests.layercut_data import (
    balanced_fixtures,
    planar_fixtures,
    planar_graphs,
)

PLANAR = planar_fixtures()
BALANCED = balanced_fixtures()


def test_ratios():
    assert baker_ratio(18) == 0.9
    assert min_sum_ratio(1.0, 3) == 1.0
    assert product_exponent(2) == 0.5


@pytest.mark.parametrize("epsilon,k", [(0.1, 18), (0.5, 2), (0.9, 1), (0.2, 8)])
def test_k_for_epsilon(epsilon, k):
    assert k_for_epsilon(epsilon) == k
    assert baker_ratio(k) >= 1 - epsilon
    assert k == 1 or baker_ratio(k - 1) < 1 - epsilon


@pytest.mark.parametrize("epsilon", [0.0, 1.0, -0.5, 2.0])
def test_epsilon_range(epsilon):
    with pytest.raises(ParameterError) as excinfo:
        k_for_epsilon(epsilon)
    assert excinfo.value.code == "epsilon-range"


def test_bfs_layers_per_component():
    graph = nx.disjoint_union(nx.path_graph(2), nx.path_graph(3))
    layers = bfs_layers(graph)
    assert layers.levels == (0, 1, 0, 1, 2)
    assert layers.roots == (0, 2)


def test_bfs_layers_root_rule():
    assert bfs_layers(nx.path_graph(3), root_rule=max).levels == (2, 1, 0)


def test_shift_offset_range():
    graph = nx.path_graph(4)
    with pytest.raises(ParameterError) as excinfo:
        shift_split(graph, bfs_layers(graph), 2, 4)
    assert excinfo.value.code == "offset-range"


@pytest.mark.parametrize("k", [1, 2, 3])
def test_every_vertex_is_interior_in_k_shifts(k):
    for graph in planar_graphs():
        layers = bfs_layers(graph)
        counts = [0] * graph.number_of_nodes()
        for ell in range(k + 2):
            plan = shift_split(graph, layers, k, ell)
            for interior in plan.interior:
                for v in interior:
                    counts[v] += 1
            for component in plan.components:
                spread = [layers.levels[v] for v in component]
                assert max(spread) - min(spread) <= k + 1
        assert counts == [k] * graph.number_of_nodes()


def test_pieces_by_key():
    instance = encode_maxcut(nx.path_graph(4))
    pieces = pieces_by_key(instance, [0, 0, None, 1], [True, False, False, True])
    assert pieces == [
        Piece(vertices=(0, 1), interior=(0,), edge_ids=(0,)),
        Piece(vertices=(3,), interior=(3,), edge_ids=()),
    ]


def test_parallel_map_keeps_order():
    assert parallel_map(lambda x: x * x, range(10), threads=4) == [
        x * x for x in range(10)
    ]


def test_select_best_prefers_first_on_ties():
    outcomes = [
        ShiftOutcome(
            shift=shift,
            score=score,
            energy=score,
            dp_bound=0.0,
            cfg=Configuration(labels=()),
            widths=(),
            interior_size=0,
        )
        for shift, score in enumerate([1.0, 3.0, 3.0, 2.0])
    ]
    assert select_best(outcomes, Objective.MAX).shift == 1
    assert select_best(outcomes, Objective.MIN).shift == 0


@pytest.mark.slow
@pytest.mark.parametrize("k", [1, 2, 4])
def test_baker_max_guarantee(k):
    for instance in PLANAR:
        optimum, _ = exact_opt(instance)
        result = baker_max(instance, None, k)
        assert result.scheme == "baker"
        assert result.objective is Objective.MAX
        assert result.ratio_guarantee == baker_ratio(k)
        assert len(result.shift_values) == k + 2
        assert result.energy >= baker_ratio(k) * optimum - 1e-9
        assert result.energy <= optimum + 1e-9
        assert result.dp_bound <= result.energy + 1e-9
        assert math.isclose(result.energy, energy(instance, result.cfg), abs_tol=1e-9)


def test_baker_max_with_another_root():
    for instance in PLANAR[:8]:
        optimum, _ = exact_opt(instance)
        result = baker_max(instance, None, 2, root_rule=max)
        assert result.energy >= baker_ratio(2) * optimum - 1e-9


@pytest.mark.parametrize("k", [2, 4])
def test_baker_min_guarantee(k):
    for instance in BALANCED:
        alpha = balance_report(instance).alpha_star
        assert 1.0 <= alpha <= 2.0
        optimum, _ = exact_opt(instance, Objective.MIN)
        result = baker_min_balanced(instance, None, k)
        assert result.ratio_guarantee == min_sum_ratio(alpha, k)
        assert result.energy <= result.ratio_guarantee * optimum * (1 + 1e-9)
        assert result.energy >= optimum - 1e-9
        assert result.dp_bound <= result.energy + 1e-9


@pytest.mark.parametrize("k", [1, 2])
def test_max_product_guarantee(k):
    for instance in BALANCED[:8]:
        part = Partition.uniform(instance)
        optimum, _ = exact_opt_product(instance, part)
        result = max_product(instance, None, k)
        assert result.guarantee_kind == "exponent"
        assert result.ratio_guarantee == product_exponent(k)
        assert result.value >= optimum ** product_exponent(k) * (1 - 1e-9)
        assert result.value <= optimum * (1 + 1e-9)


def test_max_product_needs_large_factors():
    with pytest.raises(DomainError) as excinfo:
        max_product(encode_maxcut(nx.path_graph(3)), None, 2)
    assert excinfo.value.code == "product-below-one"


def test_max_product_degree_cap():
    with pytest.raises(CapacityError) as excinfo:
        max_product(encode_maxcut(nx.star_graph(9)), None, 2)
    assert excinfo.value.code == "degree-cap-exceeded"


def test_max_product_with_zeros_at_disallowed_labels():
    instance = Instance(
        num_vertices=3,
        q=3,
        edges=[(0, 1), (1, 2)],
        vertex_potentials=[[1.0, 2.0, 0.0], [3.0, 1.0, 0.0], [1.5, 1.25, 0.0]],
        edge_potentials=np.zeros((2, 3, 3)),
        allowed_labels=[[0, 1]] * 3,
    )
    part = Partition.uniform(instance)
    optimum, _ = exact_opt_product(instance, part)
    with warnings.catch_warnings():
        warnings.simplefilter("error", RuntimeWarning)
        result = max_product(instance, part, 2)
    assert all(label in (0, 1) for label in result.cfg.labels)
    assert result.value >= optimum ** product_exponent(2) * (1 - 1e-9)
    assert result.value <= optimum * (1 + 1e-9)


@pytest.mark.parametrize("objective", list(Objective))
def test_td_exact_matches_oracle(objective):
    for instance in PLANAR:
        optimum, _ = exact_opt(instance, objective)
        result = td_exact(instance, None, objective)
        assert result.scheme == "td"
        assert result.ratio_guarantee == 1.0
        assert math.isclose(result.energy, optimum, rel_tol=1e-9, abs_tol=1e-9)
        assert math.isclose(result.dp_bound, optimum, rel_tol=1e-9, abs_tol=1e-9)


@settings(max_examples=30)
@given(data())
def test_td_exact_on_directed_instances(data):
    instance = data.draw(strategies.instances(directed=True, max_vertices=5))
    optimum, _ = exact_opt(instance)
    assert math.isclose(td_exact(instance).energy, optimum, abs_tol=1e-9)


@settings(max_examples=30)
@given(strategies.instances(max_vertices=7), integers(1, 3))
def test_baker_max_on_random_instances(instance, k):
    optimum, _ = exact_opt(instance)
    result = baker_max(instance, None, k)
    assert result.energy >= baker_ratio(k) * optimum - 1e-9


def test_threads_do_not_change_results():
    for instance in PLANAR[:6]:
        assert baker_max(instance, None, 2, threads=4) == baker_max(
            instance, None, 2, threads=1
        )
    for instance in BALANCED[:4]:
        assert baker_min_balanced(instance, None, 2, threads=3) == (
            baker_min_balanced(instance, None, 2)
        )


def test_reruns_are_identical():
    instance = PLANAR[5]
    assert baker_max(instance, None, 3) == baker_max(instance, None, 3)


def test_negative_potentials_rejected():
    instance = Instance(
        num_vertices=2,
        q=2,
        edges=[(0, 1)],
        vertex_potentials=[[0, 1], [1, 0]],
        edge_potentials=[[[0, -1], [0, 0]]],
    )
    for solver in (baker_max, baker_min_balanced, max_product):
        with pytest.raises(DomainError) as excinfo:
            solver(instance, None, 2)
        assert excinfo.value.code == "negative-potential"


def test_unbalanced_rejected():
    with pytest.raises(DomainError) as excinfo:
        baker_min_balanced(encode_maxcut(nx.path_graph(3)), None, 2)
    assert excinfo.value.code == "unbalanced"
    assert "P = NP" in str(excinfo.value)


def test_k_range():
    with pytest.raises(ParameterError) as excinfo:
        baker_max(PLANAR[0], None, 0)
    assert excinfo.value.code == "k-range"


def test_partition_on_directed_instance():
    instance = Instance(
        num_vertices=2,
        q=2,
        edges=[(0, 1)],
        vertex_potentials=np.zeros((2, 2)),
        edge_potentials=np.ones((1, 2, 2)),
        directed=True,
    )
    with pytest.raises(ParameterError) as excinfo:
        baker_max(instance, Partition.uniform(instance), 2)
    assert excinfo.value.code == "directed-partition"


def test_capacity_error_names_the_shift():
    with pytest.raises(CapacityError) as excinfo:
        baker_max(PLANAR[5], None, 2, cap=1)
    assert excinfo.value.code == "table-cap-exceeded"
    assert "Shift" in str(excinfo.value)
