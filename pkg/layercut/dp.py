# Copyright (C) 2026 The layercut developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Exact optimization on a tree decomposition.

The objective is a sum of local factors, each a dense table over a small
scope of vertices. Every factor is charged to a single bag that holds its
whole scope: the deepest of the bags where its scope vertices first appear
when walking down from the root. Tables are combined bottom-up, the
vertices a bag shares with no ancestor are maximized (or minimized) out,
and the optimal configuration is recovered top-down.

Bags may have any number of children; tables of sibling subtrees are
independent and combined in child index order.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import attr
import networkx as nx
import numpy as np
from typing_extensions import Final

from .exceptions import CapacityError, PreconditionError
from .model import (
    BaseModel,
    Configuration,
    Instance,
    Objective,
    Partition,
    edge_coefficients,
    graph_of,
    vertex_mask,
)
from .treedecomp import TreeDecomposition, validate_td

logger = logging.getLogger(__name__)

DEFAULT_TABLE_CAP: Final = 10**8
"""Largest total number of table entries (summed over bags) a dynamic
program may allocate."""


def _sorted_table(scope, table) -> Tuple[Tuple[int, ...], np.ndarray]:
    order = sorted(range(len(scope)), key=lambda axis: scope[axis])
    return tuple(scope[axis] for axis in order), np.transpose(table, order)


@attr.s(frozen=True, slots=True)
class Factor(BaseModel):
    """A dense table over ``scope``; axis ``t`` of ``table`` is indexed by the
    label of ``scope[t]``. Scopes are kept in ascending vertex order."""

    scope = attr.ib(type=Tuple[int, ...])
    table = attr.ib(
        type=np.ndarray, eq=attr.cmp_using(eq=np.array_equal), hash=False
    )

    @classmethod
    def create(cls, scope: Sequence[int], table) -> "Factor":
        scope, table = _sorted_table(
            tuple(int(v) for v in scope), np.asarray(table, dtype=np.float64)
        )
        return cls(scope=scope, table=table)


@attr.s(frozen=True, slots=True)
class DpTable(BaseModel):
    """Table of one bag: the best value of its subtree for every labeling of
    the bag vertices (axes in ascending vertex order)."""

    bag = attr.ib(type=int)
    variables = attr.ib(type=Tuple[int, ...])
    values = attr.ib(
        type=np.ndarray, eq=attr.cmp_using(eq=np.array_equal), hash=False
    )


def _expand(table: np.ndarray, scope: Sequence[int], variables: Sequence[int], q):
    present = set(scope)
    return table.reshape([q if v in present else 1 for v in variables])


def _rooted(td: TreeDecomposition) -> Tuple[List[int], Dict[int, Optional[int]]]:
    """Bags in breadth-first order from the root, with their parents."""
    tree = td.tree()
    order = [td.root]
    parent: Dict[int, Optional[int]] = {td.root: None}
    for bag in order:
        for child in sorted(tree.neighbors(bag)):
            if child not in parent:
                parent[child] = bag
                order.append(child)
    return order, parent


def solve_factors(
    num_vertices: int,
    q: int,
    domains: Sequence[Sequence[int]],
    factors: Sequence[Factor],
    td: TreeDecomposition,
    objective: Objective = Objective.MAX,
    *,
    cap: int = DEFAULT_TABLE_CAP,
) -> Tuple[float, Configuration]:
    """Optimizes the sum of ``factors`` over labelings of ``0..num_vertices-1``
    where vertex ``v`` takes labels in ``domains[v]``.

    ``td`` must be a tree decomposition covering every vertex, in which the
    scope of each factor fits in some bag. Ties are resolved toward the
    first optimal entry in ascending label order, bag by bag from the root.

    Raises:
        CapacityError: when the tables would exceed ``cap`` entries.
        PreconditionError: when a vertex is in no bag, or no bag holds the
            scope of a factor.
    """
    variables = td.bags
    total = sum(q ** len(bag) for bag in variables)
    if total > cap:
        raise CapacityError(
            "Dynamic program needs %(total)s table entries (largest bag has "
            "%(size)s vertices, q=%(q)s), above the cap of %(cap)s",
            code="table-cap-exceeded",
            params={
                "total": total,
                "size": td.width + 1,
                "q": q,
                "cap": cap,
            },
        )

    order, parent = _rooted(td)
    depth = {td.root: 0}
    top: Dict[int, int] = {}
    for bag in order:
        if parent[bag] is not None:
            depth[bag] = depth[parent[bag]] + 1
        for v in variables[bag]:
            top.setdefault(v, bag)
    missing = [v for v in range(num_vertices) if v not in top]
    if missing:
        raise PreconditionError(
            "Vertex %(vertex)s is in no bag",
            code="vertex-uncovered",
            params={"vertex": missing[0]},
        )

    constant = 0.0
    charged: Dict[int, List[Factor]] = {bag: [] for bag in order}
    for factor in factors:
        if not factor.scope:
            constant += float(factor.table)
            continue
        bag = max((top[v] for v in factor.scope), key=lambda b: depth[b])
        if not set(factor.scope) <= set(variables[bag]):
            raise PreconditionError(
                "No bag holds the scope %(scope)s",
                code="scope-uncovered",
                params={"scope": factor.scope},
            )
        charged[bag].append(factor)

    children: Dict[int, List[int]] = {bag: [] for bag in order}
    for bag in order:
        if parent[bag] is not None:
            children[parent[bag]].append(bag)

    tables: Dict[int, DpTable] = {}
    messages: Dict[int, Tuple[Tuple[int, ...], np.ndarray]] = {}
    for bag in reversed(order):
        scope = variables[bag]
        values = np.zeros((q,) * len(scope))
        for v in scope:
            if top[v] == bag and len(domains[v]) < q:
                penalty = np.full(q, objective.worst)
                penalty[list(domains[v])] = 0.0
                values = values + _expand(penalty, (v,), scope, q)
        for factor in charged[bag]:
            values = values + _expand(factor.table, factor.scope, scope, q)
        for child in children[bag]:
            separator, message = messages.pop(child)
            values = values + _expand(message, separator, scope, q)
        tables[bag] = DpTable(bag=bag, variables=scope, values=values)
        if parent[bag] is None:
            continue
        kept = set(variables[parent[bag]])
        forgotten = tuple(axis for axis, v in enumerate(scope) if v not in kept)
        separator = tuple(v for v in scope if v in kept)
        if forgotten:
            values = objective.reduce(values, axis=forgotten)
        messages[bag] = (separator, values)

    root_values = tables[td.root].values
    value = float(objective.reduce(root_values)) + constant

    labels: List[Optional[int]] = [None] * num_vertices
    for bag in order:
        table = tables[bag]
        free = [v for v in table.variables if labels[v] is None]
        if not free:
            continue
        index = tuple(
            slice(None) if labels[v] is None else labels[v] for v in table.variables
        )
        restricted = table.values[index]
        best = np.unravel_index(objective.arg(restricted), restricted.shape)
        for v, a in zip(free, best):
            labels[v] = int(a)
    return value, Configuration(labels=labels)


def pairwise_factors(
    instance: Instance, part: Partition, vertices: Sequence[int]
) -> List[Factor]:
    """Factors of the folded objective over ``vertices``: the vertex
    potential of every member and each edge potential weighted by
    ``alpha_uv * [u in U] + alpha_vu * [v in U]``."""
    mask = vertex_mask(instance, vertices)
    coefficients = edge_coefficients(instance, part, np.flatnonzero(mask))
    factors = [
        Factor.create((i,), instance.vertex_potentials[i])
        for i in np.flatnonzero(mask)
    ]
    for e, (u, v) in enumerate(instance.edges):
        if coefficients[e] > 0:
            factors.append(
                Factor.create((u, v), coefficients[e] * instance.edge_potentials[e])
            )
    return factors


def dp_opt(
    instance: Instance,
    td: TreeDecomposition,
    part: Partition,
    vertices: Sequence[int],
    objective: Objective = Objective.MAX,
    *,
    cap: int = DEFAULT_TABLE_CAP,
    graph: Optional[nx.Graph] = None,
) -> Tuple[float, Configuration]:
    """Exact optimum of the folded energy over ``vertices``, and a
    configuration attaining it.

    With ``vertices`` empty every vertex takes its smallest allowed label.

    Raises:
        PreconditionError: if ``td`` is not a tree decomposition of the
            instance graph.
        CapacityError: if the tables exceed ``cap`` entries.
    """
    part.check_for(instance)
    violation = validate_td(graph if graph is not None else graph_of(instance), td)
    if violation is not None:
        raise PreconditionError(
            "Invalid tree decomposition (%(violation)s)",
            code=violation.condition.value,
            params={"violation": str(violation)},
        )
    return solve_factors(
        instance.num_vertices,
        instance.q,
        instance.domains,
        pairwise_factors(instance, part, vertices),
        td,
        objective,
        cap=cap,
    )
