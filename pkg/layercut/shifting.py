# Copyright (C) 2026 The layercut developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Layer shifting.

Vertices are layered by breadth-first distance from a root per connected
component. For a period ``k + 2`` and an offset ``ell``, the edges between a
level congruent to ``ell`` and the next level are deleted; each remaining
component spans at most ``k + 2`` consecutive levels and is solved exactly on
a tree decomposition, optimizing only the folded functions of its interior
vertices (those not at a level congruent to ``ell`` or ``ell + 1``). The
stitched configuration is scored on the whole instance and the best offset
wins.

The same engine (:class:`Piece`, :func:`evaluate_shift`,
:func:`select_best`) drives the geometric and crossing schemes.
"""

from concurrent.futures import ThreadPoolExecutor
import logging
import math
from typing import (
    Any,
    Callable,
    Dict,
    Iterable,
    List,
    Optional,
    Sequence,
    Tuple,
    TypeVar,
    Union,
)

import attr
from attrs_strict import type_validator
import networkx as nx
import numpy as np
from typing_extensions import Final

from .dp import DEFAULT_TABLE_CAP, Factor, dp_opt, solve_factors
from .exceptions import CapacityError, DomainError, ParameterError
from .model import (
    BaseModel,
    Configuration,
    Instance,
    Objective,
    Partition,
    as_undirected,
    balance_report,
    energy,
    folded_table,
    folded_values,
    graph_of,
    incidence,
    require_nonnegative,
    resolve_partition,
)
from .treedecomp import build_pd_from_slabs, build_td

logger = logging.getLogger(__name__)

MAX_PRODUCT_DEGREE: Final = 8
"""Largest vertex degree accepted by :func:`max_product`, whose factors span
closed neighbourhoods."""

EPSILON_GUARD: Final = 1e-9

T = TypeVar("T")
R = TypeVar("R")
Shift = Union[int, Tuple[int, ...], None]


def baker_ratio(k: int) -> float:
    """Guaranteed fraction of the optimum for max-sum layer shifting.

    >>> baker_ratio(18)
    0.9
    """
    return k / (k + 2)


def min_sum_ratio(alpha: float, k: int) -> float:
    """Guaranteed ratio to the optimum for min-sum layer shifting on an
    ``alpha``-balanced instance.

    >>> min_sum_ratio(2.0, 2)
    1.5
    """
    return 1 + 2 * (alpha - 1) / (k + 2)


def product_exponent(k: int) -> float:
    """The product found is at least the optimal product raised to this
    power."""
    return k / (k + 2)


def check_epsilon(epsilon: float) -> None:
    if not 0 < epsilon < 1:
        raise ParameterError(
            "epsilon must lie in (0, 1), not %(epsilon)s",
            code="epsilon-range",
            params={"epsilon": epsilon},
        )


def k_for_epsilon(epsilon: float) -> int:
    """Smallest ``k`` with ``k / (k + 2) >= 1 - epsilon``.

    >>> k_for_epsilon(0.1)
    18
    """
    check_epsilon(epsilon)
    return max(1, math.ceil(2 * (1 - epsilon) / epsilon - EPSILON_GUARD))


def check_k(k: int, minimum: int = 1) -> None:
    if not isinstance(k, int) or k < minimum:
        raise ParameterError(
            "k must be an integer >= %(minimum)s, not %(k)r",
            code="k-range",
            params={"k": k, "minimum": minimum},
        )


@attr.s(frozen=True, slots=True)
class LayerAssignment(BaseModel):
    """Breadth-first level of every vertex, and the root of every connected
    component (ordered by smallest vertex)."""

    levels = attr.ib(type=Tuple[int, ...], converter=tuple)
    roots = attr.ib(type=Tuple[int, ...], converter=tuple)


def smallest_vertex(component: Sequence[int]) -> int:
    return min(component)


def bfs_layers(
    graph: nx.Graph, root_rule: Optional[Callable[[Sequence[int]], int]] = None
) -> LayerAssignment:
    """Breadth-first levels from one root per connected component.

    ``graph`` must have nodes ``0..n-1``. ``root_rule`` picks the root of
    each component (given as a sorted list); it defaults to the smallest
    vertex.

    >>> bfs_layers(nx.star_graph(3)).levels
    (0, 1, 1, 1)
    """
    if root_rule is None:
        root_rule = smallest_vertex
    components = sorted(sorted(c) for c in nx.connected_components(graph))
    levels: Dict[int, int] = {}
    roots = []
    for component in components:
        root = root_rule(component)
        roots.append(root)
        levels.update(nx.single_source_shortest_path_length(graph, root))
    return LayerAssignment(
        levels=[levels[v] for v in range(graph.number_of_nodes())], roots=roots
    )


@attr.s(frozen=True, slots=True)
class ShiftPlan(BaseModel):
    """Edges deleted by one offset, and the resulting components split into
    interior and boundary vertices."""

    k = attr.ib(type=int, validator=type_validator())
    ell = attr.ib(type=int, validator=type_validator())
    deleted_edges = attr.ib(type=Tuple[Tuple[int, int], ...], converter=tuple)
    components = attr.ib(type=Tuple[Tuple[int, ...], ...], converter=tuple)
    interior = attr.ib(type=Tuple[Tuple[int, ...], ...], converter=tuple)
    boundary = attr.ib(type=Tuple[Tuple[int, ...], ...], converter=tuple)


def shift_split(
    graph: nx.Graph, layers: LayerAssignment, k: int, ell: int
) -> ShiftPlan:
    """Deletes the edges from levels congruent to ``ell`` to the next level
    (modulo ``k + 2``) and splits the components.

    >>> plan = shift_split(nx.path_graph(8), bfs_layers(nx.path_graph(8)), 2, 0)
    >>> plan.deleted_edges
    ((0, 1), (4, 5))
    >>> plan.interior
    ((), (2, 3), (6, 7))
    """
    check_k(k)
    period = k + 2
    if not 0 <= ell < period:
        raise ParameterError(
            "Offset %(ell)s outside [0, %(period)s)",
            code="offset-range",
            params={"ell": ell, "period": period},
        )
    level = layers.levels
    deleted = sorted(
        (min(u, v), max(u, v))
        for u, v in graph.edges
        if abs(level[u] - level[v]) == 1 and min(level[u], level[v]) % period == ell
    )
    remaining = nx.Graph(graph)
    remaining.remove_edges_from(deleted)
    components = sorted(sorted(c) for c in nx.connected_components(remaining))
    residues = {ell, (ell + 1) % period}
    interior = [
        tuple(v for v in c if level[v] % period not in residues) for c in components
    ]
    boundary = [tuple(v for v in c if level[v] % period in residues) for c in components]
    return ShiftPlan(
        k=k,
        ell=ell,
        deleted_edges=deleted,
        components=[tuple(c) for c in components],
        interior=interior,
        boundary=boundary,
    )


@attr.s(frozen=True, slots=True)
class Piece:
    """Part of a shifted instance solved on its own: its vertices, the
    interior vertices whose folded functions are optimized, the instance
    edges kept inside it and, for slab-ordered pieces, the vertex groups of
    its path decomposition."""

    vertices = attr.ib(type=Tuple[int, ...], converter=tuple)
    interior = attr.ib(type=Tuple[int, ...], converter=tuple)
    edge_ids = attr.ib(type=Tuple[int, ...], converter=tuple)
    groups = attr.ib(type=Optional[Tuple[Tuple[int, ...], ...]], default=None)


def pieces_by_key(instance: Instance, keys: Sequence[Any], interior: Sequence[bool]):
    """Groups vertices sharing a key (``None`` keys are dropped) and keeps
    the edges whose endpoints share a key, then splits every group into
    connected components. Pieces come out ordered by smallest vertex."""
    graph = nx.Graph()
    graph.add_nodes_from(v for v in range(instance.num_vertices) if keys[v] is not None)
    kept: Dict[Tuple[int, int], List[int]] = {}
    for e, (u, v) in enumerate(instance.edges):
        if keys[u] is not None and keys[u] == keys[v]:
            graph.add_edge(u, v)
            kept.setdefault((min(u, v), max(u, v)), []).append(e)
    pieces = []
    for component in sorted(sorted(c) for c in nx.connected_components(graph)):
        members = set(component)
        edge_ids = sorted(
            e
            for (u, v), ids in kept.items()
            if u in members
            for e in ids
        )
        pieces.append(
            Piece(
                vertices=component,
                interior=[v for v in component if interior[v]],
                edge_ids=edge_ids,
            )
        )
    return pieces


def plan_pieces(instance: Instance, plan: ShiftPlan) -> List[Piece]:
    deleted = set(plan.deleted_edges)
    component_of = {}
    for index, component in enumerate(plan.components):
        for v in component:
            component_of[v] = index
    edge_ids: List[List[int]] = [[] for _ in plan.components]
    for e, (u, v) in enumerate(instance.edges):
        if (min(u, v), max(u, v)) not in deleted and component_of[u] == component_of[v]:
            edge_ids[component_of[u]].append(e)
    return [
        Piece(vertices=component, interior=interior, edge_ids=ids)
        for component, interior, ids in zip(plan.components, plan.interior, edge_ids)
    ]


PieceSolver = Callable[[Piece], Tuple[float, Sequence[int], int]]


def pairwise_solver(
    instance: Instance,
    part: Partition,
    objective: Objective,
    cap: int = DEFAULT_TABLE_CAP,
) -> PieceSolver:
    """Solves a piece with :func:`dp_opt` on the folded objective of its
    interior, on a min-fill decomposition or on the slab path decomposition
    of its groups."""

    def solve(piece: Piece) -> Tuple[float, Sequence[int], int]:
        sub = instance.restrict(piece.vertices, piece.edge_ids)
        index = {v: position for position, v in enumerate(piece.vertices)}
        graph = graph_of(sub)
        if piece.groups is not None:
            td = build_pd_from_slabs(
                [[index[v] for v in group] for group in piece.groups], graph
            )
        else:
            td = build_td(graph)
        value, cfg = dp_opt(
            sub,
            td,
            part.restrict(piece.edge_ids),
            [index[v] for v in piece.interior],
            objective,
            cap=cap,
            graph=graph,
        )
        return value, cfg.labels, td.width

    return solve


@attr.s(frozen=True, slots=True)
class ShiftOutcome:
    """Stitched result of one shift."""

    shift = attr.ib(type=Any)
    score = attr.ib(type=float)
    energy = attr.ib(type=float)
    dp_bound = attr.ib(type=float)
    cfg = attr.ib(type=Configuration)
    widths = attr.ib(type=Tuple[int, ...])
    interior_size = attr.ib(type=int)


def evaluate_shift(
    instance: Instance,
    shift: Shift,
    pieces: Sequence[Piece],
    solve: PieceSolver,
    score: Optional[Callable[[Configuration], float]] = None,
    defaults: Optional[Sequence[int]] = None,
) -> ShiftOutcome:
    """Solves every piece, stitches the labels (vertices in no piece keep
    ``defaults``, their smallest allowed label unless given) and scores the
    stitched configuration, by its energy unless ``score`` is given."""
    if defaults is None:
        labels = [domain[0] for domain in instance.domains]
    else:
        labels = list(defaults)
    bound = 0.0
    widths = []
    for piece in pieces:
        try:
            value, local, width = solve(piece)
        except CapacityError as error:
            raise CapacityError(
                "Shift %(shift)s, piece of %(size)s vertices starting at vertex "
                "%(vertex)s: %(reason)s",
                code=error.code,
                params={
                    "shift": shift,
                    "size": len(piece.vertices),
                    "vertex": piece.vertices[0],
                    "reason": str(error),
                },
            ) from error
        for v, a in zip(piece.vertices, local):
            labels[v] = a
        bound += value
        widths.append(width)
    cfg = Configuration(labels=labels)
    total = energy(instance, cfg)
    outcome = ShiftOutcome(
        shift=shift,
        score=total if score is None else score(cfg),
        energy=total,
        dp_bound=bound,
        cfg=cfg,
        widths=tuple(widths),
        interior_size=sum(len(piece.interior) for piece in pieces),
    )
    logger.debug(
        "Shift %s: score %s, energy %s, dp bound %s, widths %s",
        shift,
        outcome.score,
        total,
        bound,
        outcome.widths,
    )
    return outcome


def parallel_map(
    function: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None
) -> List[R]:
    """``[function(x) for x in items]``, on a thread pool when ``threads`` is
    above one; results keep the order of ``items``."""
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(function, items))


def select_best(outcomes: Sequence[ShiftOutcome], objective: Objective) -> ShiftOutcome:
    """First outcome with the best score."""
    best = outcomes[0]
    for outcome in outcomes[1:]:
        if objective.improves(outcome.score, best.score):
            best = outcome
    logger.info("Selected shift %s with score %s", best.shift, best.score)
    return best


@attr.s(frozen=True, slots=True)
class ApproxResult(BaseModel):
    """Outcome of an approximation scheme.

    ``value`` is the objective the scheme optimizes (the energy, or the
    product of the folded functions for :func:`max_product`); ``dp_bound``
    sums the exact piece optima of the winning shift and certifies ``value``
    from below (max-sum) without trusting ``ratio_guarantee``, which is a
    ratio or, when ``guarantee_kind`` is ``"exponent"``, an exponent of the
    optimum.
    """

    scheme = attr.ib(type=str)
    objective = attr.ib(type=Objective)
    cfg = attr.ib(type=Configuration)
    energy = attr.ib(type=float)
    value = attr.ib(type=float)
    dp_bound = attr.ib(type=float)
    ratio_guarantee = attr.ib(type=float)
    k = attr.ib(type=int)
    winning_shift = attr.ib(type=Any)
    widths = attr.ib(type=Tuple[int, ...], converter=tuple)
    shift_values = attr.ib(type=Tuple[Tuple[Any, float], ...], converter=tuple)
    interior_size = attr.ib(type=int, default=0)
    guarantee_kind = attr.ib(type=str, default="ratio")


def build_result(
    scheme: str,
    objective: Objective,
    outcomes: Sequence[ShiftOutcome],
    k: int,
    ratio: float,
) -> ApproxResult:
    best = select_best(outcomes, objective)
    return ApproxResult(
        scheme=scheme,
        objective=objective,
        cfg=best.cfg,
        energy=best.energy,
        value=best.score,
        dp_bound=best.dp_bound,
        ratio_guarantee=ratio,
        k=k,
        winning_shift=best.shift,
        widths=best.widths,
        shift_values=[(outcome.shift, outcome.score) for outcome in outcomes],
        interior_size=best.interior_size,
    )


def _layered(
    instance: Instance,
    part: Optional[Partition],
    root_rule,
) -> Tuple[Instance, Partition, nx.Graph, LayerAssignment]:
    instance = as_undirected(instance, part)
    part = resolve_partition(instance, part)
    graph = graph_of(instance)
    return instance, part, graph, bfs_layers(graph, root_rule)


def _shift_loop(
    instance: Instance,
    part: Partition,
    graph: nx.Graph,
    layers: LayerAssignment,
    k: int,
    objective: Objective,
    cap: int,
    threads: Optional[int],
) -> List[ShiftOutcome]:
    solve = pairwise_solver(instance, part, objective, cap)

    def evaluate(ell: int) -> ShiftOutcome:
        plan = shift_split(graph, layers, k, ell)
        return evaluate_shift(instance, ell, plan_pieces(instance, plan), solve)

    return parallel_map(evaluate, range(k + 2), threads)


def baker_max(
    instance: Instance,
    part: Optional[Partition],
    k: int,
    *,
    cap: int = DEFAULT_TABLE_CAP,
    threads: Optional[int] = None,
    root_rule: Optional[Callable[[Sequence[int]], int]] = None,
) -> ApproxResult:
    """Max-sum layer shifting: the energy found is at least ``k / (k + 2)``
    times the optimum.

    ``part`` defaults to the uniform partition.

    Raises:
        DomainError: on a negative potential.
        ParameterError: if ``k < 1``.
        CapacityError: when a piece is too wide for the table cap.
    """
    check_k(k)
    require_nonnegative(instance, "baker_max")
    instance, part, graph, layers = _layered(instance, part, root_rule)
    outcomes = _shift_loop(
        instance, part, graph, layers, k, Objective.MAX, cap, threads
    )
    return build_result("baker", Objective.MAX, outcomes, k, baker_ratio(k))


def baker_min_balanced(
    instance: Instance,
    part: Optional[Partition],
    k: int,
    *,
    cap: int = DEFAULT_TABLE_CAP,
    threads: Optional[int] = None,
    root_rule: Optional[Callable[[Sequence[int]], int]] = None,
) -> ApproxResult:
    """Min-sum layer shifting on an alpha-balanced instance: the energy found
    is at most ``1 + 2 (alpha - 1) / (k + 2)`` times the optimum.

    Raises:
        DomainError: on a negative potential, or when some folded function
            has a zero minimum without vanishing (no constant-factor
            approximation exists for min-sum of unbalanced folded
            functions unless P = NP).
    """
    check_k(k)
    require_nonnegative(instance, "baker_min_balanced")
    instance, part, graph, layers = _layered(instance, part, root_rule)
    report = balance_report(instance, part)
    if not report.balanced:
        raise DomainError(
            "Instance is unbalanced: min-sum of unbalanced f_i admits no "
            "constant-factor approximation unless P = NP",
            code="unbalanced",
        )
    outcomes = _shift_loop(
        instance, part, graph, layers, k, Objective.MIN, cap, threads
    )
    return build_result(
        "baker",
        Objective.MIN,
        outcomes,
        k,
        min_sum_ratio(report.alpha_star, k),
    )


def max_product(
    instance: Instance,
    part: Optional[Partition],
    k: int,
    *,
    cap: int = DEFAULT_TABLE_CAP,
    threads: Optional[int] = None,
    root_rule: Optional[Callable[[Sequence[int]], int]] = None,
) -> ApproxResult:
    """Maximizes the product of the folded functions by layer shifting on
    their logarithms; the product found is at least the optimal product to
    the power ``k / (k + 2)``.

    Each interior folded function becomes one factor over its closed
    neighbourhood, so the decomposition of every piece is built on the
    graph where those neighbourhoods are cliques.

    Raises:
        DomainError: if some folded function can drop below 1.
        CapacityError: if a vertex has more than :data:`MAX_PRODUCT_DEGREE`
            neighbours.
    """
    check_k(k)
    require_nonnegative(instance, "max_product")
    instance, part, graph, layers = _layered(instance, part, root_rule)
    degree = max((d for _, d in graph.degree), default=0)
    if degree > MAX_PRODUCT_DEGREE:
        raise CapacityError(
            "max_product supports degrees up to %(cap)s, found %(degree)s",
            code="degree-cap-exceeded",
            params={"cap": MAX_PRODUCT_DEGREE, "degree": degree},
        )
    report = balance_report(instance, part)
    low = min(report.balancers, default=1.0)
    if low < 1:
        raise DomainError(
            "max_product needs every f_i >= 1; the smallest minimum is %(low)g",
            code="product-below-one",
            params={"low": low},
        )
    incident = incidence(instance)
    logs = [
        folded_table(instance, part, i, incident=incident)
        for i in range(instance.num_vertices)
    ]
    # entries at disallowed labels may be 0; their logarithm is -inf
    with np.errstate(divide="ignore"):
        logs = [(scope, np.log(table)) for scope, table in logs]

    def solve(piece: Piece) -> Tuple[float, Sequence[int], int]:
        index = {v: position for position, v in enumerate(piece.vertices)}
        sub = instance.restrict(piece.vertices, piece.edge_ids)
        augmented = graph_of(sub)
        factors = []
        for i in piece.interior:
            scope = [index[v] for v in logs[i][0]]
            augmented.add_edges_from(
                (a, b) for a in scope for b in scope if a < b
            )
            factors.append(Factor.create(scope, logs[i][1]))
        td = build_td(augmented)
        value, cfg = solve_factors(
            sub.num_vertices, sub.q, sub.domains, factors, td, Objective.MAX, cap=cap
        )
        return value, cfg.labels, td.width

    def log_product(cfg: Configuration) -> float:
        with np.errstate(divide="ignore"):
            return float(np.sum(np.log(folded_values(instance, part, cfg))))

    def evaluate(ell: int) -> ShiftOutcome:
        plan = shift_split(graph, layers, k, ell)
        return evaluate_shift(
            instance, ell, plan_pieces(instance, plan), solve, score=log_product
        )

    outcomes = parallel_map(evaluate, range(k + 2), threads)
    result = build_result(
        "baker-product", Objective.MAX, outcomes, k, product_exponent(k)
    )
    return attr.evolve(
        result,
        value=float(np.exp(result.value)),
        dp_bound=float(np.exp(result.dp_bound)),
        shift_values=[(shift, float(np.exp(v))) for shift, v in result.shift_values],
        guarantee_kind="exponent",
    )


def td_exact(
    instance: Instance,
    part: Optional[Partition] = None,
    objective: Objective = Objective.MAX,
    *,
    cap: int = DEFAULT_TABLE_CAP,
) -> ApproxResult:
    """Exact optimum of the energy by one dynamic program over a min-fill
    decomposition of the whole instance."""
    instance = as_undirected(instance, part)
    part = resolve_partition(instance, part)
    piece = Piece(
        vertices=range(instance.num_vertices),
        interior=range(instance.num_vertices),
        edge_ids=range(instance.m),
    )
    outcome = evaluate_shift(
        instance, None, [piece], pairwise_solver(instance, part, objective, cap)
    )
    return build_result("td", objective, [outcome], 0, 1.0)
