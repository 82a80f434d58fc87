# Copyright (C) 2026 The layercut developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Graphs of d-dimensional balls and grid shifting over them.

Balls are joined in the intersection graph when their distance is at most
the mean of their diameters, and ball ``i`` points to ball ``j`` in the
interference graph when ``j``'s center lies within ``i``'s ball. A grid of
cube cells of side ``d_max`` (intersection) or ``d_max / 2`` (interference)
keeps every edge between cells whose indices differ by at most one per axis.

:func:`geo_solve` shifts the cell residues of the first ``d - 1`` axes
modulo ``k + 2`` and solves each remaining tube on the path decomposition
given by its slabs along the last axis.
"""

from enum import Enum
import itertools
import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import attr
from attrs_strict import type_validator
import networkx as nx
import numpy as np
from typing_extensions import Final

from .dp import DEFAULT_TABLE_CAP
from .exceptions import (
    CapacityError,
    ConsistencyError,
    DomainError,
    ParameterError,
    ValidationError,
)
from .model import (
    BaseModel,
    Instance,
    Objective,
    Partition,
    as_undirected,
    balance_report,
    require_nonnegative,
    resolve_partition,
)
from .shifting import (
    EPSILON_GUARD,
    ApproxResult,
    build_result,
    check_epsilon,
    check_k,
    evaluate_shift,
    pairwise_solver,
    parallel_map,
    pieces_by_key,
)

logger = logging.getLogger(__name__)

SNAP_TOLERANCE: Final = 1e-12
"""Coordinates this close to a grid plane are taken to lie on it."""

ORIGIN_SEARCH_CAP: Final = 10**4
"""Largest number of candidate origins :func:`best_origin` evaluates
jointly before falling back to one axis at a time."""

AUTO_ORIGIN: Final = "auto"
"""Origin value asking :func:`geo_solve` to search for the grid origin."""


class GraphMode(Enum):
    INTERSECTION = "intersection"
    INTERFERENCE = "interference"


def _freeze_points(points) -> Tuple[Tuple[float, ...], ...]:
    return tuple(tuple(float(x) for x in point) for point in points)


@attr.s(frozen=True, slots=True)
class BallSet(BaseModel):
    """Balls in ``d`` dimensions, given by center and diameter."""

    d = attr.ib(type=int, validator=type_validator())
    centers = attr.ib(type=Tuple[Tuple[float, ...], ...], converter=_freeze_points)
    diameters = attr.ib(
        type=Tuple[float, ...], converter=lambda xs: tuple(float(x) for x in xs)
    )

    def __attrs_post_init__(self):
        if self.d < 1:
            raise ValidationError("Dimension must be at least 1", code="dimension")
        if len(self.centers) != len(self.diameters):
            raise ValidationError(
                "%(centers)s centers for %(diameters)s diameters",
                code="ball-count",
                params={
                    "centers": len(self.centers),
                    "diameters": len(self.diameters),
                },
            )
        for i, (center, diameter) in enumerate(zip(self.centers, self.diameters)):
            if len(center) != self.d:
                raise ValidationError(
                    "Ball %(i)s has a %(found)s-dimensional center",
                    code="dimension",
                    params={"i": i, "found": len(center)},
                )
            if not all(math.isfinite(x) for x in center):
                raise ValidationError(
                    "Ball %(i)s has a non-finite center", code="non-finite", params={"i": i}
                )
            if not (math.isfinite(diameter) and diameter > 0):
                raise ValidationError(
                    "Ball %(i)s has diameter %(diameter)s, must be positive",
                    code="diameter",
                    params={"i": i, "diameter": diameter},
                )

    @property
    def n(self) -> int:
        return len(self.centers)

    @property
    def d_max(self) -> float:
        return max(self.diameters, default=0.0)

    def points(self) -> np.ndarray:
        return np.array(self.centers, dtype=np.float64).reshape(self.n, self.d)

    def distances(self) -> np.ndarray:
        points = self.points()
        return np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=-1))


def intersection_graph(balls: BallSet) -> nx.Graph:
    """Balls ``i`` and ``j`` are adjacent when their distance is at most
    ``(d_i + d_j) / 2``."""
    graph = nx.Graph()
    graph.add_nodes_from(range(balls.n))
    distances = balls.distances()
    diameters = np.array(balls.diameters)
    reach = (diameters[:, None] + diameters[None, :]) / 2
    for i, j in zip(*np.nonzero(np.triu(distances <= reach, k=1))):
        graph.add_edge(int(i), int(j))
    return graph


def interference_graph(balls: BallSet) -> nx.DiGraph:
    """Arc ``i -> j`` when the distance is at most ``d_i / 2``."""
    graph = nx.DiGraph()
    graph.add_nodes_from(range(balls.n))
    distances = balls.distances()
    reach = np.array(balls.diameters)[:, None] / 2
    within = distances <= reach
    np.fill_diagonal(within, False)
    for i, j in zip(*np.nonzero(within)):
        graph.add_edge(int(i), int(j))
    return graph


def mode_graph(balls: BallSet, mode: GraphMode) -> nx.Graph:
    """Undirected graph of ``balls`` under ``mode``."""
    if mode is GraphMode.INTERSECTION:
        return intersection_graph(balls)
    return nx.Graph(interference_graph(balls).to_undirected())


def cell_size(balls: BallSet, mode: GraphMode) -> float:
    if mode is GraphMode.INTERSECTION:
        return balls.d_max
    return balls.d_max / 2


def cell_indices(
    points: np.ndarray, origin: Sequence[float], size: float
) -> np.ndarray:
    """Per axis, the largest ``c`` with ``origin + c * size < x``: points on
    a grid plane (up to :data:`SNAP_TOLERANCE`) belong to the lower cell."""
    scaled = (points - np.asarray(origin, dtype=np.float64)) / size
    nearest = np.round(scaled)
    on_plane = np.abs(scaled - nearest) * size <= SNAP_TOLERANCE
    return np.where(on_plane, nearest - 1, np.ceil(scaled) - 1).astype(np.int64)


@attr.s(frozen=True, slots=True)
class GridDecomposition(BaseModel):
    mode = attr.ib(type=GraphMode)
    cell_size = attr.ib(type=float)
    origin = attr.ib(type=Tuple[float, ...], converter=lambda xs: tuple(map(float, xs)))
    cell_index = attr.ib(type=Tuple[Tuple[int, ...], ...])
    density = attr.ib(type=int)

    def thickness(self, axis: int) -> int:
        """Largest number of centers in one slab orthogonal to ``axis``."""
        counts: Dict[int, int] = {}
        for index in self.cell_index:
            counts[index[axis]] = counts.get(index[axis], 0) + 1
        return max(counts.values(), default=0)


def grid_decompose(
    balls: BallSet,
    mode: GraphMode = GraphMode.INTERSECTION,
    origin: Optional[Sequence[float]] = None,
) -> GridDecomposition:
    """Assigns every center to its grid cell.

    >>> balls = BallSet(d=1, centers=[[0.1], [1.5], [1.0]], diameters=[1, 1, 1])
    >>> grid_decompose(balls).cell_index
    ((0,), (1,), (0,))
    """
    if origin is None:
        origin = (0.0,) * balls.d
    size = cell_size(balls, mode)
    if balls.n == 0:
        return GridDecomposition(mode, size, origin, (), 0)
    cells = cell_indices(balls.points(), origin, size)
    index = tuple(tuple(int(c) for c in row) for row in cells)
    occupancy: Dict[Tuple[int, ...], int] = {}
    for row in index:
        occupancy[row] = occupancy.get(row, 0) + 1
    return GridDecomposition(
        mode=mode,
        cell_size=size,
        origin=origin,
        cell_index=index,
        density=max(occupancy.values()),
    )


def thickness(
    balls: BallSet,
    axis: int,
    mode: GraphMode = GraphMode.INTERSECTION,
    origin: Optional[Sequence[float]] = None,
) -> int:
    return grid_decompose(balls, mode, origin).thickness(axis)


def min_separation(balls: BallSet) -> float:
    """Smallest distance between two centers (``inf`` for fewer than two
    balls)."""
    if balls.n < 2:
        return math.inf
    distances = balls.distances()
    return float(distances[np.triu_indices(balls.n, k=1)].min())


def best_origin(
    balls: BallSet,
    mode: GraphMode = GraphMode.INTERSECTION,
    *,
    cap: int = ORIGIN_SEARCH_CAP,
) -> Tuple[float, ...]:
    """Grid origin of smallest density among the offsets that put some
    center on a grid plane (plus the zero offset), per axis.

    The candidate origins are tried jointly in lexicographic order when
    there are at most ``cap`` of them; otherwise each axis independently
    minimizes its slab thickness. Ties keep the earlier candidate.
    """
    if balls.n == 0:
        return (0.0,) * balls.d
    size = cell_size(balls, mode)
    points = balls.points()
    candidates = [
        sorted({0.0, *(float(x) for x in np.mod(points[:, axis], size))})
        for axis in range(balls.d)
    ]
    if math.prod(len(c) for c in candidates) <= cap:
        best, best_density = None, None
        for origin in itertools.product(*candidates):
            density = grid_decompose(balls, mode, origin).density
            if best_density is None or density < best_density:
                best, best_density = origin, density
        assert best is not None
    else:
        best = tuple(
            min(
                candidates[axis],
                key=lambda offset: _axis_thickness(points[:, axis], offset, size),
            )
            for axis in range(balls.d)
        )
    logger.info("Grid origin %s selected for %d balls", best, balls.n)
    return tuple(best)


def _axis_thickness(values: np.ndarray, offset: float, size: float) -> int:
    cells = cell_indices(values[:, None], [offset], size)[:, 0]
    return int(np.unique(cells, return_counts=True)[1].max())


def geo_ratio(k: int, d: int) -> float:
    """Guaranteed fraction of the optimum for max-sum grid shifting.

    >>> geo_ratio(2, 2)
    0.5
    """
    return (k / (k + 2)) ** (d - 1)


def geo_min_ratio(alpha: float, k: int, d: int) -> float:
    """Guaranteed ratio to the optimum for min-sum grid shifting on an
    ``alpha``-balanced instance."""
    return 1 + (alpha - 1) * (1 - (k / (k + 2)) ** (d - 1))


def geo_k_for_epsilon(epsilon: float, d: int) -> int:
    """Smallest ``k`` with ``(k / (k + 2)) ** (d - 1) >= 1 - epsilon``.

    >>> geo_k_for_epsilon(0.19, 3)
    18
    """
    check_epsilon(epsilon)
    if d <= 1:
        return 1
    rho = (1 - epsilon) ** (1 / (d - 1))
    return max(1, math.ceil(2 * rho / (1 - rho) - EPSILON_GUARD))


def _check_consistency(instance: Instance, balls: BallSet, mode: GraphMode) -> None:
    if instance.num_vertices != balls.n:
        raise ConsistencyError(
            "Instance has %(n)s vertices for %(balls)s balls",
            code="ball-count",
            params={"n": instance.num_vertices, "balls": balls.n},
        )
    expected = {tuple(sorted(e)) for e in mode_graph(balls, mode).edges}
    found = {(min(u, v), max(u, v)) for u, v in instance.edges}
    for label, difference in (
        ("missing from the instance", expected - found),
        ("absent from the ball graph", found - expected),
    ):
        if difference:
            raise ConsistencyError(
                "Edge %(edge)s is %(label)s (%(mode)s mode)",
                code="graph-mismatch",
                params={
                    "edge": min(difference),
                    "label": label,
                    "mode": mode.value,
                },
            )


def geo_solve(
    instance: Instance,
    balls: BallSet,
    part: Optional[Partition],
    k: int,
    objective: Objective = Objective.MAX,
    *,
    mode: GraphMode = GraphMode.INTERSECTION,
    origin: Union[Sequence[float], str, None] = None,
    cap: int = DEFAULT_TABLE_CAP,
    threads: Optional[int] = None,
) -> ApproxResult:
    """Grid shifting over ``(k + 2) ** (d - 1)`` shift tuples.

    ``origin`` places the grid; ``"auto"`` picks it with :func:`best_origin`.

    For every tuple, edges between cells at residues ``ell_a`` and
    ``ell_a + 1`` (modulo ``k + 2``) along each of the first ``d - 1`` axes
    are deleted; interior vertices are the ones at neither residue on any
    shifted axis. The best tuple wins, ties going to the lexicographically
    smallest.

    Raises:
        ConsistencyError: if the instance graph is not the ball graph.
        DomainError: on a negative potential (MAX) or an unbalanced
            instance (MIN).
        ParameterError: on an origin string other than ``"auto"``.
        CapacityError: when a tube is too wide for the table cap.
    """
    check_k(k)
    if objective is Objective.MAX:
        require_nonnegative(instance, "geo_solve")
    instance = as_undirected(instance, part)
    part = resolve_partition(instance, part)
    _check_consistency(instance, balls, mode)
    if objective is Objective.MAX:
        ratio = geo_ratio(k, balls.d)
    else:
        report = balance_report(instance, part)
        if not report.balanced:
            raise DomainError(
                "Instance is unbalanced: min-sum of unbalanced f_i admits no "
                "constant-factor approximation unless P = NP",
                code="unbalanced",
            )
        ratio = geo_min_ratio(report.alpha_star, k, balls.d)

    if isinstance(origin, str):
        if origin != AUTO_ORIGIN:
            raise ParameterError(
                "Unknown grid origin %(origin)r, expected coordinates or %(auto)r",
                code="origin",
                params={"origin": origin, "auto": AUTO_ORIGIN},
            )
        origin = best_origin(balls, mode)
    grid = grid_decompose(balls, mode, origin)
    cells = np.array(grid.cell_index, dtype=np.int64).reshape(balls.n, balls.d)
    period = k + 2
    axes = balls.d - 1
    slab = cells[:, axes] if balls.n else np.zeros(0, dtype=np.int64)
    solve = pairwise_solver(instance, part, objective, cap)

    def evaluate(shift: Tuple[int, ...]):
        offset = cells[:, :axes] - np.array(shift, dtype=np.int64) - 1
        blocks = np.floor_divide(offset, period)
        position = np.mod(offset, period)
        interior = np.all((position >= 1) & (position <= k), axis=1)
        keys = [tuple(int(b) for b in row) for row in blocks]
        pieces = []
        for piece in pieces_by_key(instance, keys, interior.tolist()):
            slabs: Dict[int, List[int]] = {}
            for v in piece.vertices:
                slabs.setdefault(int(slab[v]), []).append(v)
            low, high = min(slabs), max(slabs)
            groups = tuple(tuple(slabs.get(s, ())) for s in range(low, high + 1))
            pieces.append(attr.evolve(piece, groups=groups))
        return evaluate_shift(instance, shift, pieces, solve)

    shifts = list(itertools.product(range(period), repeat=axes))
    try:
        outcomes = parallel_map(evaluate, shifts, threads)
    except CapacityError as error:
        raise CapacityError(
            "%(reason)s (grid density %(density)s, path width bound %(bound)s)",
            code=error.code,
            params={
                "reason": str(error),
                "density": grid.density,
                "bound": width_bound(k, balls.d, grid.density),
            },
        ) from error
    result = build_result("geo", objective, outcomes, k, ratio)
    logger.info(
        "Grid shifting over %d tuples, density %d, widths %s",
        len(shifts),
        grid.density,
        result.widths,
    )
    return result


def width_bound(k: int, d: int, density: int) -> int:
    """Bound on the width of the slab path decompositions of a tube."""
    return 2 * (k + 2) ** (d - 1) * density - 1


def ball_set_from_dict(document: Dict[str, Any]) -> Tuple[BallSet, GraphMode, Any]:
    """Reads a ball set document: ``d``, ``centers``, ``diameters`` and the
    optional ``mode`` and ``origin``, which may be ``"auto"``."""
    document = dict(document)
    mode = GraphMode(document.pop("mode", GraphMode.INTERSECTION.value))
    origin = document.pop("origin", None)
    return BallSet.from_dict(document), mode, origin
