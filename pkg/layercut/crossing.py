# Copyright (C) 2026 The layercut developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Straight-line drawings with few crossings per edge.

A drawing places every vertex at a point of the plane; its crossing
parameter ``phi`` is the largest number of crossings on a single edge.
Replacing every crossing with a new vertex yields a planar graph, which is
layered breadth-first. For a period ``k`` and an offset ``ell``, the levels
congruent to ``ell, ..., ell + phi - 1`` are removed and every band of
levels in between is solved exactly on the original graph it induces.
"""

import itertools
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import attr
from attrs_strict import type_validator
import networkx as nx
import numpy as np

from .dp import DEFAULT_TABLE_CAP
from .exceptions import (
    ConsistencyError,
    DegeneracyError,
    ParameterError,
    ValidationError,
)
from .model import (
    BaseModel,
    Configuration,
    Instance,
    Objective,
    Partition,
    as_undirected,
    energy,
    graph_of,
    incidence,
    require_nonnegative,
    resolve_partition,
    to_undirected,
)
from .shifting import (
    ApproxResult,
    ShiftOutcome,
    bfs_layers,
    build_result,
    check_k,
    evaluate_shift,
    pairwise_solver,
    parallel_map,
    pieces_by_key,
)

logger = logging.getLogger(__name__)

Point = Tuple[float, float]

COINCIDENCE_TOLERANCE = 1e-12
"""Crossing points closer than this are considered the same point."""


@attr.s(frozen=True, slots=True)
class Crossing(BaseModel):
    """Proper intersection of edges ``edge_a < edge_b`` at ``point``, found
    at parameter ``t_a`` along ``edge_a`` and ``t_b`` along ``edge_b``
    (0 at the tail, 1 at the head)."""

    edge_a = attr.ib(type=int, validator=type_validator())
    edge_b = attr.ib(type=int, validator=type_validator())
    point = attr.ib(type=Tuple[float, float], converter=lambda p: tuple(map(float, p)))
    t_a = attr.ib(type=float, converter=float)
    t_b = attr.ib(type=float, converter=float)

    def parameter(self, edge: int) -> float:
        return self.t_a if edge == self.edge_a else self.t_b


@attr.s(frozen=True, slots=True)
class Drawing(BaseModel):
    coords = attr.ib(
        type=Tuple[Point, ...],
        converter=lambda points: tuple(tuple(map(float, p)) for p in points),
    )
    edges = attr.ib(
        type=Tuple[Tuple[int, int], ...],
        converter=lambda edges: tuple((int(u), int(v)) for u, v in edges),
    )
    crossings = attr.ib(
        type=Tuple[Crossing, ...],
        converter=lambda crossings: tuple(
            c if isinstance(c, Crossing) else Crossing.from_dict(c) for c in crossings
        ),
        factory=tuple,
    )

    @crossings.validator
    def check_crossings(self, attribute, value):
        for crossing in value:
            for edge, t in ((crossing.edge_a, crossing.t_a), (crossing.edge_b, crossing.t_b)):
                if not 0 <= edge < len(self.edges):
                    raise ValidationError(
                        "Crossing references unknown edge %(edge)s",
                        code="unknown-edge",
                        params={"edge": edge},
                    )
                if not 0 < t < 1:
                    raise ValidationError(
                        "Crossing parameter %(t)s on edge %(edge)s outside (0, 1)",
                        code="crossing-parameter",
                        params={"t": t, "edge": edge},
                    )

    def crossings_on(self, edge: int) -> List[int]:
        """Indices of the crossings on ``edge``, ordered along it."""
        on_edge = [
            index
            for index, c in enumerate(self.crossings)
            if edge in (c.edge_a, c.edge_b)
        ]
        return sorted(on_edge, key=lambda index: self.crossings[index].parameter(edge))

    @property
    def phi(self) -> int:
        """Largest number of crossings on one edge."""
        counts = [0] * len(self.edges)
        for c in self.crossings:
            counts[c.edge_a] += 1
            counts[c.edge_b] += 1
        return max(counts, default=0)


def _cross(a: np.ndarray, b: np.ndarray) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _orientation(p: np.ndarray, q: np.ndarray, r: np.ndarray) -> float:
    return _cross(q - p, r - p)


def _strictly_inside(p: np.ndarray, q: np.ndarray, w: np.ndarray) -> bool:
    """``w`` lies on the open segment ``pq``."""
    if _orientation(p, q, w) != 0:
        return False
    return 0 < float(np.dot(w - p, q - p)) < float(np.dot(q - p, q - p))


def check_shared_crossings(crossings: Sequence[Crossing]) -> None:
    """Raises on two crossings within ``COINCIDENCE_TOLERANCE`` of each
    other, searching the neighbouring cells of a grid of that spacing."""
    cells: Dict[Tuple[int, int], List[int]] = {}
    for i, crossing in enumerate(crossings):
        x, y = (math.floor(c / COINCIDENCE_TOLERANCE) for c in crossing.point)
        for dx, dy in itertools.product((-1, 0, 1), repeat=2):
            for j in cells.get((x + dx, y + dy), ()):
                other = crossings[j]
                if math.dist(crossing.point, other.point) <= COINCIDENCE_TOLERANCE:
                    raise DegeneracyError(
                        "Crossings of edges %(first)s and %(second)s share a point",
                        code="shared-crossing",
                        params={
                            "first": (other.edge_a, other.edge_b),
                            "second": (crossing.edge_a, crossing.edge_b),
                        },
                    )
        cells.setdefault((x, y), []).append(i)


def compute_crossings(coords: Sequence[Sequence[float]], edges) -> Drawing:
    """All proper crossings of the straight-line drawing of ``edges``.

    >>> square = [(0, 0), (1, 0), (1, 1), (0, 1)]
    >>> compute_crossings(square, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]).phi
    1

    Raises:
        DegeneracyError: on coincident vertices, a vertex inside an edge,
            overlapping collinear edges, or two crossings at one point.
    """
    points = np.array(coords, dtype=np.float64).reshape(-1, 2)
    edges = [(int(u), int(v)) for u, v in edges]
    seen: Dict[Tuple[float, float], int] = {}
    for v, point in enumerate(points):
        key = (float(point[0]), float(point[1]))
        if key in seen:
            raise DegeneracyError(
                "Vertices %(u)s and %(v)s are drawn at the same point",
                code="coincident-vertices",
                params={"u": seen[key], "v": v},
            )
        seen[key] = v

    for e, (u, v) in enumerate(edges):
        for w in range(len(points)):
            if w not in (u, v) and _strictly_inside(points[u], points[v], points[w]):
                raise DegeneracyError(
                    "Vertex %(w)s lies inside edge %(e)s",
                    code="vertex-on-edge",
                    params={"w": w, "e": e},
                )

    crossings = []
    for (e, (a, b)), (f, (c, d)) in itertools.combinations(enumerate(edges), 2):
        p, r = points[a], points[b]
        s, t = points[c], points[d]
        shared = {a, b} & {c, d}
        if shared:
            hub = shared.pop()
            mine = b if a == hub else a
            theirs = d if c == hub else c
            base = points[hub]
            if (
                _orientation(base, points[mine], points[theirs]) == 0
                and np.dot(points[mine] - base, points[theirs] - base) > 0
            ):
                raise DegeneracyError(
                    "Edges %(e)s and %(f)s overlap",
                    code="collinear-overlap",
                    params={"e": e, "f": f},
                )
            continue
        o1, o2 = _orientation(p, r, s), _orientation(p, r, t)
        o3, o4 = _orientation(s, t, p), _orientation(s, t, r)
        if o1 == o2 == o3 == o4 == 0:
            direction = r - p
            span = sorted(float(np.dot(x - p, direction)) for x in (s, t))
            if span[0] < float(np.dot(direction, direction)) and span[1] > 0:
                raise DegeneracyError(
                    "Edges %(e)s and %(f)s overlap",
                    code="collinear-overlap",
                    params={"e": e, "f": f},
                )
            continue
        if o1 * o2 < 0 and o3 * o4 < 0:
            denominator = _cross(r - p, t - s)
            t_e = _cross(s - p, t - s) / denominator
            t_f = _cross(s - p, r - p) / denominator
            point = p + t_e * (r - p)
            crossings.append(Crossing(e, f, (point[0], point[1]), t_e, t_f))

    check_shared_crossings(crossings)
    drawing = Drawing(coords=points.tolist(), edges=edges, crossings=crossings)
    logger.debug(
        "%d crossings over %d edges, phi=%d", len(crossings), len(edges), drawing.phi
    )
    return drawing


@attr.s(frozen=True, slots=True)
class Planarization(BaseModel):
    """Planar graph where crossing ``c`` became vertex ``num_original + c``.

    ``segments`` lists the pieces of every original edge in edge order, each
    edge from tail to head; ``segment_origin`` gives the original edge of
    every segment.
    """

    num_original = attr.ib(type=int)
    num_vertices = attr.ib(type=int)
    segments = attr.ib(type=Tuple[Tuple[int, int], ...], converter=tuple)
    segment_origin = attr.ib(type=Tuple[int, ...], converter=tuple)

    def crossing_of(self, vertex: int) -> Optional[int]:
        """Crossing index of a new vertex, None for an original vertex."""
        if vertex < self.num_original:
            return None
        return vertex - self.num_original

    def graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.num_vertices))
        graph.add_edges_from(self.segments)
        return graph


def planarize(
    graph: Union[nx.Graph, Sequence[Tuple[int, int]]], drawing: Drawing
) -> Planarization:
    """Splits every edge of ``drawing`` at its crossings.

    Raises:
        ConsistencyError: if the drawing and ``graph`` disagree on the
            vertices or the edges.
    """
    if isinstance(graph, nx.Graph):
        num_original = graph.number_of_nodes()
        edges = {tuple(sorted(e)) for e in graph.edges}
    else:
        edges = {(min(u, v), max(u, v)) for u, v in graph}
        num_original = len(drawing.coords)
    drawn = {(min(u, v), max(u, v)) for u, v in drawing.edges}
    if num_original != len(drawing.coords) or edges != drawn:
        raise ConsistencyError(
            "Drawing does not match the graph (%(drawn)s drawn edges, %(edges)s "
            "graph edges, %(points)s points for %(n)s vertices)",
            code="drawing-mismatch",
            params={
                "drawn": len(drawn),
                "edges": len(edges),
                "points": len(drawing.coords),
                "n": num_original,
            },
        )
    segments = []
    origin = []
    for e, (u, v) in enumerate(drawing.edges):
        chain = [u, *(num_original + c for c in drawing.crossings_on(e)), v]
        for a, b in zip(chain, chain[1:]):
            segments.append((a, b))
            origin.append(e)
    return Planarization(
        num_original=num_original,
        num_vertices=num_original + len(drawing.crossings),
        segments=segments,
        segment_origin=origin,
    )


def crossing_ratio(k: int, phi: int) -> float:
    """Guaranteed fraction of the optimum for level removal.

    >>> crossing_ratio(10, 1)
    0.7
    """
    return (k - phi - 2) / k


def improve_labels(
    instance: Instance, cfg: Configuration, vertices: Sequence[int]
) -> Configuration:
    """One pass over ``vertices`` in order, moving each to the label that
    maximizes its local energy given its neighbours' labels; a label only
    changes on strict improvement."""
    labels = list(cfg.labels)
    incident = incidence(instance)
    for v in vertices:
        def local(a: int) -> float:
            total = float(instance.vertex_potentials[v, a])
            for e in incident[v]:
                tail, head = instance.edges[e]
                if tail == v:
                    total += float(instance.edge_potentials[e, a, labels[head]])
                else:
                    total += float(instance.edge_potentials[e, labels[tail], a])
            return total

        best, best_value = labels[v], local(labels[v])
        for a in instance.labels_of(v):
            value = local(a)
            if value > best_value:
                best, best_value = a, value
        labels[v] = best
    return Configuration(labels=labels)


def crossing_solve(
    instance: Instance,
    drawing: Drawing,
    part: Optional[Partition],
    k: int,
    *,
    improve: bool = True,
    cap: int = DEFAULT_TABLE_CAP,
    threads: Optional[int] = None,
) -> ApproxResult:
    """Level removal on the planarization of ``drawing``; the energy found
    is at least ``(k - phi - 2) / k`` times the optimum.

    Levels are breadth-first distances in the planarization from the
    smallest original vertex of each component. Original vertices on
    removed levels take their smallest allowed label and, with
    ``improve``, are then greedily relabeled.

    Raises:
        ParameterError: unless ``k > phi + 2``.
        DomainError: on a negative potential.
        ConsistencyError: if the drawing does not match the instance.
    """
    phi = drawing.phi
    check_k(k)
    if k <= phi + 2:
        raise ParameterError(
            "k must exceed phi + 2 = %(bound)s, got %(k)s",
            code="k-range",
            params={"bound": phi + 2, "k": k},
        )
    require_nonnegative(instance, "crossing_solve")
    instance = as_undirected(instance, part)
    part = resolve_partition(instance, part)
    n = instance.num_vertices
    planar = planarize(graph_of(instance), drawing).graph()
    levels = bfs_layers(
        planar, root_rule=lambda component: min(v for v in component if v < n)
    ).levels[:n]
    solve = pairwise_solver(instance, part, Objective.MAX, cap)

    def evaluate(ell: int) -> ShiftOutcome:
        removed = {(ell + j) % k for j in range(phi)}
        edge_levels = {(ell - 1) % k, (ell + phi) % k}
        keys: List[Optional[int]] = []
        interior: List[bool] = []
        for v in range(n):
            level = levels[v]
            if level % k in removed:
                keys.append(None)
                interior.append(False)
            else:
                keys.append((level - ell - phi) // k)
                interior.append(level % k not in edge_levels)
        outcome = evaluate_shift(
            instance, ell, pieces_by_key(instance, keys, interior), solve
        )
        dropped = [v for v in range(n) if keys[v] is None]
        if improve and dropped:
            cfg = improve_labels(instance, outcome.cfg, dropped)
            total = energy(instance, cfg)
            outcome = attr.evolve(outcome, cfg=cfg, score=total, energy=total)
        return outcome

    outcomes = parallel_map(evaluate, range(k), threads)
    return build_result("crossing", Objective.MAX, outcomes, k, crossing_ratio(k, phi))


def drawing_of(instance: Instance, crossings=None) -> Drawing:
    """Drawing from the coordinates of ``instance``: crossings are computed,
    or taken verbatim when given. A directed instance is drawn with the
    edges of its merged undirected form, one segment per vertex pair."""
    if instance.coords is None:
        raise ValidationError(
            "Instance has no coordinates to draw it with", code="missing-coords"
        )
    edges = to_undirected(instance).edges if instance.directed else instance.edges
    if crossings is None:
        return compute_crossings(instance.coords, edges)
    return Drawing(coords=instance.coords, edges=edges, crossings=crossings)
