# Copyright (C) 2026 The layercut developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Encoders of classical problems as instances, and their drivers.

Weighted MAX 2-CSP, MAX-CUT and MAX-DICUT become edge tables; MAX k-CUT is
solved by fixing terminal labels; ferromagnetic Edwards-Anderson spin
glasses without field reduce to MAX-CUT; vision energies combine a
quadratic data term with a Potts or truncated smoothness term on the pixel
lattice.

The spin glass energy is ``sum J_ij s_i s_j`` without the leading minus
sign of the physics convention, so ground states of positive couplings
anti-align their spins.
"""

from enum import Enum
import itertools
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import attr
from attrs_strict import type_validator
import networkx as nx
import numpy as np
from typing_extensions import Final

from .dp import DEFAULT_TABLE_CAP
from .exceptions import CapacityError, DomainError, ParameterError, ValidationError
from .geometry import BallSet, GraphMode, mode_graph
from .model import (
    BaseModel,
    Configuration,
    Instance,
    balance_report,
    energy,
)
from .oracle import DEFAULT_ORACLE_CAP, exact_opt
from .shifting import (
    ApproxResult,
    baker_max,
    baker_min_balanced,
    check_k,
    parallel_map,
    td_exact,
)

logger = logging.getLogger(__name__)

DEFAULT_TERMINAL_CAP: Final = 10**6
"""Largest number of terminal tuples :func:`solve_maxkcut` enumerates."""


def _check_weight(weight: float, where) -> float:
    weight = float(weight)
    if not weight >= 0:
        raise DomainError(
            "Weight of %(where)s is %(weight)s, must be nonnegative",
            code="negative-weight",
            params={"where": where, "weight": weight},
        )
    return weight


def _satisfied_table(value) -> np.ndarray:
    table = np.array(value, dtype=bool)
    table.setflags(write=False)
    return table


@attr.s(frozen=True, slots=True)
class Constraint(BaseModel):
    """Weighted binary constraint; ``satisfied[a, b]`` tells whether labels
    ``a`` of ``u`` and ``b`` of ``v`` satisfy it."""

    u = attr.ib(type=int, validator=type_validator())
    v = attr.ib(type=int, validator=type_validator())
    weight = attr.ib(type=float, converter=float)
    satisfied = attr.ib(
        type=np.ndarray,
        converter=_satisfied_table,
        eq=attr.cmp_using(eq=np.array_equal),
        hash=False,
    )


def encode_max2csp(
    q: int, variables: int, constraints: Sequence[Constraint]
) -> Instance:
    """Instance whose energy is the total weight of satisfied constraints.

    Constraints on the same vertex pair are merged by adding their tables,
    in the orientation of the first of them.

    Raises:
        DomainError: on a negative weight.
        ValidationError: on a table that is not ``q x q``.
    """
    index: Dict[Tuple[int, int], int] = {}
    edges: List[Tuple[int, int]] = []
    tables: List[np.ndarray] = []
    for position, constraint in enumerate(constraints):
        weight = _check_weight(constraint.weight, "constraint %d" % position)
        if constraint.satisfied.shape != (q, q):
            raise ValidationError(
                "Constraint %(position)s has a %(shape)s table, expected %(q)s x %(q)s",
                code="constraint-shape",
                params={"position": position, "shape": constraint.satisfied.shape, "q": q},
            )
        table = weight * constraint.satisfied.astype(np.float64)
        u, v = constraint.u, constraint.v
        key = (min(u, v), max(u, v))
        if key not in index:
            index[key] = len(edges)
            edges.append((u, v))
            tables.append(table)
        elif edges[index[key]] == (u, v):
            tables[index[key]] = tables[index[key]] + table
        else:
            tables[index[key]] = tables[index[key]] + table.T
    return Instance(
        num_vertices=variables,
        q=q,
        edges=edges,
        vertex_potentials=np.zeros((variables, q)),
        edge_potentials=np.array(tables).reshape(len(edges), q, q),
        metadata={"problem": "max2csp"},
    )


def _weighted_edges(
    graph: nx.Graph, weight: str
) -> Tuple[int, List[Tuple[int, int, float]]]:
    nodes = sorted(graph.nodes)
    if nodes != list(range(len(nodes))):
        raise ValidationError(
            "Graph nodes must be 0..n-1", code="node-labels"
        )
    edges = []
    for u, v, data in graph.edges(data=True):
        if not graph.is_directed():
            u, v = min(u, v), max(u, v)
        edges.append((u, v, _check_weight(data.get(weight, 1.0), (u, v))))
    return len(nodes), sorted(edges)


def _cut_instance(graph: nx.Graph, q: int, weight: str, problem: str) -> Instance:
    if graph.is_directed():
        raise ParameterError(
            "Cut encodings need an undirected graph", code="directed-graph"
        )
    n, edges = _weighted_edges(graph, weight)
    differ = 1.0 - np.eye(q)
    return Instance(
        num_vertices=n,
        q=q,
        edges=[(u, v) for u, v, _ in edges],
        vertex_potentials=np.zeros((n, q)),
        edge_potentials=np.array([w * differ for _, _, w in edges]).reshape(
            len(edges), q, q
        ),
        metadata={"problem": problem},
    )


def encode_maxcut(graph: nx.Graph, weight: str = "weight") -> Instance:
    """MAX-CUT: labels are sides, an edge scores its weight (1 when the
    ``weight`` attribute is missing) when its endpoints differ.

    >>> from layercut.oracle import exact_opt
    >>> exact_opt(encode_maxcut(nx.complete_graph(3)))[0]
    2.0
    """
    return _cut_instance(graph, 2, weight, "maxcut")


def encode_maxdicut(graph: nx.DiGraph, weight: str = "weight") -> Instance:
    """MAX-DICUT: an arc ``(u, v)`` scores its weight when ``u`` has label 1
    and ``v`` label 0. The instance is directed."""
    if not graph.is_directed():
        raise ParameterError("MAX-DICUT needs a directed graph", code="undirected-graph")
    n, arcs = _weighted_edges(graph, weight)
    tables = np.zeros((len(arcs), 2, 2))
    for e, (_, _, w) in enumerate(arcs):
        tables[e, 1, 0] = w
    return Instance(
        num_vertices=n,
        q=2,
        edges=[(u, v) for u, v, _ in arcs],
        vertex_potentials=np.zeros((n, 2)),
        edge_potentials=tables,
        directed=True,
        metadata={"problem": "maxdicut"},
    )


class Backend(Enum):
    """Solver used for every terminal assignment of :func:`solve_maxkcut`."""

    ORACLE = "oracle"
    BAKER = "baker"


def terminal_tuples(n: int, k_cut: int, ordered: bool = True):
    """Terminal assignments in lexicographic order: ordered tuples of
    distinct vertices, or increasing ones when not ``ordered``."""
    if ordered:
        return itertools.permutations(range(n), k_cut)
    return itertools.combinations(range(n), k_cut)


def solve_maxkcut(
    graph: nx.Graph,
    k_cut: int,
    *,
    backend: Union[Backend, str] = Backend.ORACLE,
    k: int = 4,
    ordered: bool = True,
    weight: str = "weight",
    cap: int = DEFAULT_TERMINAL_CAP,
    solver_cap: Optional[int] = None,
    threads: Optional[int] = None,
) -> Tuple[float, Configuration]:
    """MAX k-CUT by terminals: for every terminal tuple ``(s_1, ..., s_k)``
    vertex ``s_t`` is fixed to label ``t - 1`` and the others are free; the
    best cut over all tuples wins, ties going to the first tuple.

    ``backend`` solves each assignment exactly (``oracle``) or by max-sum
    layer shifting with parameter ``k`` (``baker``). Unordered tuples give
    the same optimum, since relabeling the classes preserves every cut.

    >>> solve_maxkcut(nx.complete_graph(3), 3)[0]
    3.0

    Raises:
        ParameterError: unless ``2 <= k_cut <= n``.
        CapacityError: when there are more than ``cap`` terminal tuples.
    """
    backend = Backend(backend)
    n = graph.number_of_nodes()
    if not (isinstance(k_cut, int) and 2 <= k_cut <= n):
        raise ParameterError(
            "k_cut must lie in [2, %(n)s], not %(k_cut)r",
            code="k-cut-range",
            params={"n": n, "k_cut": k_cut},
        )
    count = math.perm(n, k_cut) if ordered else math.comb(n, k_cut)
    if count > cap:
        raise CapacityError(
            "%(count)s terminal tuples exceed the cap of %(cap)s; enumerate "
            "unordered tuples or raise the cap",
            code="terminal-cap-exceeded",
            params={"count": count, "cap": cap},
        )
    if backend is Backend.BAKER:
        check_k(k)
    base = _cut_instance(graph, k_cut, weight, "maxkcut")
    free = tuple(range(k_cut))

    def solve(terminals: Tuple[int, ...]) -> Tuple[float, Configuration]:
        allowed = [free] * n
        for label, s in enumerate(terminals):
            allowed[s] = (label,)
        instance = attr.evolve(base, allowed_labels=allowed)
        if backend is Backend.ORACLE:
            return exact_opt(instance, cap=solver_cap or DEFAULT_ORACLE_CAP)
        result = baker_max(instance, None, k, cap=solver_cap or DEFAULT_TABLE_CAP)
        return result.energy, result.cfg

    tuples = list(terminal_tuples(n, k_cut, ordered))
    best_value, best_cfg, best_terminals = -math.inf, None, None
    for terminals, (value, cfg) in zip(tuples, parallel_map(solve, tuples, threads)):
        if value > best_value:
            best_value, best_cfg, best_terminals = value, cfg, terminals
    logger.info(
        "Max %d-cut %s with terminals %s over %d tuples",
        k_cut,
        best_value,
        best_terminals,
        len(tuples),
    )
    assert best_cfg is not None
    return best_value, best_cfg


def lattice_edges(dims: Sequence[int]) -> List[Tuple[int, int]]:
    """Edges of the open grid graph of shape ``dims``, vertices numbered in
    row-major order; each vertex lists its successors axis by axis.

    >>> lattice_edges([2, 2])
    [(0, 1), (0, 2), (1, 3), (2, 3)]
    """
    dims = tuple(int(n) for n in dims)
    if not dims or any(n < 1 for n in dims):
        raise ParameterError(
            "Lattice dimensions must be positive, not %(dims)s",
            code="lattice-dims",
            params={"dims": dims},
        )
    edges = []
    for point in itertools.product(*(range(n) for n in dims)):
        u = int(np.ravel_multi_index(point, dims))
        for axis in range(len(dims)):
            if point[axis] + 1 < dims[axis]:
                successor = point[:axis] + (point[axis] + 1,) + point[axis + 1 :]
                edges.append((u, int(np.ravel_multi_index(successor, dims))))
    return sorted(edges)


Couplings = Union[float, Sequence[float]]


def _couplings(dims: Sequence[int], couplings: Couplings) -> Tuple[list, np.ndarray]:
    edges = lattice_edges(dims)
    values = np.asarray(couplings, dtype=np.float64)
    try:
        return edges, np.broadcast_to(values, (len(edges),))
    except ValueError:
        raise ValidationError(
            "%(found)s couplings for %(m)s lattice edges",
            code="coupling-count",
            params={"found": values.size, "m": len(edges)},
        ) from None


def encode_edwards_anderson(
    dims: Sequence[int], couplings: Couplings, field: float = 0.0
) -> Tuple[Instance, float]:
    """MAX-CUT instance of a ferromagnetic lattice spin glass, and the sum
    ``C`` of its couplings: the ground state energy is ``C - 2 * maxcut``.

    ``couplings`` is one value for every edge or one per edge of
    :func:`lattice_edges`.

    Raises:
        ParameterError: for a nonzero ``field``.
        DomainError: unless every coupling is positive.
    """
    if field != 0:
        raise ParameterError(
            "An external field is not supported, got %(field)s",
            code="unsupported-parameter",
            params={"field": field},
        )
    edges, values = _couplings(dims, couplings)
    bad = np.flatnonzero(~(values > 0))
    if bad.size:
        raise DomainError(
            "Coupling of edge %(edge)s is %(value)s; only positive couplings "
            "are supported",
            code="coupling-sign",
            params={"edge": edges[int(bad[0])], "value": float(values[bad[0]])},
        )
    graph = nx.Graph()
    graph.add_nodes_from(range(math.prod(dims)))
    graph.add_weighted_edges_from((u, v, float(j)) for (u, v), j in zip(edges, values))
    constant = float(values.sum())
    instance = attr.evolve(
        encode_maxcut(graph),
        metadata={
            "problem": "edwards-anderson",
            "dims": list(dims),
            "constant": constant,
        },
    )
    return instance, constant


def spins_from_labels(cfg: Union[Configuration, Sequence[int]]) -> np.ndarray:
    """Spin -1 for label 0, +1 for label 1."""
    return 2 * np.asarray(tuple(cfg), dtype=np.int64) - 1


def ea_energy(dims: Sequence[int], couplings: Couplings, spins) -> float:
    """``sum J_ij s_i s_j`` over the lattice edges."""
    edges, values = _couplings(dims, couplings)
    spins = np.asarray(spins)
    return float(sum(j * spins[u] * spins[v] for (u, v), j in zip(edges, values)))


def _td_solver(instance: Instance) -> Tuple[float, Configuration]:
    result = td_exact(instance)
    return result.energy, result.cfg


def ea_ground_state(
    dims: Sequence[int],
    couplings: Couplings,
    *,
    solver: Callable[[Instance], Tuple[float, Configuration]] = _td_solver,
) -> Tuple[float, np.ndarray]:
    """Ground state energy and spins, from the maximum cut found by
    ``solver`` (exact dynamic programming by default)."""
    instance, constant = encode_edwards_anderson(dims, couplings)
    cut, cfg = solver(instance)
    return constant - 2 * cut, spins_from_labels(cfg)


class VisionKind(Enum):
    POTTS = "potts"
    TRUNC_ABS = "trunc-abs"
    TRUNC_QUAD = "trunc-quad"
    DATA = "data"


def vision_potentials(kind: Union[VisionKind, str], q: int, parameter) -> np.ndarray:
    """Tables of the usual vision energies over labels ``0..q-1``.

    Smoothness kinds return a ``q x q`` table: ``w * [a != b]`` (``POTTS``),
    ``min(kappa, |a - b|)`` (``TRUNC_ABS``), ``min(kappa, (a - b) ** 2)``
    (``TRUNC_QUAD``). ``DATA`` takes the observations ``p`` and returns one
    row ``(a - p_i) ** 2`` per observation.

    >>> float(vision_potentials("trunc-quad", 4, 4.0)[0, 3])
    4.0
    """
    kind = VisionKind(kind)
    labels = np.arange(q, dtype=np.float64)
    if kind is VisionKind.DATA:
        observed = np.atleast_1d(np.asarray(parameter, dtype=np.float64))
        return (labels[None, :] - observed[:, None]) ** 2
    parameter = float(parameter)
    if kind is VisionKind.POTTS:
        if parameter < 0:
            raise ParameterError(
                "Potts weight must be nonnegative, not %(w)s",
                code="parameter-range",
                params={"w": parameter},
            )
        return parameter * (1.0 - np.eye(q))
    if not parameter > 0:
        raise ParameterError(
            "Truncation must be positive, not %(kappa)s",
            code="parameter-range",
            params={"kappa": parameter},
        )
    difference = labels[:, None] - labels[None, :]
    if kind is VisionKind.TRUNC_ABS:
        return np.minimum(parameter, np.abs(difference))
    return np.minimum(parameter, difference**2)


def encode_vision(
    image,
    q: int,
    kind: Union[VisionKind, str] = VisionKind.POTTS,
    parameter: float = 1.0,
    *,
    data_weight: float = 1.0,
) -> Instance:
    """Labeling of a 2-D image: pixels in row-major order on the
    4-neighbour lattice, data term ``data_weight * (a - p_i) ** 2`` and the
    smoothness table of ``kind`` on every edge. Pixel positions go to
    ``coords``."""
    pixels = np.asarray(image, dtype=np.float64)
    if pixels.ndim != 2 or pixels.size == 0:
        raise ValidationError(
            "Image must be a non-empty 2-D array", code="image-shape"
        )
    kind = VisionKind(kind)
    if kind is VisionKind.DATA:
        raise ParameterError(
            "The smoothness term cannot be a data term", code="parameter-kind"
        )
    _check_weight(data_weight, "the data term")
    edges = lattice_edges(pixels.shape)
    smoothness = vision_potentials(kind, q, parameter)
    rows, cols = pixels.shape
    return Instance(
        num_vertices=pixels.size,
        q=q,
        edges=edges,
        vertex_potentials=data_weight
        * vision_potentials(VisionKind.DATA, q, pixels.ravel()),
        edge_potentials=np.broadcast_to(smoothness, (len(edges), q, q)),
        coords=[(float(r), float(c)) for r in range(rows) for c in range(cols)],
        metadata={
            "problem": "vision",
            "shape": [rows, cols],
            "pairwise": kind.value,
            "parameter": float(parameter),
        },
    )


def solve_vision_min(
    instance: Instance,
    k: int,
    data_shift: Optional[float] = None,
    *,
    cap: int = DEFAULT_TABLE_CAP,
    threads: Optional[int] = None,
) -> ApproxResult:
    """Min-sum layer shifting after adding ``data_shift`` to every vertex
    potential, which makes every folded function positive.

    The shift defaults to 0 on an already balanced instance and to 1
    otherwise. Reported energies and bounds are those of the unshifted
    instance; the ratio guarantee holds for the shifted one.
    """
    if data_shift is None:
        data_shift = 0.0 if balance_report(instance).balanced else 1.0
    data_shift = _check_weight(data_shift, "the data shift")
    if data_shift:
        logger.info("Shifting every vertex potential by %s", data_shift)
    shifted = attr.evolve(
        instance, vertex_potentials=instance.vertex_potentials + data_shift
    )
    result = baker_min_balanced(shifted, None, k, cap=cap, threads=threads)
    removed = instance.num_vertices * data_shift
    total = energy(instance, result.cfg)
    return attr.evolve(
        result,
        energy=total,
        value=total,
        dp_bound=result.dp_bound - result.interior_size * data_shift,
        shift_values=[(shift, v - removed) for shift, v in result.shift_values],
    )


def encode_geometric(
    balls: BallSet,
    mode: Union[GraphMode, str] = GraphMode.INTERSECTION,
    weight: float = 1.0,
) -> Instance:
    """MAX-CUT instance on the graph of ``balls`` under ``mode``, with the
    centers as ``coords`` and the diameters in ``metadata``."""
    mode = GraphMode(mode)
    graph = nx.Graph()
    graph.add_nodes_from(range(balls.n))
    graph.add_edges_from(mode_graph(balls, mode).edges, weight=_check_weight(weight, "edges"))
    instance = encode_maxcut(graph)
    return attr.evolve(
        instance,
        coords=balls.centers,
        metadata={
            "problem": "geometric-maxcut",
            "mode": mode.value,
            "d": balls.d,
            "diameters": list(balls.diameters),
        },
    )
