# Copyright (C) 2018-2026 The layercut developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""
Energy model over labeled graphs.

An :class:`Instance` is a graph on vertices ``0..n-1`` whose vertices take
labels in ``0..q-1``. Its energy under a :class:`Configuration` is the sum of
one vertex potential per vertex and one edge potential per edge. A
:class:`Partition` splits each edge potential between its two endpoints,
which defines for every vertex the folded function
``f_i = phi_i + sum_j alpha_ij * phi_ij`` used by every approximation scheme
of this package.

The classes defined in this module are immutable
`attrs objects <https://attrs.org/>`__ and enums. Numeric tables are stored
as read-only float64 :mod:`numpy` arrays.

All classes define a ``from_dict`` class method and a ``to_dict``
method to convert between them and JSON-serializable objects.
"""

from enum import Enum
import itertools
import logging
import math
import operator
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import attr
from attrs_strict import type_validator
import networkx as nx
import numpy as np
from typing_extensions import Final

from .exceptions import (
    CapacityError,
    DomainError,
    InvalidConfiguration,
    ParameterError,
    PreconditionError,
    ValidationError,
)

logger = logging.getLogger(__name__)

TOLERANCE: Final = 1e-9
"""Absolute tolerance used when comparing energies."""

PARTITION_TOLERANCE: Final = 1e-12
"""Tolerance on ``alpha_uv + alpha_vu == 1``."""

DEFAULT_BALANCE_CAP: Final = 10**6
"""Largest number of closed-neighbourhood configurations enumerated for a
single vertex by :func:`balance_report`."""

UNBALANCED: Final = math.inf
"""Value of :attr:`BalanceReport.alpha_star` when some balancer is zero while
the corresponding folded function is not identically zero."""


class Objective(Enum):
    """Direction of optimization."""

    MAX = "max"
    MIN = "min"

    @property
    def worst(self) -> float:
        """Value no feasible objective can be worse than."""
        return -math.inf if self is Objective.MAX else math.inf

    def reduce(self, table: np.ndarray, axis=None) -> np.ndarray:
        if self is Objective.MAX:
            return np.max(table, axis=axis)
        return np.min(table, axis=axis)

    def arg(self, table: np.ndarray) -> int:
        """Flat index of the first optimal entry of ``table``."""
        if self is Objective.MAX:
            return int(np.argmax(table))
        return int(np.argmin(table))

    def improves(self, candidate: float, incumbent: float) -> bool:
        """Strict improvement test; ties never improve."""
        if self is Objective.MAX:
            return candidate > incumbent
        return candidate < incumbent


def dictify(value):
    "Helper function used by BaseModel.to_dict()"
    if isinstance(value, BaseModel):
        return value.to_dict()
    elif isinstance(value, Enum):
        return value.value
    elif isinstance(value, np.ndarray):
        return value.tolist()
    elif isinstance(value, np.generic):
        return value.item()
    elif isinstance(value, dict):
        return {k: dictify(v) for k, v in value.items()}
    elif isinstance(value, (tuple, list)):
        return [dictify(v) for v in value]
    else:
        return value


class BaseModel:
    """Base class for layercut model classes.

    Provides serialization/deserialization to/from Python dictionaries,
    that are suitable for JSON documents."""

    __slots__ = ()

    def to_dict(self):
        """Wrapper of `attr.asdict` that can be overridden by subclasses
        that have special handling of some of the fields."""
        return dictify(attr.asdict(self, recurse=False))

    @classmethod
    def from_dict(cls, d):
        """Takes a dictionary as produced by :meth:`to_dict` (or read from a
        JSON document), and builds the corresponding object."""
        return cls(**d)

    def check(self) -> None:
        """Performs internal consistency checks, and raises an error if one fails."""
        attr.validate(self)  # type: ignore[arg-type]


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _as_table(value) -> np.ndarray:
    return _readonly(np.array(value, dtype=np.float64))


def _freeze_pairs(value) -> Tuple[Tuple[int, int], ...]:
    return tuple((operator.index(u), operator.index(v)) for u, v in value)


def _freeze_allowed(value) -> Optional[Tuple[Tuple[int, ...], ...]]:
    if value is None:
        return None
    return tuple(
        tuple(sorted(set(operator.index(a) for a in labels))) for labels in value
    )


def _freeze_coords(value) -> Optional[Tuple[Tuple[float, ...], ...]]:
    if value is None:
        return None
    return tuple(tuple(float(x) for x in point) for point in value)


def _freeze_metadata(value) -> Tuple[Tuple[str, Any], ...]:
    if isinstance(value, dict):
        value = value.items()
    return tuple(sorted((str(k), v) for k, v in value))


@attr.s(frozen=True, slots=True)
class Instance(BaseModel):
    """A labeled graph with vertex and edge potentials.

    ``vertex_potentials`` has shape ``(n, q)`` and ``edge_potentials`` shape
    ``(m, q, q)``; row ``a`` column ``b`` of an edge table is the potential
    of the edge ``(u, v)`` when ``u`` has label ``a`` and ``v`` label ``b``.
    """

    num_vertices = attr.ib(
        type=int, converter=operator.index, validator=type_validator()
    )
    q = attr.ib(type=int, converter=operator.index, validator=type_validator())
    edges = attr.ib(type=Tuple[Tuple[int, int], ...], converter=_freeze_pairs)
    vertex_potentials = attr.ib(
        type=np.ndarray,
        converter=_as_table,
        eq=attr.cmp_using(eq=np.array_equal),
        hash=False,
        repr=False,
    )
    edge_potentials = attr.ib(
        type=np.ndarray,
        converter=_as_table,
        eq=attr.cmp_using(eq=np.array_equal),
        hash=False,
        repr=False,
    )
    directed = attr.ib(type=bool, default=False, validator=type_validator())
    allowed_labels = attr.ib(
        type=Optional[Tuple[Tuple[int, ...], ...]],
        default=None,
        converter=_freeze_allowed,
    )
    coords = attr.ib(
        type=Optional[Tuple[Tuple[float, ...], ...]],
        default=None,
        converter=_freeze_coords,
        repr=False,
    )
    metadata = attr.ib(
        type=Tuple[Tuple[str, Any], ...],
        factory=tuple,
        converter=_freeze_metadata,
        hash=False,
        repr=False,
    )

    def __attrs_post_init__(self):
        # JSON cannot carry the shape of empty arrays
        n, m, q = self.num_vertices, len(self.edges), self.q
        if self.vertex_potentials.size == 0 and n * q == 0:
            object.__setattr__(
                self, "vertex_potentials", _readonly(np.zeros((max(n, 0), max(q, 0))))
            )
        if self.edge_potentials.size == 0 and m * q == 0:
            object.__setattr__(
                self, "edge_potentials", _readonly(np.zeros((m, max(q, 0), max(q, 0))))
            )
        errors = list(self._invariant_errors())
        if errors:
            raise ValidationError(errors)

    def _invariant_errors(self) -> Iterable[ValidationError]:
        n, m, q = self.num_vertices, len(self.edges), self.q
        if q < 1:
            yield ValidationError(
                "Domain size must be at least 1, not %(q)s",
                code="domain-size",
                params={"q": q},
            )
        if n < 0:
            yield ValidationError("Vertex count must be nonnegative", code="vertex-count")
        if self.vertex_potentials.shape != (n, q):
            yield ValidationError(
                "Vertex potentials have shape %(shape)s, expected %(expected)s",
                code="potential-shape",
                params={"shape": self.vertex_potentials.shape, "expected": (n, q)},
            )
        if self.edge_potentials.shape != (m, q, q):
            yield ValidationError(
                "Edge potentials have shape %(shape)s, expected %(expected)s",
                code="potential-shape",
                params={"shape": self.edge_potentials.shape, "expected": (m, q, q)},
            )
        if not (
            np.all(np.isfinite(self.vertex_potentials))
            and np.all(np.isfinite(self.edge_potentials))
        ):
            yield ValidationError("Potentials must be finite", code="non-finite")

        seen = set()
        for u, v in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                yield ValidationError(
                    "Edge (%(u)s, %(v)s) references an unknown vertex",
                    code="unknown-vertex",
                    params={"u": u, "v": v},
                )
            if u == v:
                yield ValidationError(
                    "Self-loop on vertex %(u)s", code="self-loop", params={"u": u}
                )
            key = (u, v) if self.directed else (min(u, v), max(u, v))
            if key in seen:
                yield ValidationError(
                    "Duplicate edge (%(u)s, %(v)s)",
                    code="duplicate-edge",
                    params={"u": u, "v": v},
                )
            seen.add(key)

        if self.allowed_labels is not None:
            if len(self.allowed_labels) != n:
                yield ValidationError(
                    "allowed_labels has %(found)s entries for %(n)s vertices",
                    code="allowed-labels-length",
                    params={"found": len(self.allowed_labels), "n": n},
                )
            for i, labels in enumerate(self.allowed_labels):
                if not labels:
                    yield ValidationError(
                        "Vertex %(i)s has an empty label set",
                        code="empty-label-set",
                        params={"i": i},
                    )
                elif labels[0] < 0 or labels[-1] >= q:
                    yield ValidationError(
                        "Vertex %(i)s allows labels outside [0, %(q)s)",
                        code="label-out-of-range",
                        params={"i": i, "q": q},
                    )

        if self.coords is not None and len(self.coords) != n:
            yield ValidationError(
                "coords has %(found)s points for %(n)s vertices",
                code="coords-length",
                params={"found": len(self.coords), "n": n},
            )

    @property
    def n(self) -> int:
        return self.num_vertices

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def meta(self) -> Dict[str, Any]:
        return dict(self.metadata)

    def labels_of(self, vertex: int) -> Tuple[int, ...]:
        """Allowed labels of ``vertex``, in ascending order."""
        if self.allowed_labels is None:
            return tuple(range(self.q))
        return self.allowed_labels[vertex]

    @property
    def domains(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(self.labels_of(i) for i in range(self.num_vertices))

    @property
    def search_space(self) -> int:
        """Number of valid configurations."""
        return math.prod(len(labels) for labels in self.domains)

    def endpoints(self) -> Tuple[np.ndarray, np.ndarray]:
        """Arrays of edge tails and heads, in edge order."""
        pairs = np.array(self.edges, dtype=np.intp).reshape(-1, 2)
        return pairs[:, 0], pairs[:, 1]

    def is_nonnegative(self) -> bool:
        return bool(
            np.all(self.vertex_potentials >= 0) and np.all(self.edge_potentials >= 0)
        )

    def restrict(self, vertices: Sequence[int], edge_ids: Sequence[int]) -> "Instance":
        """Sub-instance on ``vertices`` (renumbered in the given order) keeping
        the edges ``edge_ids``, whose endpoints must all lie in ``vertices``."""
        index = {v: position for position, v in enumerate(vertices)}
        edges = [
            (index[self.edges[e][0]], index[self.edges[e][1]]) for e in edge_ids
        ]
        allowed = None
        if self.allowed_labels is not None:
            allowed = [self.allowed_labels[v] for v in vertices]
        return Instance(
            num_vertices=len(vertices),
            q=self.q,
            edges=edges,
            vertex_potentials=self.vertex_potentials[list(vertices)].reshape(
                len(vertices), self.q
            ),
            edge_potentials=self.edge_potentials[list(edge_ids)].reshape(
                len(edges), self.q, self.q
            ),
            directed=self.directed,
            allowed_labels=allowed,
        )

    def to_dict(self):
        d = super().to_dict()
        d["metadata"] = dictify(self.meta)
        for key in ("allowed_labels", "coords"):
            if d[key] is None:
                del d[key]
        return d


@attr.s(frozen=True, slots=True)
class Configuration(BaseModel):
    """One label per vertex."""

    labels = attr.ib(
        type=Tuple[int, ...],
        converter=lambda labels: tuple(operator.index(a) for a in labels),
        validator=type_validator(),
    )

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __getitem__(self, vertex: int) -> int:
        return self.labels[vertex]

    @classmethod
    def smallest(cls, instance: Instance) -> "Configuration":
        """Every vertex takes its smallest allowed label."""
        return cls(labels=[labels[0] for labels in instance.domains])


ConfigurationLike = Union[Configuration, Sequence[int]]


def as_configuration(cfg: ConfigurationLike) -> Configuration:
    if isinstance(cfg, Configuration):
        return cfg
    return Configuration(labels=cfg)


def check_configuration(instance: Instance, cfg: ConfigurationLike) -> np.ndarray:
    """Checks ``cfg`` against ``instance`` and returns its labels as an
    integer array.

    Raises:
        InvalidConfiguration: on a length mismatch, or a label outside the
            allowed set of its vertex.
    """
    cfg = as_configuration(cfg)
    if len(cfg) != instance.num_vertices:
        raise InvalidConfiguration(
            "Configuration has %(found)s labels for %(n)s vertices",
            code="configuration-length",
            params={"found": len(cfg), "n": instance.num_vertices},
        )
    for i, a in enumerate(cfg):
        if a not in instance.labels_of(i):
            raise InvalidConfiguration(
                "Label %(label)s is not allowed on vertex %(vertex)s",
                code="label-not-allowed",
                params={"label": a, "vertex": i},
            )
    return np.array(cfg.labels, dtype=np.intp)


def _as_alphas(value) -> np.ndarray:
    array = np.array(value, dtype=np.float64)
    if array.size == 0:
        array = array.reshape(0, 2)
    return _readonly(array)


@attr.s(frozen=True, slots=True)
class Partition(BaseModel):
    """Per-edge split ``(alpha_uv, alpha_vu)`` of the edge potentials between
    the tail and the head of each edge."""

    alphas = attr.ib(
        type=np.ndarray,
        converter=_as_alphas,
        eq=attr.cmp_using(eq=np.array_equal),
        hash=False,
    )

    @alphas.validator
    def check_alphas(self, attribute, value):
        """Checks shape, nonnegativity and that each pair sums to one."""
        if value.ndim != 2 or value.shape[1] != 2:
            raise ValidationError(
                "Partition must hold one pair per edge, got shape %(shape)s",
                code="partition-shape",
                params={"shape": value.shape},
            )
        if np.any(value < 0) or not np.all(np.isfinite(value)):
            raise ValidationError(
                "Partition coefficients must be finite and nonnegative",
                code="negative-alpha",
            )
        bad = np.flatnonzero(np.abs(value.sum(axis=1) - 1.0) > PARTITION_TOLERANCE)
        if bad.size:
            raise ValidationError(
                "Coefficients of edge %(edge)s do not sum to 1",
                code="alpha-sum",
                params={"edge": int(bad[0])},
            )

    @classmethod
    def uniform(cls, instance: Instance) -> "Partition":
        """The symmetric split (1/2, 1/2) on every edge."""
        return cls(alphas=np.full((instance.m, 2), 0.5))

    def __len__(self) -> int:
        return len(self.alphas)

    def check_for(self, instance: Instance) -> None:
        if len(self) != instance.m:
            raise ValidationError(
                "Partition has %(found)s entries for %(m)s edges",
                code="partition-length",
                params={"found": len(self), "m": instance.m},
            )

    def restrict(self, edge_ids: Sequence[int]) -> "Partition":
        return Partition(alphas=self.alphas[list(edge_ids)].reshape(-1, 2))


@attr.s(frozen=True, slots=True)
class BalanceReport(BaseModel):
    """Per-vertex minima (balancers) and maxima of the folded functions."""

    balancers = attr.ib(
        type=Tuple[float, ...], converter=lambda xs: tuple(float(x) for x in xs)
    )
    maxima = attr.ib(
        type=Tuple[float, ...], converter=lambda xs: tuple(float(x) for x in xs)
    )
    alpha_star = attr.ib(type=float, converter=float)
    """Least alpha for which the instance is alpha-balanced, or
    :data:`UNBALANCED`."""

    @property
    def balanced(self) -> bool:
        return self.alpha_star != UNBALANCED

    def to_dict(self):
        d = super().to_dict()
        if not self.balanced:
            d["alpha_star"] = None
        return d


def resolve_partition(instance: Instance, part: Optional[Partition]) -> Partition:
    """``part`` checked against ``instance``, or the uniform partition."""
    if part is None:
        return Partition.uniform(instance)
    part.check_for(instance)
    return part


def graph_of(instance: Instance) -> nx.Graph:
    """Undirected simple graph of ``instance`` on nodes ``0..n-1``."""
    graph = nx.Graph()
    graph.add_nodes_from(range(instance.num_vertices))
    graph.add_edges_from(instance.edges)
    return graph


def vertex_mask(instance: Instance, vertices: Iterable[int]) -> np.ndarray:
    """Boolean membership array of ``vertices``.

    Raises:
        ValidationError: if a vertex id is unknown.
    """
    mask = np.zeros(instance.num_vertices, dtype=bool)
    for v in vertices:
        if not 0 <= v < instance.num_vertices:
            raise ValidationError(
                "Unknown vertex %(vertex)s", code="unknown-vertex", params={"vertex": v}
            )
        mask[v] = True
    return mask


def edge_coefficients(
    instance: Instance, part: Partition, vertices: Iterable[int]
) -> np.ndarray:
    """Weight of every edge potential in the folded objective over
    ``vertices``: ``alpha_uv * [u in U] + alpha_vu * [v in U]``."""
    mask = vertex_mask(instance, vertices)
    tails, heads = instance.endpoints()
    return part.alphas[:, 0] * mask[tails] + part.alphas[:, 1] * mask[heads]


def _ordered_sum(values: Iterable[float]) -> float:
    total = 0.0
    for value in values:
        total += value
    return total


def _terms(instance: Instance, labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    tails, heads = instance.endpoints()
    vertex_terms = instance.vertex_potentials[np.arange(instance.num_vertices), labels]
    edge_terms = instance.edge_potentials[
        np.arange(instance.m), labels[tails], labels[heads]
    ]
    return vertex_terms, edge_terms


def energy(instance: Instance, cfg: ConfigurationLike) -> float:
    """Sum of all vertex and edge potentials under ``cfg``, added up in
    vertex order then edge order.

    >>> inst = Instance(num_vertices=2, q=2, edges=[(0, 1)],
    ...                 vertex_potentials=[[1, 2], [3, 4]],
    ...                 edge_potentials=[[[5, 6], [7, 8]]])
    >>> energy(inst, [1, 0])
    12.0
    """
    labels = check_configuration(instance, cfg)
    vertex_terms, edge_terms = _terms(instance, labels)
    return _ordered_sum(itertools.chain(vertex_terms.tolist(), edge_terms.tolist()))


def folded_energy(
    instance: Instance, part: Partition, vertices: Iterable[int], cfg: ConfigurationLike
) -> float:
    """Sum of the folded functions ``f_i`` of ``vertices`` under ``cfg``."""
    part.check_for(instance)
    labels = check_configuration(instance, cfg)
    mask = vertex_mask(instance, vertices)
    coefficients = edge_coefficients(instance, part, np.flatnonzero(mask))
    vertex_terms, edge_terms = _terms(instance, labels)
    return _ordered_sum(
        itertools.chain(
            vertex_terms[mask].tolist(),
            (coefficients * edge_terms)[coefficients > 0].tolist(),
        )
    )


def folded_values(
    instance: Instance, part: Partition, cfg: ConfigurationLike
) -> np.ndarray:
    """Value of every folded function ``f_i`` under ``cfg``."""
    part.check_for(instance)
    labels = check_configuration(instance, cfg)
    tails, heads = instance.endpoints()
    vertex_terms, edge_terms = _terms(instance, labels)
    n = instance.num_vertices
    return (
        vertex_terms
        + np.bincount(tails, weights=part.alphas[:, 0] * edge_terms, minlength=n)
        + np.bincount(heads, weights=part.alphas[:, 1] * edge_terms, minlength=n)
    )


def to_undirected(instance: Instance) -> Instance:
    """Merges every group of arcs on the same vertex pair into one undirected
    edge, oriented like the first of them, whose table is the sum of the
    (transposed where needed) arc tables. Energies are preserved exactly."""
    if not instance.directed:
        raise PreconditionError(
            "Instance is already undirected", code="undirected-instance"
        )
    index: Dict[Tuple[int, int], int] = {}
    edges: List[Tuple[int, int]] = []
    tables: List[np.ndarray] = []
    for e, (u, v) in enumerate(instance.edges):
        table = instance.edge_potentials[e]
        key = (min(u, v), max(u, v))
        if key in index:
            position = index[key]
            if edges[position] == (u, v):
                tables[position] = tables[position] + table
            else:
                tables[position] = tables[position] + table.T
        else:
            index[key] = len(edges)
            edges.append((u, v))
            tables.append(table.copy())
    return attr.evolve(
        instance,
        edges=edges,
        edge_potentials=np.array(tables).reshape(len(edges), instance.q, instance.q),
        directed=False,
    )


def as_undirected(instance: Instance, part: Optional[Partition]) -> Instance:
    """``instance`` itself when undirected; its merged undirected instance
    otherwise, provided no explicit partition was requested for the arcs."""
    if not instance.directed:
        return instance
    if part is not None:
        raise ParameterError(
            "A partition cannot be applied to a directed instance; "
            "convert it with to_undirected first",
            code="directed-partition",
        )
    logger.info("Merging %d arcs into an undirected instance", instance.m)
    return to_undirected(instance)


def require_nonnegative(instance: Instance, context: str) -> None:
    """Raises :class:`DomainError` unless every potential is nonnegative,
    which guarantees ``f_i >= 0`` under any partition."""
    for name, table in (
        ("vertex", instance.vertex_potentials),
        ("edge", instance.edge_potentials),
    ):
        negative = np.argwhere(table < 0)
        if negative.size:
            where = int(negative[0][0])
            raise DomainError(
                "%(context)s requires every f_i >= 0, i.e. nonnegative potentials; "
                "%(kind)s %(where)s has entry %(value)g",
                code="negative-potential",
                params={
                    "context": context,
                    "kind": name,
                    "where": where,
                    "value": float(table[tuple(negative[0])]),
                },
            )


def incidence(instance: Instance) -> List[List[int]]:
    """Ids of the edges incident to each vertex, in edge order."""
    incident: List[List[int]] = [[] for _ in range(instance.num_vertices)]
    for e, (u, v) in enumerate(instance.edges):
        incident[u].append(e)
        incident[v].append(e)
    return incident


def folded_table(
    instance: Instance,
    part: Partition,
    vertex: int,
    *,
    cap: int = DEFAULT_BALANCE_CAP,
    incident: Optional[Sequence[Sequence[int]]] = None,
) -> Tuple[Tuple[int, ...], np.ndarray]:
    """Tabulates ``f_vertex`` over its closed neighbourhood.

    Returns:
        ``(scope, table)`` where ``scope`` is ``vertex`` followed by its
        neighbours in ascending order, and ``table`` has one axis of length
        ``q`` per scope vertex.

    Raises:
        CapacityError: if the table would have more than ``cap`` entries.
    """
    if incident is None:
        incident = incidence(instance)
    neighbours = sorted(
        {w for e in incident[vertex] for w in instance.edges[e] if w != vertex}
    )
    scope = (vertex, *neighbours)
    q = instance.q
    if q ** len(scope) > cap:
        raise CapacityError(
            "f_%(vertex)s spans %(size)s vertices: %(q)s^%(size)s entries exceed "
            "the cap of %(cap)s",
            code="balance-cap-exceeded",
            params={"vertex": vertex, "size": len(scope), "q": q, "cap": cap},
        )
    position = {w: axis for axis, w in enumerate(scope)}
    table = np.zeros((q,) * len(scope))
    shape = [1] * len(scope)
    shape[0] = q
    table += instance.vertex_potentials[vertex].reshape(shape)
    for e in incident[vertex]:
        u, v = instance.edges[e]
        if u == vertex:
            other, weight, pair = v, part.alphas[e, 0], instance.edge_potentials[e]
        else:
            other, weight, pair = u, part.alphas[e, 1], instance.edge_potentials[e].T
        shape = [1] * len(scope)
        shape[0] = q
        shape[position[other]] = q
        table += weight * pair.reshape(shape)
    return scope, table


def balance_report(
    instance: Instance,
    part: Optional[Partition] = None,
    *,
    cap: int = DEFAULT_BALANCE_CAP,
) -> BalanceReport:
    """Exact minimum and maximum of every folded function over the valid
    configurations of its closed neighbourhood, and the balance ratio.

    Raises:
        DomainError: on a negative potential.
        CapacityError: when some closed neighbourhood is too large to
            enumerate.
    """
    require_nonnegative(instance, "balance analysis")
    part = resolve_partition(instance, part)
    incident = incidence(instance)
    balancers, maxima = [], []
    alpha_star = 1.0
    for i in range(instance.num_vertices):
        scope, table = folded_table(instance, part, i, cap=cap, incident=incident)
        valid = table[np.ix_(*(instance.labels_of(w) for w in scope))]
        low, high = float(valid.min()), float(valid.max())
        balancers.append(low)
        maxima.append(high)
        if low > 0:
            alpha_star = max(alpha_star, high / low)
        elif high > 0:
            alpha_star = UNBALANCED
    logger.debug("Balance ratio %s over %d vertices", alpha_star, instance.num_vertices)
    return BalanceReport(balancers=balancers, maxima=maxima, alpha_star=alpha_star)
