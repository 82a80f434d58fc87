# Copyright (C) 2026 The layercut developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

"""Exhaustive optimizers, used as ground truth for the approximation schemes.

Configurations are enumerated odometer-style (vertex 0 most significant,
labels ascending) in blocks evaluated with :mod:`numpy`; the first strictly
better block optimum wins, so ties resolve to the lexicographically smallest
configuration.
"""

import itertools
import logging
from typing import Iterable, Iterator, Optional, Tuple

import numpy as np
from typing_extensions import Final

from .exceptions import CapacityError, ParameterError
from .model import (
    Configuration,
    Instance,
    Objective,
    Partition,
    edge_coefficients,
    vertex_mask,
)

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_CAP: Final = 10**7
"""Largest number of configurations :func:`exact_opt` agrees to enumerate."""

BLOCK_SIZE: Final = 4096


def _check_cap(instance: Instance, cap: int) -> None:
    size = instance.search_space
    if size > cap:
        raise CapacityError(
            "Exhaustive search over %(size)s configurations exceeds the cap of "
            "%(cap)s",
            code="oracle-cap-exceeded",
            params={"size": size, "cap": cap},
        )


def _blocks(instance: Instance) -> Iterator[np.ndarray]:
    configurations = itertools.product(*instance.domains)
    while True:
        block = list(itertools.islice(configurations, BLOCK_SIZE))
        if not block:
            return
        yield np.array(block, dtype=np.intp).reshape(len(block), instance.num_vertices)


def _edge_terms(instance: Instance, block: np.ndarray) -> np.ndarray:
    tails, heads = instance.endpoints()
    return instance.edge_potentials[
        np.arange(instance.m), block[:, tails], block[:, heads]
    ]


def _vertex_terms(instance: Instance, block: np.ndarray) -> np.ndarray:
    return instance.vertex_potentials[np.arange(instance.num_vertices), block]


def _search(
    instance: Instance, objective: Objective, scores
) -> Tuple[float, Configuration]:
    best_value: Optional[float] = None
    best_labels = None
    for block in _blocks(instance):
        values = scores(block)
        position = objective.arg(values)
        if best_value is None or objective.improves(values[position], best_value):
            best_value = float(values[position])
            best_labels = block[position]
    assert best_value is not None and best_labels is not None
    return best_value, Configuration(labels=best_labels.tolist())


def exact_opt(
    instance: Instance,
    objective: Objective = Objective.MAX,
    vertices: Optional[Iterable[int]] = None,
    part: Optional[Partition] = None,
    *,
    cap: int = DEFAULT_ORACLE_CAP,
) -> Tuple[float, Configuration]:
    """Globally optimal energy, or folded energy over ``vertices`` when they
    are given, and the lexicographically smallest configuration attaining it.

    >>> from layercut.problems import encode_maxcut
    >>> import networkx as nx
    >>> exact_opt(encode_maxcut(nx.cycle_graph(4)))[0]
    4.0

    Raises:
        CapacityError: if there are more than ``cap`` configurations.
        ParameterError: if ``vertices`` is given without a partition.
    """
    _check_cap(instance, cap)
    n = instance.num_vertices
    if vertices is None:
        mask = np.ones(n, dtype=bool)
        coefficients = np.ones(instance.m)
    else:
        if part is None:
            raise ParameterError(
                "A folded objective needs a partition", code="missing-partition"
            )
        part.check_for(instance)
        mask = vertex_mask(instance, vertices)
        coefficients = edge_coefficients(instance, part, np.flatnonzero(mask))

    def scores(block):
        values = (_vertex_terms(instance, block) * mask).sum(axis=1)
        if instance.m:
            values = values + (_edge_terms(instance, block) * coefficients).sum(axis=1)
        return values

    value, cfg = _search(instance, objective, scores)
    logger.debug("Exhaustive %s optimum %s at %s", objective.value, value, cfg.labels)
    return value, cfg


def exact_opt_product(
    instance: Instance,
    part: Partition,
    *,
    cap: int = DEFAULT_ORACLE_CAP,
) -> Tuple[float, Configuration]:
    """Maximum over configurations of the product of all folded functions.

    Products are compared through their logarithms; the returned value is
    the product itself.
    """
    _check_cap(instance, cap)
    part.check_for(instance)
    n = instance.num_vertices
    tails, heads = instance.endpoints()
    tail_matrix = np.zeros((instance.m, n))
    tail_matrix[np.arange(instance.m), tails] = 1.0
    head_matrix = np.zeros((instance.m, n))
    head_matrix[np.arange(instance.m), heads] = 1.0

    def scores(block):
        folded = _vertex_terms(instance, block)
        if instance.m:
            edge_terms = _edge_terms(instance, block)
            folded = (
                folded
                + (part.alphas[:, 0] * edge_terms) @ tail_matrix
                + (part.alphas[:, 1] * edge_terms) @ head_matrix
            )
        with np.errstate(divide="ignore"):
            return np.log(folded).sum(axis=1)

    log_value, cfg = _search(instance, Objective.MAX, scores)
    return float(np.exp(log_value)), cfg
