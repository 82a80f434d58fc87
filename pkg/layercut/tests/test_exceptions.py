# Copyright (C) 2015-2026  The layercut developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import unittest

import pytest

from layercut import exceptions
from layercut.model import Instance


class TestValidationError(unittest.TestCase):
    def test_params_interpolated(self):
        exc = exceptions.ValidationError(
            "Vertex %(i)s is bad", code="bad-vertex", params={"i": 3}
        )
        self.assertEqual(str(exc), "Vertex 3 is bad")
        self.assertEqual(exc.code, "bad-vertex")
        self.assertEqual(exc.messages, ["Vertex 3 is bad"])

    def test_aggregated_errors(self):
        exc = exceptions.ValidationError(
            [
                exceptions.ValidationError("first", code="a"),
                exceptions.ValidationError("second %(x)s", code="b", params={"x": 1}),
                "third",
            ]
        )
        self.assertEqual(exc.messages, ["first", "second 1", "third"])
        self.assertEqual(exc.codes, ["a", "b", None])
        self.assertIsInstance(str(exc), str)

    def test_single_error_list_unwrapped(self):
        inner = exceptions.ValidationError("only", code="single")
        exc = exceptions.ValidationError([inner])
        self.assertEqual(exc.code, "single")
        self.assertEqual(str(exc), "only")

    def test_instance_errors_aggregated(self):
        with self.assertRaises(exceptions.ValidationError) as cm:
            Instance(
                num_vertices=2,
                q=2,
                edges=[(0, 0), (0, 5)],
                vertex_potentials=[[0, 0], [0, 0]],
                edge_potentials=[[[0, 0], [0, 0]], [[0, 0], [0, 0]]],
            )
        self.assertEqual(set(cm.exception.codes), {"self-loop", "unknown-vertex"})


@pytest.mark.parametrize(
    "cls,exit_code",
    [
        (exceptions.LayercutError, 1),
        (exceptions.ValidationError, 2),
        (exceptions.InvalidConfiguration, 2),
        (exceptions.PreconditionError, 2),
        (exceptions.ConsistencyError, 2),
        (exceptions.DegeneracyError, 2),
        (exceptions.CapacityError, 3),
        (exceptions.DomainError, 4),
        (exceptions.ParameterError, 4),
    ],
)
def test_exit_codes(cls, exit_code):
    assert cls.exit_code == exit_code
    assert issubclass(cls, exceptions.LayercutError)


def test_repr_shows_code():
    exc = exceptions.CapacityError("too big: %(n)s", code="cap", params={"n": 9})
    assert repr(exc) == "CapacityError('too big: 9', code='cap')"
