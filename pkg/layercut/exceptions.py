# Copyright (C) 2015-2026  The layercut developers
# See the AUTHORS file at the top-level directory of this distribution
#
# The ValidationError code derives from Django, and is available under the
# following license terms:
#
# Copyright (c) Django Software Foundation and individual contributors. All
# rights reserved.
#
# Redistribution and use in source and binary forms, with or without
# modification, are permitted provided that the following conditions are met:
#
#     1. Redistributions of source code must retain the above copyright notice,
#        this list of conditions and the following disclaimer.
#
#     2. Redistributions in binary form must reproduce the above copyright
#        notice, this list of conditions and the following disclaimer in the
#        documentation and/or other materials provided with the distribution.
#
#     3. Neither the name of Django nor the names of its contributors may be
#        used to endorse or promote products derived from this software without
#        specific prior written permission.
#
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS"
# AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE
# IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE
# ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT OWNER OR CONTRIBUTORS BE
# LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR
# CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF
# SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS; OR BUSINESS
# INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN
# CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE)
# ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE
# POSSIBILITY OF SUCH DAMAGE.

"""Errors raised by layercut.

Every error carries a human readable ``message``, a machine readable
``code`` and optional ``params`` interpolated into the message with ``%``.
The ``exit_code`` class attribute is what the command line returns when the
error escapes a subcommand.
"""


class LayercutError(Exception):
    """Base class of every error raised by layercut."""

    exit_code = 1

    def __init__(self, message, code=None, params=None):
        super().__init__(message, code, params)
        self.message = message
        self.code = code
        self.params = params

    def __str__(self):
        message = self.message
        if self.params:
            message %= self.params
        return message

    def __repr__(self):
        return "%s(%r, code=%r)" % (type(self).__name__, str(self), self.code)


class ValidationError(LayercutError):
    """An error while validating data.

    The `message` argument can be a single error or a list of errors. What
    we define as an "error" can be either a simple string or an instance of
    ValidationError with its message attribute set; several errors are
    flattened into ``error_list``.
    """

    exit_code = 2

    def __init__(self, message, code=None, params=None):
        if isinstance(message, list) and len(message) == 1:
            message = message[0]

        if isinstance(message, ValidationError):
            if len(message.error_list) == 1:
                message, code, params = (message.message, message.code, message.params)
            else:
                message = message.error_list

        if isinstance(message, list):
            super().__init__("; ".join(str(m) for m in message), code, params)
            self.error_list = []
            for message in message:
                # Normalize plain strings to instances of ValidationError.
                if not isinstance(message, ValidationError):
                    message = ValidationError(message)
                self.error_list.extend(message.error_list)
            self.params = None
        else:
            super().__init__(message, code, params)
            self.error_list = [self]

    @property
    def messages(self):
        return list(self)

    @property
    def codes(self):
        return [error.code for error in self.error_list]

    def __iter__(self):
        for error in self.error_list:
            message = error.message
            if error.params:
                message %= error.params
            yield message

    def __str__(self):
        if len(self.error_list) == 1:
            return super().__str__()
        return repr(list(self))


class InvalidConfiguration(ValidationError):
    """A configuration has the wrong length, or a label outside the allowed
    set of its vertex."""


class PreconditionError(ValidationError):
    """An input breaks the structural precondition of an operation (for
    instance an invalid tree decomposition given to the dynamic program)."""


class ConsistencyError(PreconditionError):
    """Two inputs that must describe the same graph disagree."""


class DegeneracyError(ValidationError):
    """A straight-line drawing is not in general position."""


class CapacityError(LayercutError):
    """An enumeration or table size exceeds its configured cap."""

    exit_code = 3


class DomainError(LayercutError):
    """The instance lies outside the class an algorithm is defined for
    (negative potentials, unbalanced folded functions, ...)."""

    exit_code = 4


class ParameterError(LayercutError):
    """An algorithm parameter is out of range or unsupported."""

    exit_code = 4
