"""
Exceptions raised by the cellnopt extension.

All classes derive from :py:mod:`salt.exceptions` so that loader modules and the
``cellnopt`` command line tool can handle them uniformly. Usage errors are plain
:py:class:`~salt.exceptions.SaltInvocationError` and runtime failures (empty
scoring, size guards) are :py:class:`~salt.exceptions.CommandExecutionError`.
"""

from salt.exceptions import CommandExecutionError  # pylint: disable=import-error
from salt.exceptions import SaltException  # pylint: disable=import-error
from salt.exceptions import SaltInvocationError  # pylint: disable=import-error


class CellNOptError(SaltException):
    """
    Base class of the errors raised while reading, transforming or training models
    """


class InputFormatError(CellNOptError):
    """
    A malformed input: reaction text, SIF or MIDAS file.

    ``lineno`` is 1-based, ``offset`` is a 0-based character offset.
    """

    def __init__(self, message, source=None, lineno=None, offset=None):
        self.reason = message
        self.source = source
        self.lineno = lineno
        self.offset = offset
        where = []
        if source is not None:
            where.append(str(source))
        if lineno is not None:
            where.append(f"line {lineno}")
        if offset is not None:
            where.append(f"offset {offset}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)


class ReactionParseError(InputFormatError):
    """
    Reaction text does not follow the ``A=B``, ``!A=B``, ``A^B=C``, ``A+B=C`` grammar
    """


class SifFormatError(InputFormatError):
    """
    Malformed SIF line or synthetic AND node
    """


class MidasFormatError(InputFormatError):
    """
    Malformed MIDAS header or cell; ``column`` names the offending header
    """

    def __init__(self, message, source=None, lineno=None, column=None):
        self.column = column
        if column is not None:
            message = f"column {column!r}: {message}"
        super().__init__(message, source=source, lineno=lineno)


class NameLookupError(SaltInvocationError):
    """
    Unknown experiment, protein or node name
    """


def exit_code(exc):
    """
    Map an exception to the exit status of the ``cellnopt`` command.

    0 is success, 1 a usage error, 2 an input format error and 3 any
    runtime error.
    """
    if isinstance(exc, InputFormatError):
        return 2
    if isinstance(exc, SaltInvocationError):
        return 1
    return 3


__all__ = [
    "CellNOptError",
    "CommandExecutionError",
    "InputFormatError",
    "MidasFormatError",
    "NameLookupError",
    "ReactionParseError",
    "SaltInvocationError",
    "SifFormatError",
    "exit_code",
]
