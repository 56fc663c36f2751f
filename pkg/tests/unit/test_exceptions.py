import pytest

from saltext.cellnopt import exceptions

try:
    from salt.exceptions import CommandExecutionError
    from salt.exceptions import SaltInvocationError
except ImportError:
    pass


@pytest.mark.parametrize(
    "exc,code",
    [
        (exceptions.SifFormatError("bad"), 2),
        (exceptions.MidasFormatError("bad"), 2),
        (exceptions.ReactionParseError("bad"), 2),
        (exceptions.NameLookupError("who"), 1),
        (SaltInvocationError("usage"), 1),
        (CommandExecutionError("boom"), 3),
        (exceptions.CellNOptError("boom"), 3),
    ],
)
def test_exit_code(exc, code):
    assert exceptions.exit_code(exc) == code


def test_input_format_error_location():
    exc = exceptions.ReactionParseError("missing '='", source="A+B", offset=3)
    assert str(exc) == "A+B, offset 3: missing '='"
    assert exc.reason == "missing '='"
    assert exc.lineno is None


def test_midas_format_error_column():
    exc = exceptions.MidasFormatError("not a number", source="data.csv", lineno=3, column="DV:AKT")
    assert str(exc) == "data.csv, line 3: column 'DV:AKT': not a number"
    assert exc.column == "DV:AKT"
    assert exc.offset is None


def test_plain_message():
    assert str(exceptions.SifFormatError("empty")) == "empty"
