"""
Reaction grammar of logic hyperedges

.. versionadded:: 1.0.0

A reaction is one logic term feeding a single output species:

* ``A=B``: activation of ``B`` by ``A``
* ``!A=B``: inhibition of ``B`` by ``A``
* ``A^!B=C``: AND gate, ``C`` is on when ``A`` is on and ``B`` is off
* ``A+B=C``: shorthand for the two reactions ``A=C`` and ``B=C``

Several reactions sharing an output combine by OR, so OR is never stored as a
reaction kind. ``!`` binds to a single species.
"""

import enum
import logging
import re
from dataclasses import dataclass

from salt.exceptions import SaltInvocationError  # pylint: disable=import-error

from saltext.cellnopt.exceptions import ReactionParseError

log = logging.getLogger(__name__)

RESERVED_CHARACTERS = frozenset("!^+=")
RELATION_TOKENS = frozenset(("1", "-1"))
# names of the synthetic AND gate nodes of SIF files
GATE_NAME = re.compile(r"^and\d+$")


class Sign(enum.Enum):
    """
    Sign of a reaction input
    """

    ACTIVATE = "activate"
    INHIBIT = "inhibit"

    @property
    def rank(self):
        return 0 if self is Sign.ACTIVATE else 1

    @property
    def relation(self):
        """
        SIF relation token
        """
        return "1" if self is Sign.ACTIVATE else "-1"

    @classmethod
    def from_relation(cls, token):
        if token == "1":
            return cls.ACTIVATE
        if token == "-1":
            return cls.INHIBIT
        raise ValueError(f"relation must be 1 or -1, not {token!r}")

    def negate(self):
        return Sign.INHIBIT if self is Sign.ACTIVATE else Sign.ACTIVATE

    def compose(self, other):
        """
        Sign of a path made of ``self`` followed by ``other``
        """
        return Sign.ACTIVATE if self is other else Sign.INHIBIT


def _first_invalid(name):
    for index, char in enumerate(name):
        if char in RESERVED_CHARACTERS or char.isspace():
            return index
    return None


def is_node_id(name):
    """
    Return True if ``name`` (already stripped) is a valid species name
    """
    return (
        isinstance(name, str)
        and bool(name)
        and name not in RELATION_TOKENS
        and _first_invalid(name) is None
    )


def is_gate_name(name):
    return bool(GATE_NAME.match(name))


def validate_node_id(name):
    """
    Return ``name`` stripped of surrounding whitespace, or raise
    :py:class:`~salt.exceptions.SaltInvocationError` if it is not a valid species name.
    """
    stripped = name.strip() if isinstance(name, str) else name
    if not is_node_id(stripped):
        raise SaltInvocationError(f"Invalid species name: {name!r}")
    if is_gate_name(stripped):
        raise SaltInvocationError(f"Species name {stripped!r} is reserved for AND gate nodes")
    return stripped


def _input_key(item):
    return (item[0], item[1].rank)


@dataclass(frozen=True)
class Reaction:
    """
    One logic hyperedge: signed ``inputs`` feeding ``output``.

    ``inputs`` is stored in canonical order, sorted by (name, sign).
    """

    inputs: tuple
    output: str

    def __post_init__(self):
        inputs = []
        for name, sign in self.inputs:
            inputs.append((validate_node_id(name), Sign(sign)))
        if not inputs:
            raise SaltInvocationError("A reaction needs at least one input")
        if len(set(inputs)) != len(inputs):
            raise SaltInvocationError(f"Duplicate input in reaction to {self.output!r}")
        names = [name for name, _ in inputs]
        if len(set(names)) != len(names):
            raise SaltInvocationError(
                f"Reaction to {self.output!r} uses a species both as activator and inhibitor"
            )
        output = validate_node_id(self.output)
        if output in names:
            raise SaltInvocationError(f"Output {output!r} appears among its own inputs")
        object.__setattr__(self, "inputs", tuple(sorted(inputs, key=_input_key)))
        object.__setattr__(self, "output", output)

    @property
    def kind(self):
        return "and" if len(self.inputs) > 1 else "simple"

    @property
    def is_and(self):
        return len(self.inputs) > 1

    @property
    def input_names(self):
        return tuple(name for name, _ in self.inputs)

    @property
    def species(self):
        return frozenset(self.input_names) | {self.output}

    def sign_of(self, node):
        """
        Sign with which ``node`` enters this reaction, None if it is not an input
        """
        for name, sign in self.inputs:
            if name == node:
                return sign
        return None

    def renamed(self, mapping):
        """
        Rename species through ``mapping``; returns None when the renamed
        reaction would be contradictory or a self-loop.
        """
        literals = [(mapping.get(name, name), sign) for name, sign in self.inputs]
        return combine(literals, mapping.get(self.output, self.output))

    def __str__(self):
        return format_reaction(self)


def combine(literals, output):
    """
    Build a reaction from possibly repeated literals.

    Repeated literals collapse. Returns None if the conjunction is contradictory
    (``X`` and ``!X``) or if ``output`` appears among the inputs.
    """
    unique = set(literals)
    names = [name for name, _ in unique]
    if len(set(names)) != len(names) or output in names:
        return None
    return Reaction(tuple(unique), output)


def reaction_sort_key(reaction):
    """
    Canonical ordering of reactions: by output, then arity, then inputs
    """
    return (
        reaction.output,
        len(reaction.inputs),
        tuple(_input_key(item) for item in reaction.inputs),
    )


def canonical(reactions):
    """
    Deduplicate and sort reactions into canonical order
    """
    return tuple(sorted(set(reactions), key=reaction_sort_key))


def _token(text, start, end, what):
    segment = text[start:end]
    name = segment.strip()
    if not name:
        raise ReactionParseError(f"empty {what}", source=text, offset=start)
    offset = start + len(segment) - len(segment.lstrip())
    bad = _first_invalid(name)
    if bad is not None:
        raise ReactionParseError(
            f"illegal character {name[bad]!r} in {what}", source=text, offset=offset + bad
        )
    if name in RELATION_TOKENS:
        raise ReactionParseError(f"{name!r} is not a species name", source=text, offset=offset)
    if is_gate_name(name):
        raise ReactionParseError(
            f"{name!r} is reserved for AND gate nodes", source=text, offset=offset
        )
    return name, offset


def _literal(text, start, end):
    segment = text[start:end]
    stripped = segment.lstrip()
    offset = start + len(segment) - len(stripped)
    if stripped.startswith("!"):
        name, name_offset = _token(text, offset + 1, end, "operand")
        return name, Sign.INHIBIT, name_offset
    name, name_offset = _token(text, start, end, "operand")
    return name, Sign.ACTIVATE, name_offset


def parse_reaction(text):
    """
    Parse one reaction expression into a list of canonical reactions.

    ``A+B=C`` yields two simple reactions; every other form yields one.
    Raises :py:class:`~saltext.cellnopt.exceptions.ReactionParseError` carrying the
    character offset of the problem.
    """
    if not isinstance(text, str):
        raise ReactionParseError(f"reaction must be text, not {type(text).__name__}", offset=0)
    equals = [index for index, char in enumerate(text) if char == "="]
    if not equals:
        raise ReactionParseError("missing '='", source=text, offset=len(text))
    if len(equals) > 1:
        raise ReactionParseError("more than one '='", source=text, offset=equals[1])
    split = equals[0]
    output, output_offset = _token(text, split + 1, len(text), "output")

    operators = [(index, char) for index, char in enumerate(text[:split]) if char in "+^"]
    if operators:
        first = operators[0][1]
        for index, char in operators:
            if char != first:
                raise ReactionParseError("cannot mix '+' and '^'", source=text, offset=index)
    bounds = [-1] + [index for index, _ in operators] + [split]
    literals = [_literal(text, start + 1, end) for start, end in zip(bounds, bounds[1:])]

    for name, _, offset in literals:
        if name == output:
            raise ReactionParseError(
                f"output {output!r} appears among its inputs", source=text, offset=offset
            )

    if operators and operators[0][1] == "^":
        seen = {}
        for name, sign, offset in literals:
            if name in seen:
                problem = "repeated" if seen[name] is sign else "both activating and inhibiting"
                raise ReactionParseError(
                    f"operand {name!r} is {problem}", source=text, offset=offset
                )
            seen[name] = sign
        return [Reaction(tuple((name, sign) for name, sign, _ in literals), output)]

    reactions = {Reaction(((name, sign),), output) for name, sign, _ in literals}
    log.debug("Parsed %r into %d reaction(s), output at %d", text, len(reactions), output_offset)
    return list(canonical(reactions))


def format_reaction(reaction):
    """
    Canonical text of a reaction, e.g. ``A^!B=C``
    """
    lhs = "^".join(
        ("!" if sign is Sign.INHIBIT else "") + name for name, sign in reaction.inputs
    )
    return f"{lhs}={reaction.output}"
