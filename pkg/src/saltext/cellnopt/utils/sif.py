"""
Simple Interaction Format (SIF) reader and writer

.. versionadded:: 1.0.0

Each line reads ``source relation target [target ...]`` where the relation is
``1`` (activation) or ``-1`` (inhibition). AND gates are stored through
synthetic nodes named ``and<k>``: every input points to ``and<k>`` with its own
sign and ``and<k>`` points to the gate output with relation ``1``.
"""

import io
import logging
from dataclasses import dataclass

import salt.utils.files  # pylint: disable=import-error

from saltext.cellnopt.exceptions import SifFormatError
from saltext.cellnopt.utils.reactions import GATE_NAME
from saltext.cellnopt.utils.reactions import Reaction
from saltext.cellnopt.utils.reactions import Sign
from saltext.cellnopt.utils.reactions import canonical
from saltext.cellnopt.utils.reactions import is_node_id

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SifDocument:
    """
    Reactions read from (or destined to) a SIF file
    """

    reactions: tuple = ()
    source_name: str = "<memory>"

    def __post_init__(self):
        object.__setattr__(self, "reactions", canonical(self.reactions))

    @property
    def nodes(self):
        nodes = set()
        for reaction in self.reactions:
            nodes |= reaction.species
        return frozenset(nodes)


def _lines(stream):
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    yield from enumerate(stream, start=1)


def read_sif(stream, source_name="<stream>"):
    """
    Read SIF text (a string or an iterable of lines) into a
    :py:class:`SifDocument`.

    Blank lines and lines starting with ``#`` are skipped. Raises
    :py:class:`~saltext.cellnopt.exceptions.SifFormatError`.
    """
    edges = []
    for lineno, line in _lines(stream):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if len(fields) < 3:
            raise SifFormatError(
                f"expected at least 3 fields, found {len(fields)}",
                source=source_name,
                lineno=lineno,
            )
        try:
            sign = Sign.from_relation(fields[1])
        except ValueError as exc:
            raise SifFormatError(str(exc), source=source_name, lineno=lineno) from exc
        for name in [fields[0]] + fields[2:]:
            if not is_node_id(name):
                raise SifFormatError(
                    f"invalid species name {name!r}", source=source_name, lineno=lineno
                )
        for target in fields[2:]:
            edges.append((fields[0], sign, target, lineno))

    gate_inputs = {}
    gate_outputs = {}
    simple = []
    for source, sign, target, lineno in edges:
        if GATE_NAME.match(source):
            gate_outputs.setdefault(source, []).append((sign, target, lineno))
            if GATE_NAME.match(target):
                raise SifFormatError(
                    f"AND node {source!r} points to another AND node {target!r}",
                    source=source_name,
                    lineno=lineno,
                )
        elif GATE_NAME.match(target):
            gate_inputs.setdefault(target, set()).add((source, sign))
        else:
            simple.append((source, sign, target, lineno))

    reactions = []
    for source, sign, target, lineno in simple:
        if source == target:
            raise SifFormatError(
                f"self-loop on {source!r} within one reaction",
                source=source_name,
                lineno=lineno,
            )
        reactions.append(Reaction(((source, sign),), target))

    for gate in sorted(set(gate_inputs) | set(gate_outputs)):
        inputs = gate_inputs.get(gate, set())
        outputs = {(sign, target) for sign, target, _ in gate_outputs.get(gate, [])}
        if len(outputs) != 1 or len(inputs) < 2:
            raise SifFormatError(
                f"AND node {gate!r} needs 1 outgoing and at least 2 incoming edges, "
                f"found {len(outputs)} and {len(inputs)}",
                source=source_name,
            )
        ((sign, target),) = outputs
        names = [name for name, _ in inputs]
        if sign is not Sign.ACTIVATE:
            raise SifFormatError(
                f"AND node {gate!r} must point to its output with relation 1",
                source=source_name,
            )
        if len(set(names)) != len(names) or target in names:
            raise SifFormatError(
                f"AND node {gate!r} has contradictory or self-looping inputs",
                source=source_name,
            )
        reactions.append(Reaction(tuple(inputs), target))

    document = SifDocument(tuple(reactions), source_name)
    log.debug("Read %d reaction(s) from %s", len(document.reactions), source_name)
    return document


def write_sif(document):
    """
    Serialize a :py:class:`SifDocument` as tab separated SIF text.

    Reactions are written in canonical order; AND gates are numbered
    ``and1``, ``and2``, ... in that order.
    """
    lines = []
    gate = 0
    for reaction in canonical(document.reactions):
        if reaction.is_and:
            gate += 1
            node = f"and{gate}"
            for name, sign in reaction.inputs:
                lines.append(f"{name}\t{sign.relation}\t{node}\n")
            lines.append(f"{node}\t1\t{reaction.output}\n")
        else:
            ((name, sign),) = reaction.inputs
            lines.append(f"{name}\t{sign.relation}\t{reaction.output}\n")
    return "".join(lines)


def read_sif_file(path):
    """
    Read a SIF file from disk
    """
    with salt.utils.files.fopen(path, "r") as handle:
        return read_sif(handle.read(), source_name=str(path))


def write_sif_file(document, path):
    """
    Write a SIF file to disk
    """
    with salt.utils.files.fopen(path, "w") as handle:
        handle.write(write_sif(document))
    return str(path)
