"""
Annotated logic hypergraph and its preprocessing transformations

.. versionadded:: 1.0.0

A :py:class:`PknModel` is immutable; every transformation returns a new model.
The reaction tuple is kept in canonical order and its indexes are the positions
of a trained bitstring.
"""

import dataclasses
import itertools
import logging
from dataclasses import dataclass

import networkx as nx
from salt.exceptions import SaltInvocationError  # pylint: disable=import-error

from saltext.cellnopt.exceptions import NameLookupError
from saltext.cellnopt.utils.reactions import Sign
from saltext.cellnopt.utils.reactions import canonical
from saltext.cellnopt.utils.reactions import combine
from saltext.cellnopt.utils.reactions import parse_reaction
from saltext.cellnopt.utils.reactions import validate_node_id
from saltext.cellnopt.utils.sif import SifDocument

log = logging.getLogger(__name__)

ANNOTATIONS = ("stimuli", "inhibitors", "signals")


@dataclass(frozen=True)
class PknModel:
    """
    Prior knowledge network as logic reactions plus stimulus, inhibitor and
    signal annotations
    """

    nodes: frozenset = frozenset()
    reactions: tuple = ()
    stimuli: frozenset = frozenset()
    inhibitors: frozenset = frozenset()
    signals: frozenset = frozenset()
    expanded: bool = False
    compressed: bool = False

    def __post_init__(self):
        reactions = canonical(self.reactions)
        nodes = set(self.nodes)
        for reaction in reactions:
            nodes |= reaction.species
        object.__setattr__(self, "reactions", reactions)
        object.__setattr__(self, "nodes", frozenset(nodes))
        for attr in ANNOTATIONS:
            names = frozenset(getattr(self, attr))
            unknown = names - self.nodes
            if unknown:
                raise NameLookupError(
                    f"Unknown {attr} for this model: {', '.join(sorted(unknown))}"
                )
            object.__setattr__(self, attr, names)

    @classmethod
    def from_reactions(cls, reactions, **kwargs):
        parsed = []
        for reaction in reactions:
            if isinstance(reaction, str):
                parsed.extend(parse_reaction(reaction))
            else:
                parsed.append(reaction)
        return cls(reactions=tuple(parsed), **kwargs)

    @classmethod
    def from_sif(cls, document):
        return cls(reactions=document.reactions)

    def to_sif(self, source_name="<model>"):
        return SifDocument(self.reactions, source_name)

    @property
    def annotated(self):
        return self.stimuli | self.inhibitors | self.signals

    @property
    def and_gates(self):
        return tuple(reaction for reaction in self.reactions if reaction.is_and)

    def incoming(self, node):
        return tuple(reaction for reaction in self.reactions if reaction.output == node)

    def outgoing(self, node):
        return tuple(reaction for reaction in self.reactions if node in reaction.input_names)

    def index_of(self, reaction):
        return self.reactions.index(reaction)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def summary(self):
        return {
            "nodes": len(self.nodes),
            "reactions": len(self.reactions),
            "and_gates": len(self.and_gates),
            "stimuli": len(self.stimuli),
            "inhibitors": len(self.inhibitors),
            "signals": len(self.signals),
        }


def add_reaction(model, text):
    """
    Add every reaction parsed from ``text``; new species become nodes
    """
    return model.replace(reactions=model.reactions + tuple(parse_reaction(text)))


def remove_reaction(model, reaction):
    return model.replace(reactions=tuple(r for r in model.reactions if r != reaction))


def remove_node(model, node):
    """
    Remove a node, its reactions and its annotations
    """
    if node not in model.nodes:
        raise NameLookupError(f"Unknown node: {node!r}")
    return model.replace(
        nodes=model.nodes - {node},
        reactions=tuple(r for r in model.reactions if node not in r.species),
        stimuli=model.stimuli - {node},
        inhibitors=model.inhibitors - {node},
        signals=model.signals - {node},
    )


def annotate(model, stimuli=(), inhibitors=(), signals=()):
    """
    Replace the annotation sets; names unknown to the model raise
    :py:class:`~saltext.cellnopt.exceptions.NameLookupError` listing them all
    """
    requested = {"stimuli": stimuli, "inhibitors": inhibitors, "signals": signals}
    unknown = sorted(
        {name for names in requested.values() for name in names} - set(model.nodes)
    )
    if unknown:
        raise NameLookupError(f"Names absent from the model: {', '.join(unknown)}")
    return model.replace(**{attr: frozenset(names) for attr, names in requested.items()})


def annotate_from_midas(model, data):
    return annotate(
        model,
        stimuli=data.stimuli_names,
        inhibitors=data.inhibitor_names,
        signals=data.signal_names,
    )


def to_networkx(model):
    """
    Project the hypergraph on a :py:class:`networkx.MultiDiGraph` with one
    input -> output edge per reaction literal
    """
    graph = nx.MultiDiGraph()
    graph.add_nodes_from(sorted(model.nodes))
    for index, reaction in enumerate(model.reactions):
        for name, sign in reaction.inputs:
            graph.add_edge(name, reaction.output, sign=sign.value, reaction=index)
    return graph


def has_feedback(model):
    return not nx.is_directed_acyclic_graph(to_networkx(model))


def feedback_bound(model):
    """
    Nodes lying on a feedback loop, upstream of one or downstream of one
    """
    graph = to_networkx(model)
    looped = set()
    for component in nx.strongly_connected_components(graph):
        if len(component) > 1:
            looped |= component
    bound = set(looped)
    for node in looped:
        bound |= nx.ancestors(graph, node) | nx.descendants(graph, node)
    return frozenset(bound)


def expand_and_gates(model, max_inputs=2):
    """
    Add one AND reaction per combination of 2 to ``max_inputs`` simple inputs
    of every node. Combinations holding both ``X`` and ``!X`` are skipped.
    """
    if int(max_inputs) < 2:
        raise SaltInvocationError(f"max_inputs must be at least 2, got {max_inputs}")
    added = []
    for node in sorted(model.nodes):
        literals = sorted(
            {r.inputs[0] for r in model.incoming(node) if not r.is_and},
            key=lambda item: (item[0], item[1].rank),
        )
        for size in range(2, min(len(literals), int(max_inputs)) + 1):
            for group in itertools.combinations(literals, size):
                gate = combine(group, node)
                if gate is not None:
                    added.append(gate)
    log.debug("AND expansion proposed %d gate(s)", len(added))
    return model.replace(reactions=model.reactions + tuple(added), expanded=True)


def _eliminate(reactions, node):
    """
    Rewire around ``node``; returns the new reaction list, or None if the node
    cannot be removed without changing the logic or creating a self-loop
    """
    incoming = [r for r in reactions if r.output == node]
    outgoing = [r for r in reactions if node in r.input_names]
    untouched = [r for r in reactions if r.output != node and node not in r.input_names]

    rewired = []
    if len(incoming) == 1:
        (source,) = incoming
        for reaction in outgoing:
            others = [item for item in reaction.inputs if item[0] != node]
            if reaction.sign_of(node) is Sign.ACTIVATE:
                rewired.append((others + list(source.inputs), reaction.output))
            else:
                # !(a AND b) is !a OR !b
                for name, sign in source.inputs:
                    rewired.append((others + [(name, sign.negate())], reaction.output))
    elif len(outgoing) == 1 and outgoing[0].sign_of(node) is Sign.ACTIVATE:
        (target,) = outgoing
        others = [item for item in target.inputs if item[0] != node]
        for source in incoming:
            rewired.append((others + list(source.inputs), target.output))
    else:
        return None

    created = []
    for literals, output in rewired:
        if output in {name for name, _ in literals}:
            return None
        reaction = combine(literals, output)
        if reaction is not None:
            created.append(reaction)
    return untouched + created


def compress(model):
    """
    Remove unannotated pass-through nodes until none is left.

    Nodes bound to a feedback loop (see :py:func:`feedback_bound`) are kept:
    removing one shifts the timing of the loop and can turn an oscillation into
    a fixed point or the reverse.

    A node with a single incoming reaction is substituted into its outgoing
    reactions. A node with a single outgoing reaction, where it acts as an
    activator, has each incoming reaction redirected to that reaction's output.
    """
    if model.expanded:
        raise SaltInvocationError("compress must run before expand_and_gates")
    reactions = list(model.reactions)
    nodes = set(model.nodes)
    removed = []
    changed = True
    while changed:
        changed = False
        current = model.replace(nodes=frozenset(nodes), reactions=tuple(reactions))
        for node in sorted(nodes - model.annotated - feedback_bound(current)):
            result = _eliminate(reactions, node)
            if result is None:
                continue
            reactions = list(canonical(result))
            nodes.discard(node)
            removed.append(node)
            changed = True
    log.debug("Compression removed %d node(s): %s", len(removed), removed)
    return model.replace(nodes=frozenset(nodes), reactions=tuple(reactions), compressed=True)


def cut_nonc(model):
    """
    Remove nodes that no stimulus reaches (non-controllable) or that reach no
    signal (non-observable); annotated nodes are always kept
    """
    if not (model.stimuli or model.signals):
        raise SaltInvocationError("cut_nonc needs an annotated model")
    graph = to_networkx(model)
    controllable = set(model.stimuli)
    for stimulus in model.stimuli:
        controllable |= nx.descendants(graph, stimulus)
    observable = set(model.signals)
    for signal in model.signals:
        observable |= nx.ancestors(graph, signal)
    keep = (controllable & observable) | model.annotated
    dropped = model.nodes - keep
    log.debug("NONC pruning removed %d node(s): %s", len(dropped), sorted(dropped))
    return model.replace(
        nodes=frozenset(keep),
        reactions=tuple(r for r in model.reactions if r.species <= keep),
    )


def cut(model, bits):
    """
    Keep reaction ``i`` iff ``bits[i]`` is 1; nodes and annotations are kept
    """
    bits = tuple(int(bit) for bit in bits)
    if len(bits) != len(model.reactions):
        raise SaltInvocationError(
            f"Bitstring has {len(bits)} bits, model has {len(model.reactions)} reactions"
        )
    return model.replace(
        reactions=tuple(r for r, bit in zip(model.reactions, bits) if bit),
    )


def split_node(model, node, variants):
    """
    Replace ``node`` by each of ``variants``; every reaction touching it is
    duplicated once per variant
    """
    if node not in model.nodes:
        raise NameLookupError(f"Unknown node: {node!r}")
    variants = [validate_node_id(name) for name in variants]
    if not variants:
        raise SaltInvocationError("split_node needs at least one variant")
    collisions = sorted(
        {name for name in variants if name in model.nodes}
        | {name for name in variants if variants.count(name) > 1}
    )
    if collisions:
        raise SaltInvocationError(f"Variant names already in use: {', '.join(collisions)}")

    reactions = []
    for reaction in model.reactions:
        if node in reaction.species:
            reactions.extend(reaction.renamed({node: variant}) for variant in variants)
        else:
            reactions.append(reaction)
    annotations = {}
    for attr in ANNOTATIONS:
        names = getattr(model, attr)
        annotations[attr] = (names - {node}) | (set(variants) if node in names else set())
    return model.replace(
        nodes=(model.nodes - {node}) | set(variants),
        reactions=tuple(reactions),
        **annotations,
    )


def merge_nodes(model, nodes, into):
    """
    Replace every node of ``nodes`` by ``into``; duplicates collapse and
    reactions turned into self-loops are dropped
    """
    nodes = list(nodes)
    if not nodes:
        raise SaltInvocationError("merge_nodes needs at least one node")
    unknown = sorted(set(nodes) - model.nodes)
    if unknown:
        raise NameLookupError(f"Unknown nodes: {', '.join(unknown)}")
    into = validate_node_id(into)
    mapping = {name: into for name in nodes}
    reactions = [reaction.renamed(mapping) for reaction in model.reactions]
    annotations = {}
    for attr in ANNOTATIONS:
        names = getattr(model, attr)
        merged = set(names) - set(nodes)
        if names & set(nodes):
            merged.add(into)
        annotations[attr] = merged
    return model.replace(
        nodes=(model.nodes - set(nodes)) | {into},
        reactions=tuple(r for r in reactions if r is not None),
        **annotations,
    )


def preprocess(model, do_nonc=True, do_compress=True, do_expand=True, max_inputs=2):
    """
    Run NONC pruning, compression and AND expansion in that order.

    Returns the model and the ``(stage, nodes, reactions)`` counts after each
    stage, disabled stages repeating the previous counts.
    """
    stages = [("raw", len(model.nodes), len(model.reactions))]
    steps = (
        ("nonc", do_nonc, cut_nonc),
        ("compressed", do_compress, compress),
        ("expanded", do_expand, lambda m: expand_and_gates(m, max_inputs=max_inputs)),
    )
    for stage, enabled, transform in steps:
        if enabled:
            model = transform(model)
        stages.append((stage, len(model.nodes), len(model.reactions)))
        log.info(
            "Preprocessing %s: %d node(s), %d reaction(s)%s",
            stage,
            len(model.nodes),
            len(model.reactions),
            "" if enabled else " (skipped)",
        )
    return model, stages
