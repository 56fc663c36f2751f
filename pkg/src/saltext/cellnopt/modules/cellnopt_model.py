"""
CellNOpt Logic Model Execution Module

.. versionadded:: 1.0.0

:maturity: new
:platform: linux

Functions take a ``model`` that is either the path of a SIF file, a list of
reaction strings such as ``["Input1=Interm", "!Input2=Output"]`` or the
mapping returned by another function of this module. Annotations can be
given with the ``stimuli``, ``inhibitors`` and ``signals`` keyword
arguments; they replace those carried by a mapping.

Models are returned as mappings:

.. code-block:: yaml

    nodes: [Input1, Input2, Interm, Output]
    reactions: [Input1=Interm, Input2=Output, Interm=Output]
    stimuli: [Input1, Input2]
    inhibitors: []
    signals: [Output]

"""

import logging

import salt.utils.args  # pylint: disable=import-error
from salt.exceptions import SaltException  # pylint: disable=import-error

import saltext.cellnopt.utils.pipeline

HAS_LIBS = False
try:
    import networkx  # pylint: disable=unused-import
    import numpy  # pylint: disable=unused-import

    from saltext.cellnopt.utils import boolean
    from saltext.cellnopt.utils import cnograph
    from saltext.cellnopt.utils.midas import ExperimentCondition
    from saltext.cellnopt.utils.reactions import parse_reaction
    from saltext.cellnopt.utils.sif import read_sif_file

    HAS_LIBS = True
except ImportError:
    pass

__virtualname__ = "cellnopt_model"

log = logging.getLogger(__name__)


def __virtual__():
    if not HAS_LIBS:
        return (
            False,
            "The following dependencies are required to use the cellnopt modules: "
            "numpy and networkx",
        )

    return __virtualname__


def _names(value):
    if value is None:
        return None
    return salt.utils.args.split_input(value)


def _load(model, stimuli=None, inhibitors=None, signals=None):
    if isinstance(model, dict):
        loaded = cnograph.PknModel.from_reactions(
            model.get("reactions", []),
            nodes=frozenset(model.get("nodes", [])),
            stimuli=frozenset(model.get("stimuli", [])),
            inhibitors=frozenset(model.get("inhibitors", [])),
            signals=frozenset(model.get("signals", [])),
        )
    elif isinstance(model, str):
        loaded = cnograph.PknModel.from_sif(read_sif_file(model))
    else:
        loaded = cnograph.PknModel.from_reactions(list(model))
    annotations = {
        "stimuli": _names(stimuli),
        "inhibitors": _names(inhibitors),
        "signals": _names(signals),
    }
    if any(names is not None for names in annotations.values()):
        loaded = cnograph.annotate(
            loaded,
            **{
                attr: names if names is not None else getattr(loaded, attr)
                for attr, names in annotations.items()
            },
        )
    return loaded


def _dump(model):
    return {
        "nodes": sorted(model.nodes),
        "reactions": [str(reaction) for reaction in model.reactions],
        "stimuli": sorted(model.stimuli),
        "inhibitors": sorted(model.inhibitors),
        "signals": sorted(model.signals),
    }


def _failed(stage, exc, **kwargs):
    saltext.cellnopt.utils.pipeline.log_pipeline_error(stage, str(exc), **kwargs)
    return {"error": str(exc)}


def parse(model, stimuli=None, inhibitors=None, signals=None, **kwargs):
    """
    .. versionadded:: 1.0.0

    Load a model and return it as a mapping.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt_model.parse /srv/cno/pkn.sif stimuli=EGF,TNFa signals=ERK

    """
    try:
        return _dump(_load(model, stimuli, inhibitors, signals))
    except (SaltException, OSError) as exc:
        return _failed("parse", exc, **kwargs)


def reactions(text, **kwargs):
    """
    .. versionadded:: 1.0.0

    Parse reaction text into canonical reactions; ``A+B=C`` yields one
    reaction per input.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt_model.reactions 'A^!B=C'

    """
    try:
        return [str(reaction) for reaction in parse_reaction(text)]
    except SaltException as exc:
        return _failed("parse", exc, **kwargs)


def add_reaction(model, text, **kwargs):
    """
    .. versionadded:: 1.0.0

    Add the reactions of ``text``; new species become nodes.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt_model.add_reaction /srv/cno/pkn.sif 'EGF^!PI3K=Ras'

    """
    try:
        return _dump(cnograph.add_reaction(_load(model), text))
    except (SaltException, OSError) as exc:
        return _failed("add_reaction", exc, **kwargs)


def annotate(model, stimuli=None, inhibitors=None, signals=None, **kwargs):
    """
    .. versionadded:: 1.0.0

    Set the stimulus, inhibitor and signal annotations; unknown names are an error.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt_model.annotate /srv/cno/pkn.sif stimuli=EGF inhibitors=PI3K signals=ERK

    """
    try:
        loaded = _load(model)
        annotated = cnograph.annotate(
            loaded,
            stimuli=_names(stimuli) or (),
            inhibitors=_names(inhibitors) or (),
            signals=_names(signals) or (),
        )
        return _dump(annotated)
    except (SaltException, OSError) as exc:
        return _failed("annotate", exc, **kwargs)


def expand_and_gates(model, max_inputs=2, **kwargs):
    """
    .. versionadded:: 1.0.0

    Add candidate AND gates over the simple inputs of every node.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt_model.expand_and_gates /srv/cno/pkn.sif max_inputs=3

    """
    try:
        return _dump(cnograph.expand_and_gates(_load(model), max_inputs=int(max_inputs)))
    except (SaltException, OSError) as exc:
        return _failed("expand_and_gates", exc, **kwargs)


def compress(model, stimuli=None, inhibitors=None, signals=None, **kwargs):
    """
    .. versionadded:: 1.0.0

    Remove unannotated pass-through nodes while keeping signal behaviour.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt_model.compress /srv/cno/pkn.sif stimuli=EGF signals=ERK

    """
    try:
        return _dump(cnograph.compress(_load(model, stimuli, inhibitors, signals)))
    except (SaltException, OSError) as exc:
        return _failed("compress", exc, **kwargs)


def cut_nonc(model, stimuli=None, inhibitors=None, signals=None, **kwargs):
    """
    .. versionadded:: 1.0.0

    Remove nodes no stimulus reaches or that reach no signal.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt_model.cut_nonc /srv/cno/pkn.sif stimuli=EGF signals=ERK

    """
    try:
        return _dump(cnograph.cut_nonc(_load(model, stimuli, inhibitors, signals)))
    except (SaltException, OSError) as exc:
        return _failed("cut_nonc", exc, **kwargs)


def split_node(model, node, variants, **kwargs):
    """
    .. versionadded:: 1.0.0

    Replace ``node`` by each of the comma separated ``variants``.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt_model.split_node /srv/cno/pkn.sif PI3K PI3Ka,PI3Kb

    """
    try:
        return _dump(cnograph.split_node(_load(model), node, _names(variants)))
    except (SaltException, OSError) as exc:
        return _failed("split_node", exc, **kwargs)


def merge_nodes(model, nodes, into, **kwargs):
    """
    .. versionadded:: 1.0.0

    Replace every node of the comma separated ``nodes`` by ``into``.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt_model.merge_nodes /srv/cno/pkn.sif ERK1,ERK2 ERK

    """
    try:
        return _dump(cnograph.merge_nodes(_load(model), _names(nodes), into))
    except (SaltException, OSError) as exc:
        return _failed("merge_nodes", exc, **kwargs)


def truth_table(model, stimuli=None, inhibitors=None, signals=None, max_iter=None, **kwargs):
    """
    .. versionadded:: 1.0.0

    Signal values under every stimulus and inhibitor assignment; NA is None.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt_model.truth_table /srv/cno/pkn.sif stimuli=EGF signals=ERK

    """
    try:
        table = boolean.truth_table(_load(model, stimuli, inhibitors, signals), max_iter=max_iter)
    except (SaltException, OSError) as exc:
        return _failed("truth_table", exc, **kwargs)

    return [
        {"stimuli": dict(stimulus), "inhibitors": dict(inhibitor), "signals": values}
        for (stimulus, inhibitor), values in table.items()
    ]


def simulate(model, on=None, inhibit=None, max_iter=None, **kwargs):
    """
    .. versionadded:: 1.0.0

    Steady state of every node when ``on`` nodes are stimulated and
    ``inhibit`` nodes inhibited; other stimuli of the model stay at 0.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt_model.simulate '["Input1=Interm", "Interm=Output"]' on=Input1

    """
    try:
        loaded = _load(model)
        on = _names(on) or []
        inhibit = _names(inhibit) or []
        loaded = loaded.replace(
            stimuli=loaded.stimuli | set(on), inhibitors=loaded.inhibitors | set(inhibit)
        )
        condition = ExperimentCondition(
            stimuli={name: int(name in on) for name in loaded.stimuli},
            inhibited=frozenset(inhibit),
        )
        state = boolean.simulate_steady(loaded, condition, max_iter=max_iter)
    except (SaltException, OSError) as exc:
        return _failed("simulate", exc, **kwargs)

    return dict(state.values)
