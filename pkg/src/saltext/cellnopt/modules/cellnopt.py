"""
CellNOpt Logic Model Training Execution Module

.. versionadded:: 1.0.0

:maintainer: saltext-cellnopt maintainers
:maturity: new
:platform: linux
:configuration:
    Every function accepts pipeline settings as keyword arguments, either flat
    with section dots (``ga.seed=3``) or nested (``ga='{seed: 3}'``). A
    ``profile`` argument names a mapping in the minion configuration, grains or
    pillar that provides defaults:

    .. code-block:: yaml

        cellnopt_defaults:
          alpha: 0.0001
          ga:
            population_size: 80
            workers: 4

    Failures are logged at the level given by ``cellnopt_log_level``
    (``error`` when unset) and returned as ``{"error": "<message>"}``.

"""

# Python libs
import logging

import salt.utils.args  # pylint: disable=import-error
from salt.exceptions import SaltException  # pylint: disable=import-error

import saltext.cellnopt.utils.pipeline
from saltext.cellnopt.utils.config import load_config

HAS_LIBS = False
try:
    import networkx  # pylint: disable=unused-import
    import numpy  # pylint: disable=unused-import
    import pandas  # pylint: disable=unused-import

    from saltext.cellnopt.utils import cnograph
    from saltext.cellnopt.utils.optimizer import BitString
    from saltext.cellnopt.utils.scoring import ScoringProblem

    HAS_LIBS = True
except ImportError:
    pass

__virtualname__ = "cellnopt"

log = logging.getLogger(__name__)


def __virtual__():
    if not HAS_LIBS:
        return (
            False,
            "The following dependencies are required to use the cellnopt modules: "
            "numpy, pandas and networkx",
        )

    return __virtualname__


def _config(pkn=None, midas=None, out=None, **kwargs):
    kwargs = salt.utils.args.clean_kwargs(**kwargs)
    kwargs.pop("cellnopt_log_level", None)
    profile = kwargs.pop("profile", None)
    overrides = dict(kwargs, pkn=pkn, midas=midas, out=out)
    return load_config(profile=profile, option=__salt__["config.option"], overrides=overrides)


def _failed(stage, exc, **kwargs):
    stage = getattr(exc, "stage", None) or stage
    saltext.cellnopt.utils.pipeline.log_pipeline_error(stage, str(exc), **kwargs)
    return {"error": str(exc)}


def validate(pkn, midas=None, **kwargs):
    """
    .. versionadded:: 1.0.0

    Check that a PKN and a MIDAS dataset parse and agree with each other.

    :param pkn: Path to the SIF prior knowledge network.

    :param midas: Path to the MIDAS dataset.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt.validate /srv/cno/pkn.sif midas=/srv/cno/data.csv

    """
    try:
        diagnostics = saltext.cellnopt.utils.pipeline.cmd_validate(pkn, midas)
    except SaltException as exc:
        return _failed("validate", exc, **kwargs)

    return {
        "valid": not saltext.cellnopt.utils.pipeline.has_errors(diagnostics),
        "diagnostics": diagnostics,
    }


def preprocess(pkn, midas=None, out=None, **kwargs):
    """
    .. versionadded:: 1.0.0

    Annotate the PKN from the MIDAS dataset, then prune non-observable and
    non-controllable nodes, compress and expand AND gates.

    :param pkn: Path to the SIF prior knowledge network.

    :param midas: Path to the MIDAS dataset providing stimuli, inhibitors and signals.

    :param out: Directory receiving the preprocessed SIF, DOT drawings and a JSON summary.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt.preprocess /srv/cno/pkn.sif midas=/srv/cno/data.csv out=/srv/cno/pre

    """
    try:
        cfg = _config(pkn, midas, out, **kwargs)
        outcome = saltext.cellnopt.utils.pipeline.cmd_preprocess(cfg)
    except SaltException as exc:
        return _failed("preprocess", exc, **kwargs)

    return {
        "stages": [
            {"stage": name, "nodes": nodes, "reactions": reactions}
            for name, nodes, reactions in outcome["stages"]
        ],
        "reactions": [str(reaction) for reaction in outcome["model"].reactions],
        "artifacts": outcome["artifacts"],
    }


def train(pkn, midas, out=None, **kwargs):
    """
    .. versionadded:: 1.0.0

    Preprocess the PKN and train a sub-model against the MIDAS dataset with the
    genetic algorithm.

    :param pkn: Path to the SIF prior knowledge network.

    :param midas: Path to the MIDAS dataset.

    :param out: Directory receiving the training report.

    :param profile: Name of a configuration mapping providing defaults.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt.train /srv/cno/pkn.sif /srv/cno/data.csv out=/srv/cno/run ga.seed=3

    """
    try:
        cfg = _config(pkn, midas, out, **kwargs)
        outcome = saltext.cellnopt.utils.pipeline.cmd_train(cfg)
    except SaltException as exc:
        return _failed("train", exc, **kwargs)

    result = outcome["result"]
    kept = [
        str(reaction)
        for reaction, bit in zip(outcome["model"].reactions, result.best)
        if bit
    ]
    return {
        "bitstring": str(result.best),
        "reactions": kept,
        "score": result.best_score.to_dict(),
        "stopped_by": result.stopped_by,
        "evaluations": result.evaluations,
        "artifacts": outcome["artifacts"],
    }


def simulate(pkn, on=None, inhibit=None, midas=None, max_iter=None, **kwargs):
    """
    .. versionadded:: 1.0.0

    Steady state of every PKN node under one condition; nodes that do not
    settle are reported as None.

    :param pkn: Path to the SIF prior knowledge network.

    :param on: Comma separated nodes to stimulate.

    :param inhibit: Comma separated nodes to inhibit.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt.simulate /srv/cno/pkn.sif on=EGF,TNFa inhibit=PI3K

    """
    try:
        state = saltext.cellnopt.utils.pipeline.cmd_simulate(
            pkn,
            on=salt.utils.args.split_input(on or []),
            inhibit=salt.utils.args.split_input(inhibit or []),
            midas=midas,
            max_iter=max_iter,
        )
    except SaltException as exc:
        return _failed("simulate", exc, **kwargs)

    return dict(state.values)


def export(pkn, fmt="sif", out=None, midas=None, **kwargs):
    """
    .. versionadded:: 1.0.0

    Render a PKN as SIF, Graphviz DOT or SBML-qual.

    :param fmt: One of ``sif``, ``dot`` or ``sbmlqual``.

    :param out: File to write; the text is returned when omitted.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt.export /srv/cno/pkn.sif fmt=sbmlqual out=/srv/cno/pkn.xml

    """
    try:
        text = saltext.cellnopt.utils.pipeline.cmd_export(pkn, fmt=fmt, out=out, midas=midas)
    except SaltException as exc:
        return _failed("export", exc, **kwargs)

    if out:
        return {"path": out, "format": fmt}
    return text


def score(pkn, midas, bitstring=None, **kwargs):
    """
    .. versionadded:: 1.0.0

    Score a bitstring over the preprocessed PKN (all reactions when omitted).

    :param bitstring: 0/1 text, one character per preprocessed reaction.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt.score /srv/cno/pkn.sif /srv/cno/data.csv bitstring=10110

    """
    try:
        cfg = _config(pkn, midas, None, **kwargs)
        data = saltext.cellnopt.utils.pipeline.read_data(midas)
        model = saltext.cellnopt.utils.pipeline.read_pkn(pkn)
        model = cnograph.annotate_from_midas(model, data)
        model, _ = cnograph.preprocess(
            model,
            do_nonc=cfg.preprocessing.do_nonc,
            do_compress=cfg.preprocessing.do_compress,
            do_expand=cfg.preprocessing.do_expand,
            max_inputs=cfg.preprocessing.max_inputs,
        )
        if bitstring is None:
            bits = BitString.all_ones(len(model.reactions))
        elif isinstance(bitstring, str):
            bits = BitString.from_text(bitstring)
        else:
            # the Salt CLI hands unquoted bitstrings over as integers
            bits = BitString.from_text(str(bitstring).zfill(len(model.reactions)))
        problem = ScoringProblem(
            model, data, cfg.times, cfg.na_fac, cfg.max_iter, cfg.include_time_zero
        )
        breakdown = problem.score(bits, alpha=cfg.alpha)
    except SaltException as exc:
        return _failed("score", exc, **kwargs)

    ret = breakdown.to_dict()
    ret["bitstring"] = str(bits)
    ret["reactions"] = [str(reaction) for reaction in model.reactions]
    return ret


def manifest(pkn, midas, **kwargs):
    """
    .. versionadded:: 1.0.0

    Settings and input digests a training report for these arguments would
    record in its ``run.json``.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt.manifest /srv/cno/pkn.sif /srv/cno/data.csv ga.seed=3

    """
    try:
        cfg = _config(pkn, midas, None, **kwargs)
        return saltext.cellnopt.utils.pipeline.run_manifest(cfg)
    except (SaltException, OSError) as exc:
        return _failed("manifest", exc, **kwargs)


def report(out, **kwargs):
    """
    .. versionadded:: 1.0.0

    Read the ``run.json`` manifest of a training report directory.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt.report /srv/cno/run

    """
    try:
        found = saltext.cellnopt.utils.pipeline.read_manifest(out)
    except (SaltException, OSError, ValueError) as exc:
        return _failed("report", exc, **kwargs)

    if found is None:
        return _failed("report", f"No training report in {out}", **kwargs)
    return found
