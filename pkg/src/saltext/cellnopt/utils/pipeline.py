"""
End-to-end pipeline: validate, preprocess, train, simulate, export

.. versionadded:: 1.0.0

Each ``cmd_*`` function reads its inputs, runs one workflow and, when an output
directory is configured, writes plain-text artifacts there. Errors keep their
:py:mod:`salt.exceptions` class and carry the name of the failing stage in a
``stage`` attribute.
"""

import contextlib
import logging
import os

import salt.utils.files  # pylint: disable=import-error
import salt.utils.hashutils  # pylint: disable=import-error
import salt.utils.json  # pylint: disable=import-error
from salt.exceptions import SaltException  # pylint: disable=import-error
from salt.exceptions import SaltInvocationError  # pylint: disable=import-error

from saltext.cellnopt.exceptions import InputFormatError
from saltext.cellnopt.exceptions import NameLookupError
from saltext.cellnopt.utils import cnograph
from saltext.cellnopt.utils import exporters
from saltext.cellnopt.utils.boolean import simulate_steady
from saltext.cellnopt.utils.midas import ExperimentCondition
from saltext.cellnopt.utils.midas import read_midas_file
from saltext.cellnopt.utils.optimizer import ga_train
from saltext.cellnopt.utils.scoring import default_times
from saltext.cellnopt.utils.sif import read_sif_file
from saltext.cellnopt.utils.sif import write_sif

log = logging.getLogger(__name__)

EXPORT_FORMATS = ("sif", "dot", "sbmlqual")
MANIFEST = "run.json"


def log_pipeline_error(stage, message, **kwargs):
    """
    Log a pipeline failure at the level named by ``cellnopt_log_level``
    (``error`` by default)
    """
    try:
        logger = getattr(log, kwargs.get("cellnopt_log_level"))
    except (AttributeError, TypeError):
        logger = getattr(log, "error")

    logger("The cellnopt %s stage has failed: %s", stage, message)


@contextlib.contextmanager
def stage(name):
    """
    Tag any Salt exception raised in the block with the stage ``name``
    """
    try:
        yield
    except SaltException as exc:
        if getattr(exc, "stage", None) is None:
            exc.stage = name
        raise


def read_pkn(path):
    with stage("read-pkn"):
        try:
            document = read_sif_file(path)
        except OSError as exc:
            raise SaltInvocationError(  # pylint: disable=raise-missing-from
                f"Cannot read PKN {path}: {exc.strerror}"
            )
        model = cnograph.PknModel.from_sif(document)
        log.debug("Read %d reaction(s) from %s", len(model.reactions), path)
        return model


def read_data(path):
    with stage("read-midas"):
        try:
            return read_midas_file(path)
        except OSError as exc:
            raise SaltInvocationError(  # pylint: disable=raise-missing-from
                f"Cannot read MIDAS {path}: {exc.strerror}"
            )


def _dump_json(obj):
    return salt.utils.json.dumps(obj, indent=2, sort_keys=True) + "\n"


class ArtifactWriter:
    """
    Writes named text files into one directory and remembers what it wrote
    """

    def __init__(self, out):
        self.out = out
        self.written = []
        if out is not None:
            try:
                os.makedirs(out, exist_ok=True)
            except OSError as exc:
                raise SaltInvocationError(  # pylint: disable=raise-missing-from
                    f"Cannot write artifacts to {out}: {exc.strerror}"
                )

    def write(self, name, text):
        if self.out is None:
            return None
        path = os.path.join(self.out, name)
        try:
            with salt.utils.files.fopen(path, "w") as handle:
                handle.write(text)
        except OSError as exc:
            raise SaltInvocationError(  # pylint: disable=raise-missing-from
                f"Cannot write {path}: {exc.strerror}"
            )
        if name not in self.written:
            self.written.append(name)
        log.info("Wrote %s", path)
        return path

    def write_json(self, name, obj):
        return self.write(name, _dump_json(obj))

    def write_frame(self, name, frame):
        return self.write(name, frame.to_csv(index=False, lineterminator="\n"))


def _diagnostic(level, stage_name, message):
    return {"level": level, "stage": stage_name, "message": message}


def cmd_validate(pkn, midas=None):
    """
    Check that both inputs parse and agree with each other.

    Returns a list of ``{level, stage, message}`` diagnostics; the inputs are
    valid when none has level ``error``.
    """
    diagnostics = []
    model = data = None
    try:
        model = read_pkn(pkn)
    except (InputFormatError, SaltInvocationError) as exc:
        diagnostics.append(_diagnostic("error", "read-pkn", str(exc)))
    else:
        if not model.reactions:
            diagnostics.append(_diagnostic("error", "read-pkn", f"{pkn} holds no reaction"))
            model = None
    if midas is not None:
        try:
            data = read_data(midas)
        except (InputFormatError, SaltInvocationError) as exc:
            diagnostics.append(_diagnostic("error", "read-midas", str(exc)))

    if model is not None and data is not None:
        roles = (
            ("stimulus", data.stimuli_names),
            ("inhibitor", data.inhibitor_names),
            ("signal", data.signal_names),
        )
        for role, names in roles:
            for name in names:
                if name not in model.nodes:
                    diagnostics.append(
                        _diagnostic("error", "validate", f"MIDAS {role} {name} is not a PKN node")
                    )
        times = default_times(data)
        comparable = any(data.signal_frame(time).notna().to_numpy().any() for time in times)
        if not comparable:
            diagnostics.append(
                _diagnostic("error", "validate", "No measured value at a non-zero time point")
            )
    if model is not None and cnograph.has_feedback(model):
        diagnostics.append(
            _diagnostic("warning", "validate", "The PKN has feedback loops; steady states may be NA")
        )
    if not diagnostics:
        diagnostics.append(_diagnostic("info", "validate", "OK"))
    for item in diagnostics:
        log.debug("validate %s [%s]: %s", item["level"], item["stage"], item["message"])
    return diagnostics


def has_errors(diagnostics):
    return any(item["level"] == "error" for item in diagnostics)


READ_STAGES = ("read-pkn", "read-midas")


def validate_status(diagnostics):
    """
    Exit status of ``validate``: 2 when only the inputs failed to parse, 1 for
    any other error and 0 otherwise
    """
    errors = [item for item in diagnostics if item["level"] == "error"]
    if not errors:
        return 0
    if all(item["stage"] in READ_STAGES for item in errors):
        return 2
    return 1


def _inputs(cfg):
    inputs = {}
    for role in ("pkn", "midas"):
        path = getattr(cfg, role)
        if path:
            inputs[role] = {
                "name": os.path.basename(path),
                "sha256": salt.utils.hashutils.get_hash(path, "sha256"),
            }
    return inputs


def run_manifest(cfg):
    """
    Inputs and settings a training report depends on; the worker count is
    left out since it never changes results
    """
    return {"config": cfg.to_dict(with_workers=False), "inputs": _inputs(cfg)}


def read_manifest(out):
    path = os.path.join(out, MANIFEST)
    if not os.path.isfile(path):
        return None
    with salt.utils.files.fopen(path, "r") as handle:
        return salt.utils.json.load(handle)


def _prepare(cfg, data=None):
    if not cfg.pkn:
        raise SaltInvocationError("A PKN path is required")
    model = read_pkn(cfg.pkn)
    with stage("preprocess"):
        if data is not None:
            model = cnograph.annotate_from_midas(model, data)
        options = cfg.preprocessing
        return cnograph.preprocess(
            model,
            do_nonc=options.do_nonc,
            do_compress=options.do_compress,
            do_expand=options.do_expand,
            max_inputs=options.max_inputs,
        ), model


def _write_preprocess(writer, raw, model, stages):
    writer.write("model_preprocessed.sif", write_sif(model.to_sif()))
    writer.write("model_raw.dot", exporters.to_dot(raw))
    writer.write("model_preprocessed.dot", exporters.to_dot(model))
    writer.write_json(
        "preprocess_summary.json",
        {
            "stages": [
                {"stage": name, "nodes": nodes, "reactions": reactions}
                for name, nodes, reactions in stages
            ],
            "model": model.summary(),
        },
    )


def cmd_preprocess(cfg):
    """
    Annotate the PKN from the MIDAS file (when given) and run the enabled
    preprocessing stages
    """
    data = read_data(cfg.midas) if cfg.midas else None
    (model, stages), raw = _prepare(cfg, data)
    with stage("report"):
        writer = ArtifactWriter(cfg.out)
        _write_preprocess(writer, raw, model, stages)
    return {"model": model, "stages": stages, "artifacts": list(writer.written)}


def _best_bitstring_text(model, best):
    lines = [str(best)]
    for index, (reaction, bit) in enumerate(zip(model.reactions, best)):
        lines.append(f"{index}\t{bit}\t{reaction}")
    return "\n".join(lines) + "\n"


def cmd_train(cfg):
    """
    Preprocess, train with the genetic algorithm and write the full report
    """
    if not cfg.midas:
        raise SaltInvocationError("Training needs a MIDAS dataset")
    data = read_data(cfg.midas)
    (model, stages), raw = _prepare(cfg, data)

    with stage("train"):
        if cnograph.has_feedback(model):
            log.warning("The preprocessed model has feedback loops; steady states may be NA")
        result = ga_train(
            model,
            data,
            alpha=cfg.alpha,
            cfg=cfg.ga,
            times=cfg.times,
            na_fac=cfg.na_fac,
            max_iter=cfg.max_iter,
            include_time_zero=cfg.include_time_zero,
        )

    breakdown = result.best_score
    with stage("report"):
        writer = ArtifactWriter(cfg.out)
        _write_preprocess(writer, raw, model, stages)
        trace = "generation,best,mean\n" + "".join(
            f"{generation},{best!r},{mean!r}\n" for generation, best, mean in result.generations
        )
        writer.write("fit_trace.csv", trace)
        writer.write("best_bitstring.txt", _best_bitstring_text(model, result.best))
        writer.write_frame("residuals.csv", breakdown.residuals)
        report = breakdown.to_dict()
        report.update(
            bitstring=str(result.best),
            stopped_by=result.stopped_by,
            evaluations=result.evaluations,
            generations=len(result.generations),
            models_within_tolerance=[
                {"bitstring": str(bits), "total": total} for bits, total in result.tolerant_models
            ],
        )
        writer.write_json("score.json", report)
        writer.write(
            "best_model.dot", exporters.to_dot(cnograph.cut(model, result.best), name="best")
        )
        if cfg.heatmap and not breakdown.residuals.empty:
            writer.write("heatmap.svg", exporters.heatmap_svg(data, breakdown.residuals))
        if cfg.out is not None:
            manifest = run_manifest(cfg)
            manifest["artifacts"] = sorted(writer.written + [MANIFEST])
            writer.write_json(MANIFEST, manifest)
    log.info(
        "Best score %s (theta_f %s, theta_s %s)",
        breakdown.total,
        breakdown.theta_f,
        breakdown.theta_s,
    )
    return {
        "model": model,
        "stages": stages,
        "result": result,
        "artifacts": list(writer.written),
    }


def cmd_simulate(pkn, on=(), inhibit=(), midas=None, max_iter=None):
    """
    Steady state of every PKN node for one condition.

    Nodes named in ``on`` are stimulated and nodes in ``inhibit`` inhibited;
    the remaining MIDAS stimuli, when a dataset is given, are clamped to 0.
    """
    model = read_pkn(pkn)
    data = read_data(midas) if midas else None
    with stage("simulate"):
        unknown = sorted((set(on) | set(inhibit)) - model.nodes)
        if unknown:
            raise NameLookupError(f"Unknown node(s): {', '.join(unknown)}")
        stimuli, inhibitors = set(on), set(inhibit)
        if data is not None:
            stimuli |= set(data.stimuli_names) & model.nodes
            inhibitors |= set(data.inhibitor_names) & model.nodes
        model = model.replace(stimuli=frozenset(stimuli), inhibitors=frozenset(inhibitors))
        condition = ExperimentCondition(
            stimuli={name: int(name in on) for name in stimuli},
            inhibited=frozenset(inhibit),
        )
        return simulate_steady(model, condition, max_iter=max_iter)


def format_state(state):
    """
    ``node<TAB>value`` lines, NA for nodes without a steady state
    """
    return "".join(
        f"{node}\t{'NA' if value is None else value}\n" for node, value in sorted(state.values.items())
    )


def cmd_export(pkn, fmt="sif", out=None, midas=None):
    """
    Render the PKN as SIF, DOT or SBML-qual text and write it to ``out`` when
    given. A MIDAS dataset only annotates the model.
    """
    if fmt not in EXPORT_FORMATS:
        raise SaltInvocationError(
            f"Unknown export format {fmt!r}; expected one of {', '.join(EXPORT_FORMATS)}"
        )
    model = read_pkn(pkn)
    if midas:
        data = read_data(midas)
        with stage("export"):
            model = cnograph.annotate_from_midas(model, data)
    with stage("export"):
        if fmt == "sif":
            text = write_sif(model.to_sif())
        elif fmt == "dot":
            text = exporters.to_dot(model)
        else:
            text = exporters.to_sbmlqual(model)
        if out:
            try:
                with salt.utils.files.fopen(out, "w") as handle:
                    handle.write(text)
            except OSError as exc:
                raise SaltInvocationError(  # pylint: disable=raise-missing-from
                    f"Cannot write {out}: {exc.strerror}"
                )
            log.info("Wrote %s", out)
    return text
