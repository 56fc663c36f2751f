"""
``cellnopt`` command line tool

.. versionadded:: 1.0.0

.. code-block:: bash

    cellnopt validate --pkn model.sif --midas data.csv
    cellnopt preprocess --pkn model.sif --midas data.csv --out report/
    cellnopt train --pkn model.sif --midas data.csv --out report/ --seed 3
    cellnopt simulate --pkn model.sif --on Input1 --inhibit Interm
    cellnopt export --pkn model.sif --format sbmlqual --out model.xml

Exit status: 0 success, 1 usage error, 2 input format error, 3 runtime error.
"""

import argparse
import logging
import sys

import salt.utils.json  # pylint: disable=import-error
from salt.exceptions import SaltException  # pylint: disable=import-error

from saltext.cellnopt import __version__
from saltext.cellnopt.exceptions import exit_code
from saltext.cellnopt.utils import pipeline
from saltext.cellnopt.utils.config import load_config

log = logging.getLogger(__name__)

LOG_FORMAT = "[%(levelname)-8s] %(message)s"
LOG_LEVELS = ("debug", "info", "warning", "error", "critical")


def _add_pipeline_options(parser):
    parser.add_argument("--midas", help="MIDAS dataset")
    parser.add_argument("--out", help="artifact directory")
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument("--alpha", type=float, help="size penalty weight (default 1e-4)")
    parser.add_argument("--max-inputs", type=int, help="largest AND gate added by expansion")
    parser.add_argument("--max-iter", type=int, help="simulation step budget")
    parser.add_argument(
        "--no-nonc", dest="do_nonc", action="store_false", default=None, help="skip NONC pruning"
    )
    parser.add_argument(
        "--no-compress",
        dest="do_compress",
        action="store_false",
        default=None,
        help="skip compression",
    )
    parser.add_argument(
        "--no-expand",
        dest="do_expand",
        action="store_false",
        default=None,
        help="skip AND gate expansion",
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cellnopt", description="Train logic models of signalling networks on MIDAS data"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level", choices=LOG_LEVELS, default="warning", help="default: warning"
    )
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    validate = commands.add_parser("validate", help="check a PKN and a MIDAS file")
    validate.add_argument("--pkn", required=True, help="SIF prior knowledge network")
    validate.add_argument("--midas", help="MIDAS dataset")
    validate.add_argument("--json", action="store_true", help="print diagnostics as JSON")

    preprocess = commands.add_parser("preprocess", help="prune, compress and expand a PKN")
    preprocess.add_argument("--pkn", required=True, help="SIF prior knowledge network")
    _add_pipeline_options(preprocess)

    train = commands.add_parser("train", help="train a sub-model against a MIDAS dataset")
    train.add_argument("--pkn", required=True, help="SIF prior knowledge network")
    _add_pipeline_options(train)
    train.add_argument("--seed", type=int, help="random seed of the genetic algorithm")
    train.add_argument("--workers", type=int, help="fitness evaluation threads")
    train.add_argument(
        "--no-heatmap", dest="heatmap", action="store_false", default=None, help="skip heatmap.svg"
    )

    simulate = commands.add_parser("simulate", help="steady state under one condition")
    simulate.add_argument("--pkn", required=True, help="SIF prior knowledge network")
    simulate.add_argument("--midas", help="MIDAS dataset naming further stimuli and inhibitors")
    simulate.add_argument("--on", action="append", default=[], metavar="NAME", help="stimulate")
    simulate.add_argument(
        "--inhibit", action="append", default=[], metavar="NAME", help="inhibit"
    )
    simulate.add_argument("--max-iter", type=int, help="simulation step budget")

    export = commands.add_parser("export", help="write the PKN as SIF, DOT or SBML-qual")
    export.add_argument("--pkn", required=True, help="SIF prior knowledge network")
    export.add_argument("--midas", help="MIDAS dataset used to annotate the model")
    export.add_argument("--format", choices=pipeline.EXPORT_FORMATS, default="sif")
    export.add_argument("--out", help="output file; standard output when omitted")
    return parser


def _config(args):
    overrides = {
        "pkn": args.pkn,
        "midas": args.midas,
        "out": args.out,
        "alpha": args.alpha,
        "max_iter": args.max_iter,
        "heatmap": getattr(args, "heatmap", None),
        "preprocessing": {
            "do_nonc": args.do_nonc,
            "do_compress": args.do_compress,
            "do_expand": args.do_expand,
            "max_inputs": args.max_inputs,
        },
        "ga": {"seed": getattr(args, "seed", None), "workers": getattr(args, "workers", None)},
    }
    return load_config(path=args.config, overrides=overrides)


def _validate(args, stdout):
    diagnostics = pipeline.cmd_validate(args.pkn, args.midas)
    if args.json:
        stdout.write(salt.utils.json.dumps(diagnostics, indent=2, sort_keys=True) + "\n")
    else:
        for item in diagnostics:
            stdout.write(f"{item['level'].upper()}: [{item['stage']}] {item['message']}\n")
    return pipeline.validate_status(diagnostics)


def _preprocess(args, stdout):
    outcome = pipeline.cmd_preprocess(_config(args))
    for name, nodes, reactions in outcome["stages"]:
        stdout.write(f"{name}\t{nodes} nodes\t{reactions} reactions\n")
    return 0


def _train(args, stdout):
    outcome = pipeline.cmd_train(_config(args))
    result = outcome["result"]
    stdout.write(f"best\t{result.best}\n")
    stdout.write(f"score\t{result.best_score.total!r}\n")
    stdout.write(f"stopped_by\t{result.stopped_by}\n")
    return 0


def _simulate(args, stdout):
    state = pipeline.cmd_simulate(
        args.pkn, on=args.on, inhibit=args.inhibit, midas=args.midas, max_iter=args.max_iter
    )
    stdout.write(pipeline.format_state(state))
    return 0


def _export(args, stdout):
    text = pipeline.cmd_export(args.pkn, fmt=args.format, out=args.out, midas=args.midas)
    if not args.out:
        stdout.write(text)
    return 0


COMMANDS = {
    "validate": _validate,
    "preprocess": _preprocess,
    "train": _train,
    "simulate": _simulate,
    "export": _export,
}


def main(argv=None, stdout=None, stderr=None):
    """
    Run one command and return its exit status
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0

    handler = logging.StreamHandler(stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root = logging.getLogger()
    root.addHandler(handler)
    root.setLevel(args.log_level.upper())
    try:
        return COMMANDS[args.command](args, stdout)
    except SaltException as exc:
        stage = getattr(exc, "stage", None) or args.command
        stderr.write(f"cellnopt {stage}: {exc}\n")
        return exit_code(exc)
    finally:
        root.removeHandler(handler)


def run():
    sys.exit(main())
