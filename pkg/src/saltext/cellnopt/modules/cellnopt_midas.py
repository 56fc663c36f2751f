"""
CellNOpt MIDAS Dataset Execution Module

.. versionadded:: 1.0.0

:maturity: new
:platform: linux

Read, query and write MIDAS perturbation datasets.
"""

import logging

from salt.exceptions import SaltException  # pylint: disable=import-error

import saltext.cellnopt.utils.pipeline

HAS_LIBS = False
try:
    import pandas  # pylint: disable=unused-import

    from saltext.cellnopt.utils.midas import Measurement
    from saltext.cellnopt.utils.midas import MidasBuilder
    from saltext.cellnopt.utils.midas import condition_of
    from saltext.cellnopt.utils.midas import timecourse as midas_timecourse
    from saltext.cellnopt.utils.midas import write_midas

    HAS_LIBS = True
except ImportError:
    pass

__virtualname__ = "cellnopt_midas"

log = logging.getLogger(__name__)


def __virtual__():
    if not HAS_LIBS:
        return (
            False,
            "The following dependencies are required to use the cellnopt modules: pandas",
        )

    return __virtualname__


def _failed(stage, exc, **kwargs):
    saltext.cellnopt.utils.pipeline.log_pipeline_error(stage, str(exc), **kwargs)
    return {"error": str(exc)}


def read(path, **kwargs):
    """
    .. versionadded:: 1.0.0

    Summarise a MIDAS file.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt_midas.read /srv/cno/data.csv

    """
    try:
        data = saltext.cellnopt.utils.pipeline.read_data(path)
    except SaltException as exc:
        return _failed("read-midas", exc, **kwargs)

    return {
        "cell_line": data.cell_line,
        "stimuli": list(data.stimuli_names),
        "inhibitors": list(data.inhibitor_names),
        "signals": list(data.signal_names),
        "experiments": data.experiment_names,
        "times": data.times,
    }


def condition(path, experiment, **kwargs):
    """
    .. versionadded:: 1.0.0

    Treatment of one experiment: stimulus values and inhibited names.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt_midas.condition /srv/cno/data.csv e2

    """
    try:
        data = saltext.cellnopt.utils.pipeline.read_data(path)
        found = condition_of(data, experiment)
    except SaltException as exc:
        return _failed("read-midas", exc, **kwargs)

    return {"stimuli": dict(found.stimuli), "inhibited": sorted(found.inhibited)}


def timecourse(path, experiment, protein, **kwargs):
    """
    .. versionadded:: 1.0.0

    ``[time, value]`` pairs of one protein in one experiment; missing values are None.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt_midas.timecourse /srv/cno/data.csv e2 ERK

    """
    try:
        data = saltext.cellnopt.utils.pipeline.read_data(path)
        series = midas_timecourse(data, experiment, protein)
    except SaltException as exc:
        return _failed("read-midas", exc, **kwargs)

    return [[time, value] for time, value in series]


def build(measurements, out=None, cell_line="Cell", **kwargs):
    """
    .. versionadded:: 1.0.0

    Build a MIDAS dataset from a list of measurements, each a mapping with
    ``protein``, ``time``, ``value`` and optional ``stimuli`` and
    ``inhibitors`` mappings of 0/1 flags.

    :param out: File to write; the MIDAS text is returned when omitted.

    CLI Example:

    .. code-block:: bash

        salt-call cellnopt_midas.build \
            '[{protein: ERK, time: 10, stimuli: {EGF: 1}, value: 0.9}]' out=/srv/cno/data.csv

    """
    try:
        builder = MidasBuilder(cell_line=cell_line)
        builder.add_measurements(Measurement(**item) for item in measurements)
        if out:
            builder.export2midas(out)
            return {"path": out, "measurements": len(builder)}
        return write_midas(builder.xmidas)
    except (SaltException, TypeError, OSError) as exc:
        return _failed("build", exc, **kwargs)
