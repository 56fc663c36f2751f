"""
CellNOpt Training Report State Module

.. versionadded:: 1.0.0

:maturity: new
:platform: linux

:configuration:
    Pipeline settings are passed as keyword arguments (flat with section dots or
    nested) or come from a ``profile`` mapping in the minion configuration,
    grains or pillar.

    Example state:

    .. code-block:: yaml

        Train the EGF model:
          cellnopt.trained:
            - name: /srv/cno/run
            - pkn: /srv/cno/pkn.sif
            - midas: /srv/cno/data.csv
            - profile: cellnopt_defaults
            - ga:
                seed: 3
                population_size: 80

    A report is up to date when its ``run.json`` records the same input
    digests and settings; the thread count never triggers retraining.

"""

# Python libs
import logging
import os

import salt.utils.dictdiffer  # pylint: disable=import-error

__virtualname__ = "cellnopt"

log = logging.getLogger(__name__)


def __virtual__():
    """
    Only make this state available if the cellnopt module is available.
    """
    if "cellnopt.train" in __salt__:
        return __virtualname__
    return (False, "cellnopt module could not be loaded")


def trained(name, pkn, midas, **kwargs):
    """
    .. versionadded:: 1.0.0

    Ensure the directory ``name`` holds a training report for these inputs and settings.

    :param name:
        Artifact directory of the report.

    :param pkn:
        Path to the SIF prior knowledge network.

    :param midas:
        Path to the MIDAS dataset.

    :param profile:
        Name of a configuration mapping providing default settings.

    """
    ret = {"name": name, "result": False, "comment": "", "changes": {}}

    expected = __salt__["cellnopt.manifest"](pkn, midas, **kwargs)
    if "error" in expected:
        ret["comment"] = f"Unable to prepare the training of {name}: {expected['error']}"
        return ret

    current = __salt__["cellnopt.report"](name, cellnopt_log_level="info")
    if "error" in current:
        current = {}
    else:
        current = {key: current.get(key) for key in ("config", "inputs")}

    diff = salt.utils.dictdiffer.deep_diff(current, expected)
    if not diff:
        ret["result"] = True
        ret["comment"] = f"Training report {name} is already up to date."
        return ret

    if __opts__["test"]:
        ret["comment"] = f"Training report {name} would be {'rebuilt' if current else 'created'}."
        ret["result"] = None
        ret["changes"] = diff
        return ret

    run = __salt__["cellnopt.train"](pkn, midas, out=name, **kwargs)
    if "error" in run:
        ret["comment"] = f"Failed to train {name}! ({run['error']})"
        return ret

    ret["result"] = True
    ret["comment"] = f"Training report {name} has been {'rebuilt' if current else 'created'}."
    ret["changes"] = {
        "old": current,
        "new": {
            "config": expected["config"],
            "inputs": expected["inputs"],
            "bitstring": run["bitstring"],
            "score": run["score"],
        },
    }
    return ret


def absent(name):
    """
    .. versionadded:: 1.0.0

    Ensure the training report in ``name`` does not exist. Only the files
    listed in its ``run.json`` are removed, then the directory if it is empty.

    :param name:
        Artifact directory of the report.

    """
    ret = {"name": name, "result": False, "comment": "", "changes": {}}

    current = __salt__["cellnopt.report"](name, cellnopt_log_level="info")
    if "error" in current:
        ret["result"] = True
        ret["comment"] = f"Training report {name} was not found."
        return ret

    artifacts = sorted(current.get("artifacts", []))
    if __opts__["test"]:
        ret["comment"] = f"Training report {name} would be deleted."
        ret["result"] = None
        ret["changes"] = {"old": artifacts, "new": []}
        return ret

    for artifact in artifacts:
        __salt__["file.remove"](os.path.join(name, artifact))
    if os.path.isdir(name) and not os.listdir(name):
        __salt__["file.rmdir"](name)

    ret["result"] = True
    ret["comment"] = f"Training report {name} has been deleted."
    ret["changes"] = {"old": artifacts, "new": []}
    return ret
