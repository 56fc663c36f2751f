"""
MIDAS perturbation data: reader, writer, builder and the XMidas data model

.. versionadded:: 1.0.0

A MIDAS file is a CSV table whose header prefixes tell the column role:

* ``TR:`` treatments. ``TR:<name>`` (or ``TR:<name>:Stimuli``) is a stimulus,
  ``TR:<name>i``, ``TR:<name>:i`` or ``TR:<name>:Inhibitors`` an inhibitor and
  ``TR:<cell>:CellLine`` the cell line.
* ``DA:`` acquisition times, ``DA:ALL`` for every signal or ``DA:<signal>``.
* ``DV:`` measured values.
* ``ID:`` annotations, ignored.

Rows sharing the same treatment vector form one experiment, named
``experiment_<k>`` in order of first appearance. :py:class:`XMidas` keeps two
:py:mod:`pandas` tables: ``experiments`` (experiment x treatment) and
``measurements`` indexed by (experiment, time) with one column per signal.
"""

import io
import logging
import math
from dataclasses import dataclass
from dataclasses import field

import numpy as np
import pandas as pd
import salt.utils.files  # pylint: disable=import-error
from salt.exceptions import SaltInvocationError  # pylint: disable=import-error

from saltext.cellnopt.exceptions import MidasFormatError
from saltext.cellnopt.exceptions import NameLookupError
from saltext.cellnopt.utils.reactions import is_gate_name
from saltext.cellnopt.utils.reactions import is_node_id
from saltext.cellnopt.utils.reactions import validate_node_id

log = logging.getLogger(__name__)

DEFAULT_CELL_LINE = "Cell"
INHIBITOR_TAG = ":i"
MISSING_TOKENS = frozenset(("", "NA", "NaN", "nan", "N/A"))
BINARY_TOKENS = {"0": 0, "1": 1, "0.0": 0, "1.0": 1}


@dataclass(frozen=True)
class Measurement:
    """
    One measured value of ``protein`` at ``time`` under a treatment
    """

    protein: str
    time: float
    stimuli: dict = field(default_factory=dict)
    inhibitors: dict = field(default_factory=dict)
    value: float = math.nan

    def __post_init__(self):
        object.__setattr__(self, "protein", validate_node_id(self.protein))
        time = float(self.time)
        if not time >= 0:
            raise SaltInvocationError(f"Measurement time must be >= 0, got {self.time!r}")
        object.__setattr__(self, "time", time)
        for attr in ("stimuli", "inhibitors"):
            settings = {}
            for name, flag in dict(getattr(self, attr)).items():
                if flag not in (0, 1):
                    raise SaltInvocationError(f"{attr} entry {name!r} must be 0 or 1")
                settings[validate_node_id(name)] = int(flag)
            object.__setattr__(self, attr, settings)
        overlap = set(self.stimuli) & set(self.inhibitors)
        if overlap:
            raise SaltInvocationError(
                f"{', '.join(sorted(overlap))} both stimulated and inhibited in one measurement"
            )
        object.__setattr__(self, "value", float(self.value))

    @property
    def out_of_range(self):
        """
        True if the value lies outside [0, 1] (missing values are never flagged)
        """
        return not math.isnan(self.value) and not 0.0 <= self.value <= 1.0

    @property
    def condition_key(self):
        """
        Treatment identity; a 0 entry is the same as an absent one
        """
        return (
            frozenset(name for name, flag in self.stimuli.items() if flag),
            frozenset(name for name, flag in self.inhibitors.items() if flag),
        )


@dataclass(frozen=True)
class ExperimentCondition:
    """
    Stimulus values and inhibited species of one experiment
    """

    stimuli: dict = field(default_factory=dict)
    inhibited: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "stimuli", {name: int(v) for name, v in self.stimuli.items()})
        object.__setattr__(self, "inhibited", frozenset(self.inhibited))


@dataclass(frozen=True, eq=False)
class XMidas:
    """
    Two-table perturbation dataset; use :py:meth:`equals` to compare
    """

    experiments: pd.DataFrame
    measurements: pd.DataFrame
    cell_line: str = DEFAULT_CELL_LINE
    stimuli_names: tuple = ()
    inhibitor_names: tuple = ()
    signal_names: tuple = ()

    @property
    def experiment_names(self):
        return list(self.experiments.index)

    @property
    def times(self):
        if self.measurements.empty:
            return []
        return sorted(set(self.measurements.index.get_level_values("time")))

    def condition(self, experiment):
        return condition_of(self, experiment)

    def conditions(self):
        return [condition_of(self, name) for name in self.experiment_names]

    def signal_frame(self, time):
        """
        Experiment x signal values at ``time``; missing rows are all-NaN
        """
        try:
            frame = self.measurements.xs(float(time), level="time", drop_level=True)
        except KeyError:
            frame = pd.DataFrame(columns=list(self.signal_names), dtype=float)
        return frame.reindex(self.experiment_names).astype(float)

    def equals(self, other):
        return (
            isinstance(other, XMidas)
            and self.cell_line == other.cell_line
            and self.stimuli_names == other.stimuli_names
            and self.inhibitor_names == other.inhibitor_names
            and self.signal_names == other.signal_names
            and self.experiments.equals(other.experiments)
            and self.measurements.equals(other.measurements)
        )


def _assemble(cell_line, stimuli, inhibitors, signals, conditions, rows, values):
    """
    Build an XMidas from experiment conditions (tuples aligned on the sorted
    ``stimuli`` and ``inhibitors``), (experiment index, time) ``rows`` and
    ``values`` keyed by (experiment index, time, signal).
    """
    names = [f"experiment_{index}" for index in range(len(conditions))]
    columns = list(stimuli) + [f"{name}{INHIBITOR_TAG}" for name in inhibitors]
    matrix = np.array(
        [list(stim) + list(inhib) for stim, inhib in conditions], dtype=np.int64
    ).reshape(len(conditions), len(columns))
    experiments = pd.DataFrame(
        matrix, index=pd.Index(names, name="experiment", dtype=object), columns=columns
    )

    ordered = sorted(set(rows) | {(index, 0.0) for index in range(len(conditions))})
    position = {row: number for number, row in enumerate(ordered)}
    column = {name: number for number, name in enumerate(signals)}
    grid = np.full((len(ordered), len(signals)), np.nan)
    for (index, time, signal), value in values.items():
        grid[position[(index, time)], column[signal]] = value
    index = pd.MultiIndex.from_arrays(
        [
            pd.Index([names[k] for k, _ in ordered], dtype=object),
            pd.Index([time for _, time in ordered], dtype=float),
        ],
        names=["experiment", "time"],
    )
    measurements = pd.DataFrame(grid, index=index, columns=list(signals))
    return XMidas(
        experiments=experiments,
        measurements=measurements,
        cell_line=cell_line,
        stimuli_names=tuple(stimuli),
        inhibitor_names=tuple(inhibitors),
        signal_names=tuple(signals),
    )


def _classify_treatment(rest):
    lowered = rest.lower()
    if lowered == "cellline":
        return "cell", DEFAULT_CELL_LINE
    if lowered.endswith(":cellline"):
        return "cell", rest[: -len(":cellline")]
    if lowered.endswith(":stimuli"):
        return "stimulus", rest[: -len(":stimuli")]
    if lowered.endswith(":inhibitors"):
        return "inhibitor", rest[: -len(":inhibitors")]
    if rest.endswith(INHIBITOR_TAG):
        return "inhibitor", rest[: -len(INHIBITOR_TAG)]
    if len(rest) > 1 and rest.endswith("i"):
        return "inhibitor", rest[:-1]
    return "stimulus", rest


def _parse_float(text, source, lineno, column):
    try:
        return float(text)
    except ValueError as exc:
        raise MidasFormatError(
            f"not a number: {text!r}", source=source, lineno=lineno, column=column
        ) from exc


def read_midas(stream, source_name="<stream>"):
    """
    Read MIDAS CSV text (a string or a file object) into an :py:class:`XMidas`.

    Raises :py:class:`~saltext.cellnopt.exceptions.MidasFormatError`.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    try:
        table = pd.read_csv(stream, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError as exc:
        raise MidasFormatError("header row missing", source=source_name, lineno=1) from exc
    except pd.errors.ParserError as exc:
        raise MidasFormatError(str(exc), source=source_name) from exc
    table.columns = [str(column).strip() for column in table.columns]

    cell_columns, stimulus_columns, inhibitor_columns = {}, {}, {}
    times, values = {}, {}
    for column in table.columns:
        prefix, _, rest = column.partition(":")
        prefix = prefix.upper()
        if prefix == "ID":
            log.warning("Ignoring MIDAS annotation column %s in %s", column, source_name)
            continue
        if prefix not in ("TR", "DA", "DV") or not rest:
            raise MidasFormatError(
                "header must be prefixed with TR:, DA: or DV:",
                source=source_name,
                lineno=1,
                column=column,
            )
        if prefix == "TR":
            role, name = _classify_treatment(rest)
            target = {
                "cell": cell_columns,
                "stimulus": stimulus_columns,
                "inhibitor": inhibitor_columns,
            }[role]
        else:
            name = "ALL" if prefix == "DA" and rest.upper() == "ALL" else rest
            target = times if prefix == "DA" else values
        if _invalid_name(name, target is cell_columns):
            raise MidasFormatError(
                f"invalid name {name!r}", source=source_name, lineno=1, column=column
            )
        if name in target:
            raise MidasFormatError(
                f"duplicate column for {name!r}", source=source_name, lineno=1, column=column
            )
        target[name] = column

    clash = set(stimulus_columns) & set(inhibitor_columns)
    if clash:
        raise MidasFormatError(
            f"{', '.join(sorted(clash))} declared both as stimulus and inhibitor",
            source=source_name,
            lineno=1,
        )
    for signal, column in values.items():
        if "ALL" not in times and signal not in times:
            raise MidasFormatError(
                "DV column without matching DA column", source=source_name, column=column
            )

    stimuli = sorted(stimulus_columns)
    inhibitors = sorted(inhibitor_columns)
    signals = sorted(values)

    def treatment(row, lineno, column):
        token = str(row[column]).strip()
        if token not in BINARY_TOKENS:
            raise MidasFormatError(
                f"treatment must be 0 or 1, found {token!r}",
                source=source_name,
                lineno=lineno,
                column=column,
            )
        return BINARY_TOKENS[token]

    cell_used = set()
    keys = {}
    conditions = []
    rows = set()
    data = {}
    out_of_range = 0
    for offset, row in enumerate(table.to_dict("records")):
        lineno = offset + 2
        for name, column in cell_columns.items():
            if treatment(row, lineno, column):
                cell_used.add(name)
        key = (
            tuple(treatment(row, lineno, stimulus_columns[name]) for name in stimuli),
            tuple(treatment(row, lineno, inhibitor_columns[name]) for name in inhibitors),
        )
        if key not in keys:
            keys[key] = len(conditions)
            conditions.append(key)
        experiment = keys[key]
        for signal in signals:
            time_column = times.get(signal, times.get("ALL"))
            time_text = str(row[time_column]).strip()
            value_text = str(row[values[signal]]).strip()
            if time_text in MISSING_TOKENS:
                if value_text not in MISSING_TOKENS:
                    raise MidasFormatError(
                        "value without acquisition time",
                        source=source_name,
                        lineno=lineno,
                        column=values[signal],
                    )
                continue
            time = _parse_float(time_text, source_name, lineno, time_column)
            if not time >= 0:
                raise MidasFormatError(
                    f"negative time {time_text!r}",
                    source=source_name,
                    lineno=lineno,
                    column=time_column,
                )
            rows.add((experiment, time))
            if value_text in MISSING_TOKENS:
                continue
            value = _parse_float(value_text, source_name, lineno, values[signal])
            if not 0.0 <= value <= 1.0:
                out_of_range += 1
            if (experiment, time, signal) in data:
                log.warning(
                    "%s line %d: duplicate value of %s at time %s overwritten",
                    source_name,
                    lineno,
                    signal,
                    time,
                )
            data[(experiment, time, signal)] = value

    if len(cell_used) > 1:
        raise MidasFormatError(
            f"several cell lines in one file: {', '.join(sorted(cell_used))}", source=source_name
        )
    if cell_used:
        (cell_line,) = cell_used
    elif cell_columns:
        cell_line = sorted(cell_columns)[0]
    else:
        cell_line = DEFAULT_CELL_LINE
    if out_of_range:
        log.warning("%s: %d value(s) outside [0, 1]", source_name, out_of_range)

    result = _assemble(cell_line, stimuli, inhibitors, signals, conditions, rows, data)
    log.debug(
        "Read %d experiment(s), %d signal(s) from %s",
        len(conditions),
        len(signals),
        source_name,
    )
    return result


def _invalid_name(name, is_cell_line):
    """
    Cell line labels are free text; every other name must be a species name
    """
    if is_cell_line:
        return not name
    return name != "ALL" and (not is_node_id(name) or is_gate_name(name))


def _format_number(value):
    value = float(value)
    if math.isnan(value):
        return "NA"
    if value.is_integer():
        return str(int(value))
    return repr(value)


def _stimulus_header(name):
    kind, parsed = _classify_treatment(name)
    if kind == "stimulus" and parsed == name:
        return f"TR:{name}"
    return f"TR:{name}:Stimuli"


def write_midas(data):
    """
    Serialize an :py:class:`XMidas` as MIDAS CSV text.

    Columns: cell line, stimuli (sorted), inhibitors (sorted, ``i`` suffix),
    ``DA:ALL``, signals (sorted). One row per (experiment, time).
    """
    stimuli = sorted(data.stimuli_names)
    inhibitors = sorted(data.inhibitor_names)
    signals = sorted(data.signal_names)
    header = (
        [f"TR:{data.cell_line}:CellLine"]
        + [_stimulus_header(name) for name in stimuli]
        + [f"TR:{name}i" for name in inhibitors]
        + ["DA:ALL"]
        + [f"DV:{name}" for name in signals]
    )
    records = []
    for (experiment, time), values in data.measurements.iterrows():
        settings = data.experiments.loc[experiment]
        records.append(
            ["1"]
            + [str(int(settings[name])) for name in stimuli]
            + [str(int(settings[f"{name}{INHIBITOR_TAG}"])) for name in inhibitors]
            + [_format_number(time)]
            + [_format_number(values[name]) for name in signals]
        )
    table = pd.DataFrame(records, columns=header, dtype=object)
    return table.to_csv(index=False, lineterminator="\n")


def read_midas_file(path):
    """
    Read a MIDAS file from disk
    """
    with salt.utils.files.fopen(path, "r") as handle:
        return read_midas(handle.read(), source_name=str(path))


def write_midas_file(data, path):
    """
    Write a MIDAS file to disk
    """
    with salt.utils.files.fopen(path, "w") as handle:
        handle.write(write_midas(data))
    return str(path)


def condition_of(data, experiment):
    """
    Return the :py:class:`ExperimentCondition` of a named experiment
    """
    if experiment not in data.experiments.index:
        raise NameLookupError(f"Unknown experiment: {experiment!r}")
    row = data.experiments.loc[experiment]
    return ExperimentCondition(
        stimuli={name: int(row[name]) for name in data.stimuli_names},
        inhibited=frozenset(
            name for name in data.inhibitor_names if int(row[f"{name}{INHIBITOR_TAG}"])
        ),
    )


def timecourse(data, experiment, protein):
    """
    Return ``[(time, value), ...]`` of ``protein`` in ``experiment``, times
    ascending, missing values as None
    """
    if experiment not in data.experiments.index:
        raise NameLookupError(f"Unknown experiment: {experiment!r}")
    if protein not in data.signal_names:
        raise NameLookupError(f"Unknown protein: {protein!r}")
    series = data.measurements.xs(experiment, level="experiment")[protein].sort_index()
    return [
        (float(time), None if math.isnan(value) else float(value))
        for time, value in series.items()
    ]


class MidasBuilder:
    """
    Accumulate :py:class:`Measurement` objects into an :py:class:`XMidas`.

    .. code-block:: python

        builder = MidasBuilder()
        builder.add_measurement(Measurement("AKT", 0, {"EGFR": 1}, {"AKT": 0}, 0.1))
        builder.export2midas("data.csv")
    """

    def __init__(self, cell_line=DEFAULT_CELL_LINE):
        self.cell_line = cell_line
        self._measurements = {}
        self._stimuli = set()
        self._inhibitors = set()

    def __len__(self):
        return len(self._measurements)

    def add_measurement(self, measurement):
        key = measurement.condition_key + (measurement.protein, measurement.time)
        if key in self._measurements:
            log.warning(
                "Duplicate measurement of %s at time %s under the same condition, "
                "keeping the last one",
                measurement.protein,
                measurement.time,
            )
        if measurement.out_of_range:
            log.warning(
                "Measurement of %s at time %s outside [0, 1]: %s",
                measurement.protein,
                measurement.time,
                measurement.value,
            )
        self._measurements[key] = measurement
        self._stimuli.update(measurement.stimuli)
        self._inhibitors.update(measurement.inhibitors)
        return self

    def add_measurements(self, measurements):
        for measurement in measurements:
            self.add_measurement(measurement)
        return self

    @property
    def xmidas(self):
        stimuli = sorted(self._stimuli)
        inhibitors = sorted(self._inhibitors)
        signals = sorted({measurement.protein for measurement in self._measurements.values()})
        keys = {}
        conditions = []
        rows = set()
        values = {}
        for measurement in self._measurements.values():
            condition = (
                tuple(measurement.stimuli.get(name, 0) for name in stimuli),
                tuple(measurement.inhibitors.get(name, 0) for name in inhibitors),
            )
            if condition not in keys:
                keys[condition] = len(conditions)
                conditions.append(condition)
            experiment = keys[condition]
            rows.add((experiment, measurement.time))
            if not math.isnan(measurement.value):
                values[(experiment, measurement.time, measurement.protein)] = measurement.value
        return _assemble(self.cell_line, stimuli, inhibitors, signals, conditions, rows, values)

    def export2midas(self, path):
        return write_midas_file(self.xmidas, path)


def builder_add_measurement(builder, measurement):
    """
    Functional form of :py:meth:`MidasBuilder.add_measurement`
    """
    return builder.add_measurement(measurement)
