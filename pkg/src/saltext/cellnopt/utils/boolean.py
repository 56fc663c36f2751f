"""
Synchronous boolean steady-state simulation

.. versionadded:: 1.0.0

Every step computes, for each node, the OR over its incoming reactions of the
AND over their (possibly negated) inputs. Nodes without incoming reactions keep
their initial value, stimuli are clamped to their condition value and inhibited
nodes to 0. A node that keeps varying once the trajectory has entered a cycle
of states, or is still changing when the iteration budget runs out, is NA.

:py:class:`CompiledModel` turns a model into incidence matrices once and then
simulates any sub-model selected by a bitstring for a batch of conditions in a
single vectorised pass.
"""

import itertools
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from salt.exceptions import CommandExecutionError  # pylint: disable=import-error
from salt.exceptions import SaltInvocationError  # pylint: disable=import-error

from saltext.cellnopt.utils.midas import ExperimentCondition
from saltext.cellnopt.utils.reactions import Sign

log = logging.getLogger(__name__)

INITIAL_VALUE = 0
TRUTH_TABLE_LIMIT = 20


@dataclass(frozen=True)
class SimState:
    """
    Steady-state value of every node: 0, 1 or None for NA
    """

    values: dict

    def __getitem__(self, node):
        return self.values[node]

    def is_na(self, node):
        return self.values[node] is None

    @property
    def na_nodes(self):
        return sorted(node for node, value in self.values.items() if value is None)


@dataclass(frozen=True)
class Clamps:
    """
    Per-condition clamps, one column per condition
    """

    stimulus_rows: np.ndarray
    stimulus_values: np.ndarray
    inhibited: np.ndarray

    @property
    def size(self):
        return self.inhibited.shape[1]


class CompiledModel:
    """
    Incidence-matrix form of a :py:class:`~saltext.cellnopt.utils.cnograph.PknModel`
    """

    def __init__(self, model):
        self.model = model
        self.nodes = tuple(sorted(model.nodes))
        self.position = {node: index for index, node in enumerate(self.nodes)}
        size, count = len(self.nodes), len(model.reactions)
        self.activators = np.zeros((count, size), dtype=np.int32)
        self.inhibitors = np.zeros((count, size), dtype=np.int32)
        self.arity = np.zeros(count, dtype=np.int32)
        self.targets = np.zeros((size, count), dtype=np.int32)
        for index, reaction in enumerate(model.reactions):
            for name, sign in reaction.inputs:
                matrix = self.activators if sign is Sign.ACTIVATE else self.inhibitors
                matrix[index, self.position[name]] = 1
            self.arity[index] = len(reaction.inputs)
            self.targets[self.position[reaction.output], index] = 1

    def clamps(self, conditions):
        """
        Build the :py:class:`Clamps` of a list of
        :py:class:`~saltext.cellnopt.utils.midas.ExperimentCondition`
        """
        stimuli = sorted(self.model.stimuli)
        row_of = {name: row for row, name in enumerate(stimuli)}
        values = np.zeros((len(stimuli), len(conditions)), dtype=bool)
        inhibited = np.zeros((len(self.nodes), len(conditions)), dtype=bool)
        for column, condition in enumerate(conditions):
            unknown = (set(condition.stimuli) - self.model.stimuli) | (
                set(condition.inhibited) - self.model.inhibitors
            )
            if unknown:
                raise SaltInvocationError(
                    f"Condition names not annotated in the model: {', '.join(sorted(unknown))}"
                )
            for name, value in condition.stimuli.items():
                values[row_of[name], column] = bool(value)
            for name in condition.inhibited:
                inhibited[self.position[name], column] = True
        rows = np.array([self.position[name] for name in stimuli], dtype=np.intp)
        return Clamps(stimulus_rows=rows, stimulus_values=values, inhibited=inhibited)

    @staticmethod
    def _apply(state, clamps):
        state[clamps.stimulus_rows] = clamps.stimulus_values
        state &= ~clamps.inhibited
        return state

    def simulate(self, clamps, bits=None, max_iter=None):
        """
        Simulate the sub-model selected by ``bits`` (all reactions when None).

        Returns a float array nodes x conditions holding 0, 1 or NaN for NA.
        """
        if bits is None:
            keep = np.ones(len(self.arity), dtype=bool)
        else:
            keep = np.asarray(bits, dtype=bool)
            if keep.shape != self.arity.shape:
                raise SaltInvocationError(
                    f"Bitstring has {keep.size} bits, model has {self.arity.size} reactions"
                )
        activators = self.activators[keep]
        inhibitors = self.inhibitors[keep]
        arity = self.arity[keep][:, None]
        targets = self.targets[:, keep]
        driven = targets.any(axis=1)[:, None]

        size = len(self.nodes)
        max_iter = size + 1 if max_iter is None else int(max_iter)
        if max_iter < 1:
            raise SaltInvocationError(f"max_iter must be >= 1, got {max_iter}")

        state = np.full((size, clamps.size), bool(INITIAL_VALUE))
        state = self._apply(state, clamps)
        initial = state.copy()
        history = [state]
        converged = np.zeros(clamps.size, dtype=bool)
        for _ in range(max_iter):
            current = state.astype(np.int32)
            satisfied = activators @ current + inhibitors @ (1 - current)
            fired = (satisfied == arity).astype(np.int32)
            reached = (targets @ fired) > 0
            update = self._apply(np.where(driven, reached, initial), clamps)
            converged = np.all(update == state, axis=0)
            history.append(update)
            state = update
            if converged.all():
                break

        result = state.astype(float)
        if not converged.all():
            result[_unstable(np.array(history), converged, size + 1)] = np.nan
            log.debug(
                "%d of %d condition(s) did not reach a fixed point in %d step(s)",
                int((~converged).sum()),
                clamps.size,
                max_iter,
            )
        return result


def _unstable(history, converged, window):
    """
    Nodes x conditions mask of the NA values of a trajectory.

    A condition whose last state repeats an earlier one has entered a cycle of
    states: the nodes varying along that cycle are NA. Otherwise every node that
    changed in the last ``window`` steps is NA.
    """
    last = history[-1]
    steps = len(history) - 1
    period = np.zeros(last.shape[1], dtype=int)
    # descending, so the shortest repeat wins
    for lag in range(steps, 0, -1):
        period[np.all(history[-1 - lag] == last, axis=0)] = lag
    recent = history[-min(window, steps) - 1 :]
    unstable = np.any(recent != last, axis=0)
    for column in np.flatnonzero(period):
        orbit = history[-period[column] :, :, column]
        unstable[:, column] = np.any(orbit != last[:, column], axis=0)
    unstable[:, converged] = False
    return unstable


def _value(number):
    return None if np.isnan(number) else int(number)


def simulate_steady(model, condition, max_iter=None):
    """
    Steady state of ``model`` under one condition as a :py:class:`SimState`
    """
    compiled = CompiledModel(model)
    column = compiled.simulate(compiled.clamps([condition]), max_iter=max_iter)[:, 0]
    return SimState({node: _value(column[row]) for row, node in enumerate(compiled.nodes)})


def simulate_conditions(model, conditions, max_iter=None):
    """
    Steady states of ``model`` under several conditions as a nodes x conditions
    :py:class:`pandas.DataFrame` (NaN for NA)
    """
    compiled = CompiledModel(model)
    values = compiled.simulate(compiled.clamps(conditions), max_iter=max_iter)
    return pd.DataFrame(values, index=list(compiled.nodes), columns=range(len(conditions)))


def enumerate_conditions(model):
    """
    Every stimulus/inhibitor assignment of ``model`` in a fixed order.

    Yields ``(key, condition)`` where ``key`` is
    ``(((stimulus, value), ...), ((inhibitor, flag), ...))``.
    """
    stimuli = sorted(model.stimuli)
    inhibitors = sorted(model.inhibitors)
    for bits in itertools.product((0, 1), repeat=len(stimuli) + len(inhibitors)):
        stimulus_bits, inhibitor_bits = bits[: len(stimuli)], bits[len(stimuli) :]
        key = (tuple(zip(stimuli, stimulus_bits)), tuple(zip(inhibitors, inhibitor_bits)))
        condition = ExperimentCondition(
            stimuli=dict(zip(stimuli, stimulus_bits)),
            inhibited=frozenset(name for name, flag in zip(inhibitors, inhibitor_bits) if flag),
        )
        yield key, condition


def truth_table(model, max_iter=None):
    """
    Signal values over all ``2**(stimuli + inhibitors)`` conditions.

    Returns a dict keyed as in :py:func:`enumerate_conditions` whose values map
    each signal to 0, 1 or None.
    """
    inputs = len(model.stimuli) + len(model.inhibitors)
    if inputs > TRUTH_TABLE_LIMIT:
        raise CommandExecutionError(
            f"Truth table over {inputs} stimuli and inhibitors exceeds the limit "
            f"of {TRUTH_TABLE_LIMIT}"
        )
    keys, conditions = zip(*enumerate_conditions(model))
    compiled = CompiledModel(model)
    values = compiled.simulate(compiled.clamps(conditions), max_iter=max_iter)
    signals = sorted(model.signals)
    rows = [compiled.position[name] for name in signals]
    return {
        key: {name: _value(values[row, column]) for name, row in zip(signals, rows)}
        for column, key in enumerate(keys)
    }
