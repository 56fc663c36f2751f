"""
Objective function of a candidate sub-model

.. versionadded:: 1.0.0

The score of a bitstring is ``theta_f + alpha * theta_s`` where ``theta_f`` is
the mean squared difference between data and simulated steady state and
``theta_s`` the share of reaction inputs the bitstring keeps.

Steady states are compared with the data at the first non-zero time point by
default. Time 0 is only scored on request and is then compared with the
baseline steady state (no stimulus, nothing inhibited).
"""

import logging
import math
from dataclasses import dataclass
from dataclasses import field

import numpy as np
import pandas as pd
from salt.exceptions import CommandExecutionError  # pylint: disable=import-error
from salt.exceptions import SaltInvocationError  # pylint: disable=import-error

from saltext.cellnopt.utils.boolean import CompiledModel
from saltext.cellnopt.utils.midas import ExperimentCondition

log = logging.getLogger(__name__)

DEFAULT_ALPHA = 1e-4
DEFAULT_NA_FAC = 1.0
RESIDUAL_COLUMNS = [
    "experiment",
    "signal",
    "time",
    "data",
    "simulated",
    "residual",
    "contribution",
]


@dataclass(frozen=True)
class ScoreBreakdown:
    """
    Terms of the objective function; ``total == theta_f + alpha * theta_s``
    """

    theta_f: float
    theta_s: float
    alpha: float
    total: float
    n_points: int
    n_na: int
    residuals: pd.DataFrame = field(default=None, compare=False, repr=False)

    def to_dict(self):
        return {
            "theta_f": self.theta_f,
            "theta_s": self.theta_s,
            "alpha": self.alpha,
            "total": self.total,
            "n_points": self.n_points,
            "n_na": self.n_na,
        }


def _bits(bits, length):
    if bits is None:
        return np.ones(length, dtype=bool)
    keep = np.asarray([int(bit) for bit in bits], dtype=bool)
    if keep.size != length:
        raise SaltInvocationError(f"Bitstring has {keep.size} bits, model has {length} reactions")
    return keep


def default_times(data, include_time_zero=False):
    """
    First non-zero time of the dataset, preceded by 0 when requested
    """
    times = [time for time in data.times if time > 0][:1]
    if include_time_zero and 0.0 in data.times:
        times.insert(0, 0.0)
    return times


class ScoringProblem:
    """
    A model compiled once against one dataset.

    :py:meth:`score` is the hot path of training: it simulates every experiment
    in one vectorised pass and never touches pandas unless residuals are asked for.
    """

    def __init__(
        self,
        model,
        data,
        times=None,
        na_fac=DEFAULT_NA_FAC,
        max_iter=None,
        include_time_zero=False,
    ):
        missing = sorted(set(data.signal_names) - model.nodes)
        if missing:
            raise SaltInvocationError(f"Signals absent from the model: {', '.join(missing)}")
        self.model = model
        self.data = data
        self.na_fac = float(na_fac)
        self.max_iter = max_iter
        self.compiled = CompiledModel(model)
        self.weights = np.array([len(r.inputs) for r in model.reactions], dtype=np.int64)

        if times is None:
            times = default_times(data, include_time_zero)
        self.times = sorted(float(time) for time in times)
        absent = [time for time in self.times if time not in data.times]
        if absent:
            log.warning("No data at time(s) %s, nothing is scored there", absent)

        self.signals = list(data.signal_names)
        self.experiments = data.experiment_names
        self.signal_rows = np.array(
            [self.compiled.position[name] for name in self.signals], dtype=np.intp
        )
        self.clamps = self.compiled.clamps(data.conditions())
        self.baseline = None
        if 0.0 in self.times:
            self.baseline = self.compiled.clamps(
                [ExperimentCondition(stimuli={name: 0 for name in data.stimuli_names})]
            )
        # times x signals x experiments
        shape = (len(self.times), len(self.signals), len(self.experiments))
        if self.times:
            self.values = np.stack(
                [data.signal_frame(time).to_numpy(dtype=float).T for time in self.times]
            ).reshape(shape)
        else:
            self.values = np.empty(shape)

    def theta_s(self, bits=None):
        keep = _bits(bits, len(self.weights))
        total = int(self.weights.sum())
        if total == 0:
            return 0.0
        return int(self.weights[keep].sum()) / total

    def _simulated(self, keep):
        steady = self.compiled.simulate(self.clamps, keep, self.max_iter)[self.signal_rows]
        if self.baseline is None:
            return [steady for _ in self.times]
        base = self.compiled.simulate(self.baseline, keep, self.max_iter)[self.signal_rows]
        base = np.repeat(base, len(self.experiments), axis=1)
        return [base if time == 0.0 else steady for time in self.times]

    def score(self, bits=None, alpha=DEFAULT_ALPHA, with_residuals=False):
        """
        Return the :py:class:`ScoreBreakdown` of ``bits`` (all ones when None)
        """
        keep = _bits(bits, len(self.weights))
        if self.times:
            simulated = np.stack(self._simulated(keep))
        else:
            simulated = np.zeros_like(self.values)
        present = ~np.isnan(self.values)
        na = present & np.isnan(simulated)
        compared = present & ~na
        contributions = np.where(compared, (self.values - np.nan_to_num(simulated)) ** 2, 0.0)
        contributions = np.where(na, self.na_fac, contributions)

        n_points = int(present.sum())
        if n_points == 0:
            raise CommandExecutionError("No data point can be compared with the simulation")
        # experiment, signal, time order
        ordered = contributions.transpose(2, 1, 0)[present.transpose(2, 1, 0)]
        theta_f = math.fsum(ordered.tolist()) / n_points
        theta_s = self.theta_s(keep)
        alpha = float(alpha)
        residuals = None
        if with_residuals:
            residuals = self._residuals(simulated, contributions, present)
        return ScoreBreakdown(
            theta_f=theta_f,
            theta_s=theta_s,
            alpha=alpha,
            total=theta_f + alpha * theta_s,
            n_points=n_points,
            n_na=int(na.sum()),
            residuals=residuals,
        )

    def _residuals(self, simulated, contributions, present):
        records = []
        for e_index, experiment in enumerate(self.experiments):
            for k_index, signal in enumerate(self.signals):
                for t_index, time in enumerate(self.times):
                    data = self.values[t_index, k_index, e_index]
                    sim = simulated[t_index, k_index, e_index]
                    records.append(
                        (
                            experiment,
                            signal,
                            time,
                            data,
                            sim,
                            data - sim,
                            contributions[t_index, k_index, e_index]
                            if present[t_index, k_index, e_index]
                            else np.nan,
                        )
                    )
        return pd.DataFrame.from_records(records, columns=RESIDUAL_COLUMNS)


def theta_f(
    model,
    bits,
    data,
    times=None,
    na_fac=DEFAULT_NA_FAC,
    max_iter=None,
    include_time_zero=False,
):
    """
    Data term alone: a :py:class:`ScoreBreakdown` with ``alpha`` and
    ``theta_s`` set to 0
    """
    problem = ScoringProblem(model, data, times, na_fac, max_iter, include_time_zero)
    breakdown = problem.score(bits, alpha=0.0, with_residuals=True)
    return ScoreBreakdown(
        theta_f=breakdown.theta_f,
        theta_s=0.0,
        alpha=0.0,
        total=breakdown.theta_f,
        n_points=breakdown.n_points,
        n_na=breakdown.n_na,
        residuals=breakdown.residuals,
    )


def theta_s(model, bits):
    """
    Share of the model's reaction inputs kept by ``bits``; 0 for an empty model
    """
    weights = [len(reaction.inputs) for reaction in model.reactions]
    keep = _bits(bits, len(weights))
    total = sum(weights)
    if total == 0:
        return 0.0
    return sum(weight for weight, bit in zip(weights, keep) if bit) / total


def score(
    model,
    bits,
    data,
    alpha=DEFAULT_ALPHA,
    times=None,
    na_fac=DEFAULT_NA_FAC,
    max_iter=None,
    include_time_zero=False,
):
    """
    Full objective ``theta_f + alpha * theta_s`` with residuals
    """
    problem = ScoringProblem(model, data, times, na_fac, max_iter, include_time_zero)
    return problem.score(bits, alpha=alpha, with_residuals=True)
