"""
Bitstring training: genetic algorithm and exhaustive search

.. versionadded:: 1.0.0

Bit ``i`` of a :py:class:`BitString` keeps reaction ``i`` of the preprocessed
model. The genetic algorithm is seeded and deterministic: every random draw is
made by the coordinating thread, fitness evaluation (optionally spread over a
thread pool) is pure and results are merged back in population order.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from dataclasses import field
from multiprocessing.pool import ThreadPool

import numpy as np
from salt.exceptions import CommandExecutionError  # pylint: disable=import-error
from salt.exceptions import SaltInvocationError  # pylint: disable=import-error

from saltext.cellnopt.utils.scoring import DEFAULT_ALPHA
from saltext.cellnopt.utils.scoring import DEFAULT_NA_FAC
from saltext.cellnopt.utils.scoring import ScoringProblem

log = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 16
STOP_REASONS = ("max_generations", "stall", "tolerance")


@dataclass(frozen=True)
class BitString:
    """
    Immutable 0/1 vector selecting reactions
    """

    bits: tuple = ()

    def __post_init__(self):
        bits = tuple(int(bit) for bit in self.bits)
        if any(bit not in (0, 1) for bit in bits):
            raise SaltInvocationError("A bitstring holds only 0 and 1")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_text(cls, text):
        text = text.strip()
        if any(char not in "01" for char in text):
            raise SaltInvocationError(f"Not a bitstring: {text!r}")
        return cls(tuple(int(char) for char in text))

    @classmethod
    def all_ones(cls, length):
        return cls((1,) * length)

    @classmethod
    def zeros(cls, length):
        return cls((0,) * length)

    @property
    def popcount(self):
        return sum(self.bits)

    def __len__(self):
        return len(self.bits)

    def __iter__(self):
        return iter(self.bits)

    def __getitem__(self, index):
        return self.bits[index]

    def __str__(self):
        return "".join(str(bit) for bit in self.bits)


@dataclass(frozen=True)
class GaConfig:
    """
    Genetic algorithm settings; ``bit_mutation_prob`` None means ``0.5 / length``
    """

    population_size: int = 50
    max_generations: int = 500
    stall_generations: int = 100
    bit_mutation_prob: float = None
    elitism_count: int = 5
    selection_pressure: float = 1.2
    relative_tolerance: float = 0.0
    seed: int = 0
    workers: int = 1
    models_tolerance: float = 0.1

    def __post_init__(self):
        problems = []
        if self.population_size < 2:
            problems.append("population_size must be >= 2")
        if self.bit_mutation_prob is not None and not 0 < self.bit_mutation_prob < 1:
            problems.append("bit_mutation_prob must lie in (0, 1)")
        if not 0 <= self.elitism_count < self.population_size:
            problems.append("elitism_count must be >= 0 and below population_size")
        if not 1.0 <= self.selection_pressure <= 2.0:
            problems.append("selection_pressure must lie in [1, 2]")
        if self.max_generations < 1:
            problems.append("max_generations must be >= 1")
        if self.stall_generations < 1:
            problems.append("stall_generations must be >= 1")
        if self.seed < 0:
            problems.append("seed must be unsigned")
        if self.workers < 1:
            problems.append("workers must be >= 1")
        if self.models_tolerance < 0:
            problems.append("models_tolerance must be >= 0")
        if problems:
            raise SaltInvocationError("Invalid GA configuration: " + "; ".join(problems))

    def mutation_rate(self, length):
        if self.bit_mutation_prob is not None:
            return self.bit_mutation_prob
        return 0.5 / max(length, 1)


@dataclass(frozen=True)
class TrainResult:
    """
    Outcome of :py:func:`ga_train`; ``generations`` holds
    ``(generation, best total, mean total)`` per generation
    """

    best: BitString
    best_score: object
    generations: tuple
    evaluations: int
    stopped_by: str
    tolerant_models: tuple = field(default=())


class Evaluator:
    """
    Memoised scoring of bitstrings over one :py:class:`ScoringProblem`
    """

    def __init__(self, problem, alpha=DEFAULT_ALPHA, workers=1):
        self.problem = problem
        self.alpha = float(alpha)
        self.workers = workers
        self.evaluations = 0
        self._cache = {}

    def _compute(self, key):
        bits = np.frombuffer(key, dtype=np.uint8).astype(bool)
        return self.problem.score(bits, alpha=self.alpha)

    @staticmethod
    def key(bits):
        return np.asarray(list(bits), dtype=np.uint8).tobytes()

    def evaluate(self, bits):
        key = self.key(bits)
        if key not in self._cache:
            self._cache[key] = self._compute(key)
            self.evaluations += 1
        return self._cache[key]

    def evaluate_many(self, population):
        """
        Totals of every row of ``population``, in row order
        """
        keys = [row.astype(np.uint8).tobytes() for row in population]
        fresh = list(dict.fromkeys(key for key in keys if key not in self._cache))
        if fresh:
            if self.workers > 1 and len(fresh) > 1:
                with ThreadPool(self.workers) as pool:
                    results = pool.map(self._compute, fresh)
            else:
                results = [self._compute(key) for key in fresh]
            self._cache.update(zip(fresh, results))
            self.evaluations += len(fresh)
        log.debug("Scored %d bitstring(s), %d from cache", len(keys), len(keys) - len(fresh))
        return [self._cache[key].total for key in keys]

    def within(self, limit):
        """
        Cached ``(BitString, total)`` pairs scoring at most ``limit``
        """
        found = []
        for key, breakdown in self._cache.items():
            if breakdown.total <= limit:
                bits = BitString(tuple(np.frombuffer(key, dtype=np.uint8)))
                found.append((bits, breakdown.total))
        return tuple(sorted(found, key=lambda item: (item[1], str(item[0]))))


def _rank_probabilities(size, pressure):
    """
    Linear ranking: rank 0 (best) gets ``pressure / size``, the worst ``(2 - pressure) / size``
    """
    ranks = np.arange(size, dtype=float)
    weights = pressure - (2.0 * pressure - 2.0) * ranks / (size - 1)
    return weights / weights.sum()


def ga_train(
    model,
    data,
    alpha=DEFAULT_ALPHA,
    cfg=None,
    times=None,
    na_fac=DEFAULT_NA_FAC,
    max_iter=None,
    include_time_zero=False,
):
    """
    Train a bitstring over ``model.reactions`` against ``data``
    """
    cfg = cfg or GaConfig()
    problem = ScoringProblem(model, data, times, na_fac, max_iter, include_time_zero)
    evaluator = Evaluator(problem, alpha, cfg.workers)
    length = len(model.reactions)

    if length == 0:
        best = BitString(())
        breakdown = problem.score(best, alpha=alpha, with_residuals=True)
        return TrainResult(
            best=best,
            best_score=breakdown,
            generations=((0, breakdown.total, breakdown.total),),
            evaluations=1,
            stopped_by="max_generations",
            tolerant_models=((best, breakdown.total),),
        )

    rng = np.random.default_rng(cfg.seed)
    size = cfg.population_size
    mutation = cfg.mutation_rate(length)
    probabilities = _rank_probabilities(size, cfg.selection_pressure)
    population = rng.integers(0, 2, size=(size, length), dtype=np.uint8)
    population[0] = 1

    best_bits, best_total = None, math.inf
    last_improvement = 0
    trace = []
    stopped_by = "max_generations"
    for generation in range(cfg.max_generations):
        totals = np.array(evaluator.evaluate_many(population))
        order = np.argsort(totals, kind="stable")
        if totals[order[0]] < best_total:
            best_total = float(totals[order[0]])
            best_bits = population[order[0]].copy()
            last_improvement = generation
        trace.append((generation, best_total, math.fsum(totals.tolist()) / size))
        log.debug(
            "Generation %d: best %.6g, mean %.6g", generation, best_total, trace[-1][2]
        )
        if best_total <= cfg.relative_tolerance:
            stopped_by = "tolerance"
            break
        if generation - last_improvement >= cfg.stall_generations:
            stopped_by = "stall"
            break
        if generation == cfg.max_generations - 1:
            break

        ranked = population[order]
        count = size - cfg.elitism_count
        parents = rng.choice(size, size=(count, 2), p=probabilities)
        crossover = rng.random((count, length)) < 0.5
        children = np.where(crossover, ranked[parents[:, 0]], ranked[parents[:, 1]])
        flips = rng.random((count, length)) < mutation
        children = (children ^ flips).astype(np.uint8)
        population = np.vstack([ranked[: cfg.elitism_count], children])

    best = BitString(tuple(best_bits))
    breakdown = problem.score(best, alpha=alpha, with_residuals=True)
    tolerant = evaluator.within(best_total + abs(best_total) * cfg.models_tolerance)
    log.info(
        "Training stopped by %s after %d generation(s): best %s, %d evaluation(s)",
        stopped_by,
        len(trace),
        breakdown.total,
        evaluator.evaluations,
    )
    return TrainResult(
        best=best,
        best_score=breakdown,
        generations=tuple(trace),
        evaluations=evaluator.evaluations,
        stopped_by=stopped_by,
        tolerant_models=tolerant,
    )


def exhaustive_search(
    model,
    data,
    alpha=DEFAULT_ALPHA,
    times=None,
    na_fac=DEFAULT_NA_FAC,
    max_iter=None,
    include_time_zero=False,
):
    """
    Score every bitstring and return ``(best, breakdown)``.

    Ties go to fewer kept reactions, then to the lexicographically smallest
    bitstring.
    """
    length = len(model.reactions)
    if length > EXHAUSTIVE_LIMIT:
        raise CommandExecutionError(
            f"Exhaustive search over {length} reactions exceeds the limit of {EXHAUSTIVE_LIMIT}"
        )
    problem = ScoringProblem(model, data, times, na_fac, max_iter, include_time_zero)
    best, best_total, best_count = None, math.inf, None
    for bits in itertools.product((0, 1), repeat=length):
        total = problem.score(bits, alpha=alpha).total
        count = sum(bits)
        if total < best_total or (total == best_total and count < best_count):
            best, best_total, best_count = bits, total, count
    best = BitString(best)
    return best, problem.score(best, alpha=alpha, with_residuals=True)


def evaluate(
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
    Score one bitstring with residuals
    """
    problem = ScoringProblem(model, data, times, na_fac, max_iter, include_time_zero)
    return problem.score(bits, alpha=alpha, with_residuals=True)
