"""Hyperparameter rating and meta-optimization.

A hyperparameter setting is rated by running n seeded optimizations and
scoring each run by a weighted sum of (a) the slope of a straight-line
fit to the log losses over all evaluations — how fast the run converges —
and (b) the log of the mean of the last ``tail_length`` losses — how good
the final solution is.  Lower is better.  The rating works on
linear-scale losses: the calibration loss is already a log-infidelity, so
it is exponentiated back before averaging and refitted as-is; analytic
losses are used directly (floored at 1e-300 before any log).

Meta-optimization searches the per-algorithm hyperparameter box (log
scaling for scale-like parameters, integers rounded at evaluation) with
the package's own CMA-ES at fixed internal settings.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .harness import RunRecord, run_single
from .optimizers import hyperparams_to_dict, make_hyperparams, make_optimizer
from .optimizers.cmaes import CmaesParams
from .seeding import stream_seed

log = logging.getLogger(__name__)

LINEAR_FLOOR = 1e-300

META_POPULATION = 6
META_SIGMA = 0.3


@dataclass(frozen=True)
class RatingConfig:
    slope_weight: float = 100.0
    final_weight: float = 1.0
    tail_length: int = 50
    num_seeds: int = 20
    inner_budget: int = 500

    def __post_init__(self):
        if self.tail_length < 2:
            raise ValueError("tail_length must be >= 2")
        if self.num_seeds < 1:
            raise ValueError("num_seeds must be >= 1")
        if self.inner_budget <= self.tail_length:
            raise ValueError("inner_budget must exceed tail_length")


def _linear_losses(record: RunRecord, loss_scale: str) -> np.ndarray:
    if loss_scale == "log":
        return np.exp(record.losses)
    if loss_scale == "linear":
        return np.maximum(record.losses, LINEAR_FLOOR)
    raise ValueError(f"unknown loss scale {loss_scale!r}")


def tail_score(record: RunRecord, tail_length: int, loss_scale: str = "linear") -> float:
    """ln of the mean of the last ``tail_length`` linear-scale raw losses."""
    if record.losses.size < tail_length:
        raise ValueError("record has fewer evaluations than the tail length")
    tail = _linear_losses(record, loss_scale)[-tail_length:]
    return float(np.log(max(float(np.mean(tail)), LINEAR_FLOOR)))


def slope_score(record: RunRecord, loss_scale: str = "linear") -> float:
    """Least-squares slope of log losses against evaluation index."""
    if record.losses.size < 2:
        raise ValueError("slope needs at least 2 evaluations")
    y = np.log(np.maximum(_linear_losses(record, loss_scale), LINEAR_FLOOR))
    x = np.arange(y.size, dtype=float)
    return float(np.polyfit(x, y, 1)[0])


def _rating_run(args):
    algorithm, hyperparams, problem, seed, budget = args
    return run_single(algorithm, hyperparams, problem, seed=seed, budget=budget, global_seed=0)


def rating_terms(algorithm, hyperparams, rating_cfg, problem, base_seed, workers=1) -> tuple:
    """(sum of slopes, sum of tail scores) over the n seeded runs.

    The seeded runs are independent; with workers > 1 they execute in a
    process pool, reduced in seed order so the result is identical.
    """
    jobs = [
        (algorithm, hyperparams, problem, base_seed + i, rating_cfg.inner_budget)
        for i in range(rating_cfg.num_seeds)
    ]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_rating_run, jobs))
    else:
        records = [_rating_run(job) for job in jobs]
    sum_slope = sum(slope_score(r, problem.loss_scale) for r in records)
    sum_tail = sum(tail_score(r, rating_cfg.tail_length, problem.loss_scale) for r in records)
    return sum_slope, sum_tail


def rate_hyperparameters(
    algorithm, hyperparams, rating_cfg, problem, base_seed, workers=1
) -> float:
    """Lower is better; +inf sentinel when a run cannot even be constructed."""
    try:
        sum_slope, sum_tail = rating_terms(
            algorithm, hyperparams, rating_cfg, problem, base_seed, workers
        )
    except (ValueError, TypeError) as exc:
        log.warning("rating sentinel for %s %r: %s", algorithm, hyperparams, exc)
        return float("inf")
    return rating_cfg.slope_weight * sum_slope + rating_cfg.final_weight * sum_tail


@dataclass(frozen=True)
class HyperDimension:
    name: str
    lower: float
    upper: float
    log: bool = False
    integer: bool = False

    def decode(self, u: float):
        u = min(max(float(u), 0.0), 1.0)
        if self.log:
            value = np.exp(np.log(self.lower) + u * (np.log(self.upper) - np.log(self.lower)))
        else:
            value = self.lower + u * (self.upper - self.lower)
        if self.integer:
            return int(np.clip(round(value), self.lower, self.upper))
        return float(value)

    def encode(self, value) -> float:
        if self.log:
            u = (np.log(value) - np.log(self.lower)) / (np.log(self.upper) - np.log(self.lower))
        else:
            u = (value - self.lower) / (self.upper - self.lower)
        return float(np.clip(u, 0.0, 1.0))


HYPER_SPACES = {
    "cmaes": (
        HyperDimension("initial_sigma", 1e-4, 3.0, log=True),
        HyperDimension("population_size", 2, 64, log=True, integer=True),
    ),
    "nelder_mead": (HyperDimension("initial_sigma", 1e-4, 3.0, log=True),),
    "one_plus_one": (HyperDimension("initial_sigma", 1e-4, 3.0, log=True),),
    "differential_evolution": (
        HyperDimension("initial_sigma", 1e-4, 3.0, log=True),
        HyperDimension("population_size", 4, 64, log=True, integer=True),
        HyperDimension("crossover_rate", 0.0, 1.0),
        HyperDimension("differential_weight", 0.1, 1.9),
    ),
    "simulated_annealing": (
        HyperDimension("initial_temperature", 1e-4, 10.0, log=True),
        HyperDimension("decay_rate", 0.8, 0.9999),
        HyperDimension("initial_sigma", 1e-4, 3.0, log=True),
    ),
    "powell": (),
}


@dataclass(frozen=True)
class MetaTraceEntry:
    index: int
    hyperparams: dict
    rating: float


@dataclass(frozen=True)
class MetaOptimizeResult:
    algorithm: str
    best_hyperparams: object
    best_rating: float
    trace: tuple


def _decode_config(algorithm, dims, u):
    values = {d.name: d.decode(ui) for d, ui in zip(dims, u)}
    return make_hyperparams(algorithm, **values)


def meta_optimize(
    algorithm: str,
    rating_cfg: RatingConfig,
    problem,
    meta_budget: int,
    seed: int = 0,
    workers: int = 1,
) -> MetaOptimizeResult:
    """CMA-ES over the log-scaled hyperparameter box; returns the best-rated.

    The meta search starts from the package defaults and rates
    ``meta_budget`` configurations in total (final batch truncated).
    """
    dims = HYPER_SPACES.get(algorithm)
    if dims is None:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if not dims:
        raise ValueError(f"{algorithm} has no tunable hyperparameters")
    if meta_budget < 1:
        raise ValueError("meta_budget must be >= 1")

    defaults = hyperparams_to_dict(make_hyperparams(algorithm))
    u0 = np.array(
        [
            d.encode(defaults[d.name]) if defaults[d.name] is not None else 0.5
            for d in dims
        ]
    )
    meta = make_optimizer(
        "cmaes",
        len(dims),
        (np.zeros(len(dims)), np.ones(len(dims))),
        stream_seed(seed, "meta"),
        x0=u0,
        hyperparams=CmaesParams(population_size=META_POPULATION, initial_sigma=META_SIGMA),
    )

    trace = []
    rated = 0
    while rated < meta_budget:
        batch = meta.ask()
        take = min(len(batch), meta_budget - rated)
        ratings = []
        for u in batch[:take]:
            hp = _decode_config(algorithm, dims, u)
            rating = rate_hyperparameters(
                algorithm, hp, rating_cfg, problem, base_seed=0, workers=workers
            )
            trace.append(
                MetaTraceEntry(index=rated, hyperparams=hyperparams_to_dict(hp), rating=rating)
            )
            ratings.append(rating)
            rated += 1
        if take < len(batch):
            break
        meta.tell(batch, ratings)

    best = min(trace, key=lambda e: (e.rating, e.index))
    return MetaOptimizeResult(
        algorithm=algorithm,
        best_hyperparams=make_hyperparams(algorithm, **best.hyperparams),
        best_rating=best.rating,
        trace=tuple(trace),
    )


def write_meta_trace_csv(result: MetaOptimizeResult, path) -> None:
    """(meta_eval_index, hyperparam values..., rating) rows."""
    names = [d.name for d in HYPER_SPACES[result.algorithm]]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["meta_eval_index"] + names + ["rating"])
        for entry in result.trace:
            writer.writerow(
                [entry.index]
                + [repr(entry.hyperparams[n]) for n in names]
                + [repr(entry.rating)]
            )
