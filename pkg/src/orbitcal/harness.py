"""Multi-seed benchmark campaigns: detuned starts, runs, aggregation, export.

A campaign runs every configured optimizer from ``num_seeds`` independently
detuned starting points, aligns the best-so-far curves on the common
evaluation-index grid 1..eval_budget, and persists per-seed and aggregate
CSVs plus SVG mean/median plots.  Every number is reproducible from the
campaign manifest: all randomness is derived from (global_seed, named
stream, algorithm id, run index).
"""

from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .optimizers import ALGORITHMS, hyperparams_to_dict, make_hyperparams, make_optimizer
from .seeding import stream_int, stream_rng, stream_seed

ALGORITHM_IDS = {name: i for i, name in enumerate(ALGORITHMS)}


@dataclass(frozen=True)
class CampaignConfig:
    problem: str
    optimizers: tuple  # ((algorithm tag, hyperparam dict or None), ...)
    num_seeds: int = 20
    eval_budget: int = 1000
    detuning_fraction: float = 0.05
    output_dir: str = "campaign_out"

    def __post_init__(self):
        if self.num_seeds < 1:
            raise ValueError("num_seeds must be >= 1")
        if self.eval_budget < 1:
            raise ValueError("eval_budget must be >= 1")
        if not 0.0 <= self.detuning_fraction < 1.0:
            raise ValueError("detuning_fraction must lie in [0, 1)")
        if not self.optimizers:
            raise ValueError("at least one optimizer required")
        for tag, _ in self.optimizers:
            if tag not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {tag!r}")


@dataclass(frozen=True)
class RunRecord:
    algorithm: str
    seed: int  # run index within the campaign
    hyperparams: dict
    losses: np.ndarray
    best_curve: np.ndarray
    best_x: np.ndarray
    start_x: np.ndarray
    termination: str
    clamp_events: int
    wall_time: float


@dataclass(frozen=True)
class AggregateCurve:
    eval_index: np.ndarray
    mean: np.ndarray
    median: np.ndarray
    per_seed: np.ndarray = field(repr=False)  # (num completed seeds, budget)
    completeness: float = 1.0


def detuned_start(nominal, fraction, rng, lower, upper) -> np.ndarray:
    """Each parameter offset by the fraction with an independent random sign.

    Nonzero parameters move multiplicatively, nominal*(1 +- fraction);
    exactly-zero parameters move additively by fraction * bound width.
    The result is clamped into the box (a no-op for the shipped spaces).
    """
    nominal = np.asarray(nominal, dtype=float)
    if not 0.0 <= fraction < 1.0:
        raise ValueError("fraction must lie in [0, 1)")
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    signs = rng.integers(0, 2, size=nominal.size) * 2 - 1
    width = np.asarray(upper, dtype=float) - np.asarray(lower, dtype=float)
    offset = np.where(
        nominal != 0.0, nominal * fraction * signs, width * fraction * signs
    )
    return np.clip(nominal + offset, lower, upper)


def run_single(
    algorithm: str,
    hyperparams,
    problem,
    seed: int,
    budget: int,
    global_seed: int = 0,
    detuning_fraction: float = 0.05,
) -> RunRecord:
    """One seeded closed-loop run from a detuned start, budget exact."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if hyperparams is None:
        hyperparams = make_hyperparams(algorithm)
    elif isinstance(hyperparams, dict):
        hyperparams = make_hyperparams(algorithm, **hyperparams)
    start_time = time.perf_counter()

    # the problem realization (start point, sequence draw, measurement
    # noise) is keyed by the run index alone, so every algorithm faces the
    # same set of problem instances: a paired comparison across optimizers
    detune_rng = stream_rng(global_seed, "detuning", seed)
    start = detuned_start(
        problem.nominal, detuning_fraction, detune_rng, problem.lower, problem.upper
    )
    evaluate = problem.run_evaluator(stream_int(global_seed, "sequence", seed))
    noise_rng = stream_rng(global_seed, "shots", seed)
    optimizer = make_optimizer(
        algorithm,
        problem.dimension,
        (problem.lower, problem.upper),
        stream_seed(global_seed, "optimizer", ALGORITHM_IDS[algorithm], seed),
        x0=start,
        hyperparams=hyperparams,
    )

    losses = []
    best_loss, best_x = np.inf, start
    termination = "budget exhausted"
    while len(losses) < budget:
        batch = optimizer.ask()
        take = min(len(batch), budget - len(losses))
        batch_losses = [float(evaluate(x, noise_rng)) for x in batch[:take]]
        for x, f in zip(batch[:take], batch_losses):
            if f < best_loss:
                best_loss, best_x = f, np.array(x)
        losses.extend(batch_losses)
        if take < len(batch):
            termination = "budget exhausted (final batch truncated)"
            break
        optimizer.tell(batch, batch_losses)

    losses = np.asarray(losses)
    return RunRecord(
        algorithm=algorithm,
        seed=seed,
        hyperparams=hyperparams_to_dict(hyperparams),
        losses=losses,
        best_curve=np.minimum.accumulate(losses),
        best_x=best_x,
        start_x=start,
        termination=termination,
        clamp_events=optimizer.clamp_events,
        wall_time=time.perf_counter() - start_time,
    )


def aggregate_stats(records) -> AggregateCurve:
    """Pointwise mean and median of best-so-far curves on the common grid."""
    records = list(records)
    if not records:
        raise ValueError("no records to aggregate")
    budget = records[0].best_curve.size
    if any(r.best_curve.size != budget for r in records):
        raise ValueError("records disagree on the evaluation budget")
    per_seed = np.stack([r.best_curve for r in records])
    return AggregateCurve(
        eval_index=np.arange(1, budget + 1),
        mean=per_seed.mean(axis=0),
        median=np.median(per_seed, axis=0),
        per_seed=per_seed,
    )


def _run_job(args):
    tag, hp_dict, problem, seed, budget, global_seed, fraction = args
    return tag, seed, run_single(
        tag, hp_dict, problem, seed, budget, global_seed, fraction
    )


def run_campaign(
    cfg: CampaignConfig,
    problem,
    global_seed: int = 0,
    workers: int | None = None,
    manifest_text: str | None = None,
) -> dict:
    """All (optimizer, seed) runs; returns tag -> AggregateCurve and exports.

    Per-seed failures are recorded in failures.csv and excluded from the
    aggregate, which then carries completeness < 1.
    """
    jobs = [
        (tag, hp, problem, seed, cfg.eval_budget, global_seed, cfg.detuning_fraction)
        for tag, hp in cfg.optimizers
        for seed in range(cfg.num_seeds)
    ]
    workers = workers if workers is not None else (os.cpu_count() or 1)
    results, failures = [], []
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [(job, pool.submit(_run_job, job)) for job in jobs]
            for job, fut in futures:
                try:
                    results.append(fut.result())
                except Exception as exc:  # noqa: BLE001 - per-seed isolation
                    failures.append((job[0], job[3], repr(exc)))
    else:
        for job in jobs:
            try:
                results.append(_run_job(job))
            except Exception as exc:  # noqa: BLE001 - per-seed isolation
                failures.append((job[0], job[3], repr(exc)))

    results.sort(key=lambda item: (ALGORITHM_IDS[item[0]], item[1]))
    records = {}
    for tag, _, record in results:
        records.setdefault(tag, []).append(record)

    curves = {}
    for tag, _ in cfg.optimizers:
        recs = records.get(tag, [])
        if not recs:
            continue
        curve = aggregate_stats(recs)
        completeness = len(recs) / cfg.num_seeds
        curves[tag] = AggregateCurve(
            eval_index=curve.eval_index,
            mean=curve.mean,
            median=curve.median,
            per_seed=curve.per_seed,
            completeness=completeness,
        )

    export_results(curves, records, cfg.output_dir, manifest_text=manifest_text)
    if failures:
        path = os.path.join(cfg.output_dir, "failures.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["optimizer", "seed", "error"])
            writer.writerows(failures)
    return curves


def export_results(curves: dict, records: dict, out_dir, manifest_text=None) -> dict:
    """Write per-seed CSV, aggregate CSV, optional manifest, and SVG plots."""
    from .plotting import curves_svg  # local import: plotting is presentation-only

    os.makedirs(out_dir, exist_ok=True)
    paths = {}

    paths["runs"] = os.path.join(out_dir, "runs.csv")
    with open(paths["runs"], "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["optimizer", "seed", "eval_index", "raw_loss", "best_loss"])
        for tag in records:
            for rec in records[tag]:
                for i, (raw, best) in enumerate(zip(rec.losses, rec.best_curve)):
                    writer.writerow([tag, rec.seed, i + 1, repr(float(raw)), repr(float(best))])

    paths["aggregate"] = os.path.join(out_dir, "aggregate.csv")
    with open(paths["aggregate"], "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["optimizer", "eval_index", "mean", "median"])
        for tag, curve in curves.items():
            for i, (m, med) in enumerate(zip(curve.mean, curve.median)):
                writer.writerow([tag, i + 1, repr(float(m)), repr(float(med))])

    if manifest_text is not None:
        paths["manifest"] = os.path.join(out_dir, "manifest.toml")
        with open(paths["manifest"], "w") as fh:
            fh.write(manifest_text)

    for stat in ("mean", "median"):
        paths[stat] = os.path.join(out_dir, f"{stat}.svg")
        series = {
            tag: (curve.eval_index, getattr(curve, stat)) for tag, curve in curves.items()
        }
        curves_svg(
            series,
            paths[stat],
            title=f"{stat} best-so-far loss",
            x_label="function evaluations",
            y_label="loss",
        )
    return paths


def read_aggregate_csv(path) -> dict:
    """Inverse of the aggregate export: tag -> (eval_index, mean, median)."""
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            rows.setdefault(row["optimizer"], []).append(
                (int(row["eval_index"]), float(row["mean"]), float(row["median"]))
            )
    out = {}
    for tag, entries in rows.items():
        entries.sort()
        idx, mean, median = zip(*entries)
        out[tag] = (np.array(idx), np.array(mean), np.array(median))
    return out
