"""Command-line entry point.

Subcommands: simulate | calibrate | benchmark | hyperopt | plot.
File-first configuration: --config points at a TOML file (or the
ORBITCAL_CONFIG environment variable), CLI flags override file values.
Exit codes: 0 success, 1 usage/config error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import __version__
from .clifford import ATOMIC_SU2
from .config import ConfigError, ToolkitConfig, load_config
from .harness import ALGORITHM_IDS, run_campaign, run_single
from .hyperopt import meta_optimize, write_meta_trace_csv
from .optimizers import ALGORITHMS, hyperparams_to_dict
from .orbit import OrbitLossEvaluator
from .plotting import curves_svg
from .pulses import (
    discretize_drag,
    envelope_derivative,
    gaussian_envelope,
    step_midpoints,
)
from .seeding import stream_int, stream_rng
from .system import propagate, rotating_frame, unitarity_defect


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="orbitcal", description=__doc__)
    parser.add_argument("--version", action="version", version=f"orbitcal {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML config file (default: $ORBITCAL_CONFIG)")
        p.add_argument("--seed", type=int, help="override the global seed")
        p.add_argument("--workers", type=int, help="worker processes (default: all cores)")
        p.add_argument("--out", help="output directory", default=None)

    p = sub.add_parser("simulate", help="sample the configured pulses and report gate fidelities")
    common(p)

    p = sub.add_parser("calibrate", help="one closed-loop run from a 5%%-detuned start")
    common(p)
    p.add_argument("--algorithm", default="cmaes", choices=sorted(ALGORITHMS))
    p.add_argument("--budget", type=int, default=None, help="function evaluations")
    p.add_argument("--run-seed", type=int, default=0, help="run index within the seed streams")

    p = sub.add_parser("benchmark", help="multi-seed campaign across the configured optimizers")
    common(p)
    p.add_argument("--budget", type=int, default=None)

    p = sub.add_parser("hyperopt", help="meta-optimize one algorithm's hyperparameters")
    common(p)
    p.add_argument("--algorithm", required=True, choices=sorted(ALGORITHMS))
    p.add_argument("--budget", type=int, default=None, help="meta-evaluation budget")

    p = sub.add_parser("plot", help="render result CSVs (aggregate, meta-trace, landscape) to SVG")
    p.add_argument("inputs", nargs="+", help="CSV files")
    p.add_argument("--out", default="plot.svg")
    return parser


def _config_from_args(args) -> ToolkitConfig:
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg = cfg.override("run", "global_seed", args.seed)
    if getattr(args, "workers", None) is not None:
        cfg = cfg.override("run", "workers", args.workers)
    if getattr(args, "out", None):
        cfg = cfg.override("campaign", "output_dir", args.out)
    if getattr(args, "budget", None) is not None:
        if args.budget < 1:
            raise _UsageError("--budget must be >= 1")
        if args.command == "hyperopt":
            cfg = cfg.override("hyperopt", "meta_budget", args.budget)
        else:
            cfg = cfg.override("campaign", "eval_budget", args.budget)
    return cfg


def _write_xy_csv(path, times, values):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "amplitude"])
        for t, v in zip(times, values):
            writer.writerow([repr(float(t)), repr(float(v))])


def cmd_simulate(cfg: ToolkitConfig, out_dir: str) -> int:
    os.makedirs(out_dir, exist_ok=True)
    system = cfg.system()
    base = cfg.base_drag()
    fine = np.linspace(0.0, base.gate_time, 2048)

    _write_xy_csv(
        os.path.join(out_dir, "drag_inphase.csv"),
        fine,
        base.amplitude * gaussian_envelope(fine, base),
    )
    _write_xy_csv(
        os.path.join(out_dir, "drag_quadrature.csv"),
        fine,
        base.drag_coeff * base.amplitude * envelope_derivative(fine, base),
    )
    pwc = discretize_drag(base, cfg.data["pulse"]["pwc_num_steps"])
    k = np.clip(
        (pwc.num_steps * fine / base.gate_time).astype(int), 0, pwc.num_steps - 1
    )
    _write_xy_csv(os.path.join(out_dir, "pwc_inphase.csv"), fine, pwc.inphase_steps[k])
    _write_xy_csv(
        os.path.join(out_dir, "pwc_quadrature.csv"), fine, pwc.quadrature_steps[k]
    )

    space = cfg.parameter_space("drag")
    evaluator = OrbitLossEvaluator(cfg.orbit(), space, system)
    gates = evaluator.atomic_unitaries(space.nominal)
    report = [f"orbitcal {__version__} simulate report",
              f"gate_time {base.gate_time!r}  steps {evaluator.num_steps}"]
    for tag, u in gates.items():
        rotated = rotating_frame(system, u, base.gate_time)
        fid = abs(np.trace(np.conjugate(ATOMIC_SU2[tag].T) @ rotated[:2, :2])) / 2.0
        report.append(
            f"{tag}: fidelity {fid:.9f}  unitarity defect {unitarity_defect(u):.2e}"
        )
    path = os.path.join(out_dir, "simulate_report.txt")
    with open(path, "w") as fh:
        fh.write("\n".join(report) + "\n")
    print("\n".join(report))
    print(f"wrote pulse CSVs and report to {out_dir}")
    return 0


def cmd_calibrate(cfg: ToolkitConfig, algorithm: str, run_seed: int, out_dir: str) -> int:
    os.makedirs(out_dir, exist_ok=True)
    problem = cfg.problem()
    budget = cfg.data["campaign"]["eval_budget"]
    record = run_single(
        algorithm,
        cfg.data["hyperparams"].get(algorithm),
        problem,
        seed=run_seed,
        budget=budget,
        global_seed=cfg.global_seed,
        detuning_fraction=cfg.data["campaign"]["detuning_fraction"],
    )
    # start loss on the same per-run sequence realization
    evaluate = problem.run_evaluator(stream_int(cfg.global_seed, "sequence", run_seed))
    start_loss = evaluate(record.start_x, stream_rng(cfg.global_seed, "shots", run_seed))

    run_path = os.path.join(out_dir, "run.csv")
    with open(run_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["eval_index", "raw_loss", "best_loss"])
        for i, (raw, best) in enumerate(zip(record.losses, record.best_curve)):
            writer.writerow([i + 1, repr(float(raw)), repr(float(best))])
    summary = [
        f"algorithm {algorithm}",
        f"problem {problem.name}",
        f"run_seed {run_seed}",
        f"start_loss {float(start_loss)!r}",
        f"final_best_loss {float(record.best_curve[-1])!r}",
        f"improvement {float(start_loss - record.best_curve[-1])!r}",
        f"evaluations {record.losses.size}",
        f"clamp_events {record.clamp_events}",
        f"termination {record.termination}",
    ]
    with open(os.path.join(out_dir, "summary.txt"), "w") as fh:
        fh.write("\n".join(summary) + "\n")
    print("\n".join(summary))
    return 0


def cmd_benchmark(cfg: ToolkitConfig) -> int:
    campaign = cfg.campaign()
    problem = cfg.problem()
    curves = run_campaign(
        campaign,
        problem,
        global_seed=cfg.global_seed,
        workers=cfg.workers,
        manifest_text=cfg.manifest(__version__),
    )
    for tag, curve in curves.items():
        print(
            f"{tag}: final median {curve.median[-1]!r}  final mean {curve.mean[-1]!r}"
            f"  completeness {curve.completeness:.2f}"
        )
    print(f"campaign artifacts in {campaign.output_dir}")
    return 0


def cmd_hyperopt(cfg: ToolkitConfig, algorithm: str, out_dir: str) -> int:
    os.makedirs(out_dir, exist_ok=True)
    result = meta_optimize(
        algorithm,
        cfg.rating(),
        cfg.problem(),
        meta_budget=cfg.meta_budget,
        seed=cfg.global_seed,
        workers=cfg.workers or 1,
    )
    trace_path = os.path.join(out_dir, "meta_trace.csv")
    write_meta_trace_csv(result, trace_path)
    best = hyperparams_to_dict(result.best_hyperparams)
    lines = [f"[hyperparams.{algorithm}]"]
    for key, value in best.items():
        if value is None:
            continue
        lines.append(f"{key} = {value!r}")
    with open(os.path.join(out_dir, "best_hyperparams.toml"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"best rating {result.best_rating!r} with {best}")
    print(f"meta trace in {trace_path}")
    return 0


def _plot_series_from_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    if header[:4] == ["optimizer", "eval_index", "mean", "median"]:
        by_tag = {}
        for tag, idx, _, median in rows:
            by_tag.setdefault(tag, []).append((int(idx), float(median)))
        out = {}
        for tag, pts in by_tag.items():
            arr = np.array(sorted(pts))
            out[tag] = (arr[:, 0], arr[:, 1])
        return out
    if header[0] == "meta_eval_index":
        idx = [int(r[0]) for r in rows]
        rating = [float(r[-1]) for r in rows]
        return {"rating": (np.array(idx), np.array(rating))}
    if len(header) == 3 and header[2] == "loss":
        series = {}
        for a, b, loss in rows:
            series.setdefault(b, []).append((float(a), float(loss)))
        return {
            f"{header[1]}={b}": tuple(np.array(sorted(pts)).T) for b, pts in series.items()
        }
    raise ValueError(f"unrecognized CSV schema in {path}: {header}")


def cmd_plot(inputs, out_path: str) -> int:
    series = {}
    for path in inputs:
        file_series = _plot_series_from_csv(path)
        prefix = "" if len(inputs) == 1 else os.path.basename(path) + ":"
        for label, xy in file_series.items():
            series[prefix + label] = xy
    curves_svg(series, out_path, title="", x_label="", y_label="")
    print(f"wrote {out_path}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command == "plot":
            return cmd_plot(args.inputs, args.out)
        cfg = _config_from_args(args)
        out_dir = args.out or cfg.data["campaign"]["output_dir"]
        if args.command == "simulate":
            return cmd_simulate(cfg, out_dir)
        if args.command == "calibrate":
            return cmd_calibrate(cfg, args.algorithm, args.run_seed, out_dir)
        if args.command == "benchmark":
            return cmd_benchmark(cfg)
        if args.command == "hyperopt":
            return cmd_hyperopt(cfg, args.algorithm, out_dir)
        raise _UsageError(f"unknown command {args.command!r}")
    except (_UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
