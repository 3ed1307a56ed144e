"""Benchmark problems: the simulated calibration losses and analytic stand-ins.

A Problem carries the search box, the nominal (calibrated) point, the
loss scale tag ('log' for the ORBIT log-infidelity, 'linear' for analytic
functions), and builds a per-run evaluation function.  ORBIT problems
draw their fixed sequence set from the per-run sequence seed, so distinct
runs see distinct (but reproducible) sequence realizations.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .analytic import AnalyticFunction, by_name, evaluate_with_noise
from .orbit import OrbitConfig, OrbitLossEvaluator
from .pulses import ParameterSpace
from .system import SystemConfig


@dataclass(frozen=True)
class OrbitProblem:
    name: str
    space: ParameterSpace
    system: SystemConfig
    orbit: OrbitConfig
    loss_scale: str = "log"

    @property
    def dimension(self) -> int:
        return self.space.dimension

    @property
    def lower(self) -> np.ndarray:
        return self.space.lower

    @property
    def upper(self) -> np.ndarray:
        return self.space.upper

    @property
    def nominal(self) -> np.ndarray:
        return self.space.nominal

    def run_evaluator(self, sequence_seed: int):
        cfg = replace(self.orbit, sequence_seed=int(sequence_seed))
        evaluator = OrbitLossEvaluator(cfg, self.space, self.system)

        def evaluate(x, rng):
            return evaluator.evaluate(x, rng).loss

        return evaluate


@dataclass(frozen=True)
class AnalyticProblem:
    function: AnalyticFunction
    loss_scale: str = "linear"
    nominal: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.nominal is None:
            # generic off-center interior start
            object.__setattr__(
                self,
                "nominal",
                self.function.lower + 0.6 * (self.function.upper - self.function.lower),
            )

    @property
    def name(self) -> str:
        return f"analytic:{self.function.name}:{self.function.dimension}"

    @property
    def dimension(self) -> int:
        return self.function.dimension

    @property
    def lower(self) -> np.ndarray:
        return self.function.lower

    @property
    def upper(self) -> np.ndarray:
        return self.function.upper

    def run_evaluator(self, sequence_seed: int):
        fn = self.function

        def evaluate(x, rng):
            return evaluate_with_noise(fn.evaluate, x, fn.noise_sigma, rng)

        return evaluate


def analytic_problem(spec: str) -> AnalyticProblem:
    """Parse 'analytic:<name>[:<dim>]' into a problem (default dim 2)."""
    parts = spec.split(":")
    if parts[0] != "analytic" or len(parts) not in (2, 3):
        raise ValueError(f"bad analytic problem spec {spec!r}")
    dim = int(parts[2]) if len(parts) == 3 else 2
    return AnalyticProblem(function=by_name(parts[1], dim))
