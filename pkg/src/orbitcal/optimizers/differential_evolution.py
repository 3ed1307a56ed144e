"""Differential evolution, DE/rand/1/bin with greedy replacement.

The whole trial population is asked as a single batch, which is the
natural batching unit for hardware that accepts waveform uploads in bulk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import AskTellOptimizer


@dataclass(frozen=True)
class DifferentialEvolutionParams:
    initial_sigma: float = 0.1
    population_size: int = 15
    crossover_rate: float = 0.9
    differential_weight: float = 0.8

    def __post_init__(self):
        if self.initial_sigma <= 0:
            raise ValueError("initial_sigma must be positive")
        if self.population_size < 4:
            raise ValueError("population_size must be >= 4")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must lie in [0, 1]")
        # F = 0 is degenerate but legal: the forced coordinate still mutates
        if not 0.0 <= self.differential_weight <= 2.0:
            raise ValueError("differential_weight must lie in [0, 2]")


class DifferentialEvolutionOptimizer(AskTellOptimizer):
    def __init__(self, dim, lower, upper, seed, x0=None, params: DifferentialEvolutionParams | None = None):
        self.params = params or DifferentialEvolutionParams()
        super().__init__(dim, lower, upper, seed, x0)

    def _run(self):
        p = self.params
        n, d = p.population_size, self.dimension

        population = np.empty((n, d))
        population[0] = self._u0
        for i in range(1, n):
            population[i] = self._clamp_unit(
                self._u0 + p.initial_sigma * self._rng.standard_normal(d)
            )
        losses = np.asarray((yield population), dtype=float)

        while True:
            trials = np.empty_like(population)
            for i in range(n):
                pool = np.delete(np.arange(n), i)
                r1, r2, r3 = self._rng.choice(pool, size=3, replace=False)
                mutant = population[r1] + p.differential_weight * (
                    population[r2] - population[r3]
                )
                cross = self._rng.random(d) < p.crossover_rate
                cross[self._rng.integers(d)] = True  # forced coordinate
                trials[i] = self._clamp_unit(np.where(cross, mutant, population[i]))
            trial_losses = np.asarray((yield trials), dtype=float)
            improved = trial_losses <= losses
            population[improved] = trials[improved]
            losses[improved] = trial_losses[improved]
            self.record_diagnostics(
                population_best=float(losses.min()),
                population_spread=float(population.std(axis=0).mean()),
            )
