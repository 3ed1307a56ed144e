"""Simulated annealing with Gaussian proposals.

Acceptance works directly on loss differences (for the calibration
problem the loss is already a log-infidelity, so temperatures inherit
that scale).  Two cooling schedules: exponential T_k = T0 * gamma^k and
logarithmic T_k = T0 / ln(k + 2), advanced once per proposal.  The
proposal width cools as the square root of the relative temperature
(the equilibrium exploration radius scales diffusively with T), starting
from ``initial_sigma`` — a frozen width cannot refine past its own
scale, so the step size must anneal for the final solution to sharpen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import AskTellOptimizer

SCHEDULES = ("exponential", "logarithmic")


@dataclass(frozen=True)
class AnnealingParams:
    schedule: str = "exponential"
    initial_temperature: float = 1.0
    decay_rate: float = 0.99
    initial_sigma: float = 0.1

    def __post_init__(self):
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}")
        if self.initial_temperature <= 0:
            raise ValueError("initial_temperature must be positive")
        if not 0.0 < self.decay_rate < 1.0:
            raise ValueError("decay_rate must lie in (0, 1)")
        if self.initial_sigma <= 0:
            raise ValueError("initial_sigma must be positive")


def acceptance_probability(delta: float, temperature: float) -> float:
    """exp(-delta/T) capped at 1; non-positive delta is always accepted."""
    if delta <= 0.0:
        return 1.0
    exponent = -delta / temperature
    if exponent < -745.0:  # exp underflow
        return 0.0
    return math.exp(exponent)


class SimulatedAnnealingOptimizer(AskTellOptimizer):
    def __init__(self, dim, lower, upper, seed, x0=None, params: AnnealingParams | None = None):
        self.params = params or AnnealingParams()
        super().__init__(dim, lower, upper, seed, x0)

    def temperature(self, k: int) -> float:
        p = self.params
        if p.schedule == "exponential":
            return p.initial_temperature * p.decay_rate**k
        return p.initial_temperature / math.log(k + 2)

    def step_width(self, k: int) -> float:
        """Proposal sigma at iteration k: sqrt of the relative temperature."""
        p = self.params
        if p.schedule == "exponential":
            return p.initial_sigma * p.decay_rate ** (k / 2.0)
        return p.initial_sigma * math.sqrt(math.log(2.0) / math.log(k + 2))

    def _run(self):
        current = self._u0.copy()
        f_current = yield from self._eval(current)
        self.accepted_moves = 0

        k = 0
        while True:
            proposal = self._clamp_unit(
                current + self.step_width(k) * self._rng.standard_normal(self.dimension)
            )
            f_proposal = yield from self._eval(proposal)
            delta = f_proposal - f_current
            if delta <= 0.0 or self._rng.random() < acceptance_probability(
                delta, self.temperature(k)
            ):
                current, f_current = proposal, f_proposal
                self.accepted_moves += 1
            self.current_loss = f_current
            self.record_diagnostics(
                temperature=self.temperature(k), sigma=self.step_width(k)
            )
            k += 1
