"""(1+1) evolution strategy with 1/5th-success-rule step adaptation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import AskTellOptimizer


@dataclass(frozen=True)
class OnePlusOneParams:
    initial_sigma: float = 0.1

    def __post_init__(self):
        if self.initial_sigma <= 0:
            raise ValueError("initial_sigma must be positive")


class OnePlusOneOptimizer(AskTellOptimizer):
    def __init__(self, dim, lower, upper, seed, x0=None, params: OnePlusOneParams | None = None):
        self.params = params or OnePlusOneParams()
        super().__init__(dim, lower, upper, seed, x0)

    def _run(self):
        # success expands sigma by exp(c), failure shrinks by exp(-c/4);
        # equilibrium sits at the classic 1/5 success rate
        c = 1.0 / np.sqrt(self.dimension + 1.0)
        parent = self._u0.copy()
        f_parent = yield from self._eval(parent)
        self.sigma = self.params.initial_sigma
        self.successes = 0

        while True:
            child = self._clamp_unit(
                parent + self.sigma * self._rng.standard_normal(self.dimension)
            )
            f_child = yield from self._eval(child)
            if f_child <= f_parent:
                parent, f_parent = child, f_child
                self.sigma *= np.exp(c)
                self.successes += 1
            else:
                self.sigma *= np.exp(-c / 4.0)
            self.parent = self._to_physical(parent)
            self.record_diagnostics(sigma=self.sigma)
