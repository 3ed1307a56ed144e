"""Covariance matrix adaptation evolution strategy ((mu/mu_w, lambda)).

Full CMA-ES: weighted recombination of the top mu = floor(lambda/2)
samples, cumulative step-size adaptation, and the combined rank-1 plus
rank-mu covariance update.  Losses enter only through their ranking, so
any strictly monotone transform of the told losses leaves the ask
sequence bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import AskTellOptimizer


def default_population_size(dim: int) -> int:
    return 4 + int(3 * np.log(dim))


@dataclass(frozen=True)
class CmaesParams:
    population_size: int | None = None  # None: 4 + floor(3 ln dim)
    initial_sigma: float = 0.3

    def __post_init__(self):
        if self.population_size is not None and self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.initial_sigma <= 0:
            raise ValueError("initial_sigma must be positive")


class CmaesOptimizer(AskTellOptimizer):
    def __init__(self, dim, lower, upper, seed, x0=None, params: CmaesParams | None = None):
        self.params = params or CmaesParams()
        self.lam = self.params.population_size or default_population_size(dim)
        super().__init__(dim, lower, upper, seed, x0)

    def _run(self):
        d = self.dimension
        lam = self.lam
        mu = lam // 2
        weights = np.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
        weights /= weights.sum()
        mu_eff = 1.0 / np.sum(weights**2)

        c_sigma = (mu_eff + 2.0) / (d + mu_eff + 5.0)
        d_sigma = 1.0 + 2.0 * max(0.0, np.sqrt((mu_eff - 1.0) / (d + 1.0)) - 1.0) + c_sigma
        c_c = (4.0 + mu_eff / d) / (d + 4.0 + 2.0 * mu_eff / d)
        c_1 = 2.0 / ((d + 1.3) ** 2 + mu_eff)
        c_mu = min(
            1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((d + 2.0) ** 2 + mu_eff)
        )
        chi_n = np.sqrt(d) * (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d**2))

        mean = self._u0.copy()
        sigma = self.params.initial_sigma
        cov = np.eye(d)
        p_sigma = np.zeros(d)
        p_c = np.zeros(d)
        generation = 0

        while True:
            evals, basis = np.linalg.eigh(cov)
            if evals[0] < 1e-14:
                evals = np.maximum(evals, 1e-14)
                cov = (basis * evals) @ basis.T
                self._flag(f"covariance repaired at generation {generation}")
            scale = np.sqrt(evals)
            self.sigma = sigma
            self.record_diagnostics(
                sigma=sigma, cov_condition=float(evals[-1] / evals[0])
            )

            z = self._rng.standard_normal((lam, d))
            candidates = mean + sigma * (z * scale) @ basis.T
            candidates = np.stack([self._clamp_unit(u) for u in candidates])

            losses = yield candidates

            order = np.argsort(losses, kind="stable")[:mu]
            selected = candidates[order]
            steps = (selected - mean) / sigma
            step_w = weights @ steps
            mean = mean + sigma * step_w

            inv_sqrt_step = basis @ ((basis.T @ step_w) / scale)
            p_sigma = (1.0 - c_sigma) * p_sigma + np.sqrt(
                c_sigma * (2.0 - c_sigma) * mu_eff
            ) * inv_sqrt_step
            generation += 1
            norm_correction = np.sqrt(1.0 - (1.0 - c_sigma) ** (2 * generation))
            h_sigma = float(
                np.linalg.norm(p_sigma) / norm_correction / chi_n < 1.4 + 2.0 / (d + 1.0)
            )
            p_c = (1.0 - c_c) * p_c + h_sigma * np.sqrt(
                c_c * (2.0 - c_c) * mu_eff
            ) * step_w

            rank_mu = (steps * weights[:, None]).T @ steps
            cov = (
                (1.0 - c_1 - c_mu) * cov
                + c_1 * (np.outer(p_c, p_c) + (1.0 - h_sigma) * c_c * (2.0 - c_c) * cov)
                + c_mu * rank_mu
            )
            cov = 0.5 * (cov + cov.T)

            sigma = sigma * np.exp(
                (c_sigma / d_sigma) * (np.linalg.norm(p_sigma) / chi_n - 1.0)
            )
