"""Nelder-Mead simplex with dimension-adaptive coefficients.

Reflection/expansion/contraction/shrink with the adaptive coefficients of
Gao & Han (expansion 1 + 2/d, contraction 0.75 - 1/(2d), shrink 1 - 1/d),
which keep the method usable in high dimension.  Ties are broken by
vertex age (older ranks better) and an all-equal simplex triggers an
immediate shrink, so the method cannot stall on a plateau without
contracting.  A numerically degenerate simplex (volume below 1e-300) is
reinitialized around the best vertex and flagged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import AskTellOptimizer


@dataclass(frozen=True)
class NelderMeadParams:
    initial_sigma: float = 0.1  # initial simplex edge, normalized units

    def __post_init__(self):
        if self.initial_sigma <= 0:
            raise ValueError("initial_sigma must be positive")


def _log_simplex_volume(vertices: np.ndarray) -> float:
    """ln(volume) of the simplex, -inf when rank-deficient."""
    edges = vertices[1:] - vertices[0]
    sv = np.linalg.svd(edges, compute_uv=False)
    if np.any(sv <= 0.0):
        return -np.inf
    d = edges.shape[0]
    return float(np.sum(np.log(sv)) - np.sum(np.log(np.arange(1, d + 1))))


class NelderMeadOptimizer(AskTellOptimizer):
    def __init__(self, dim, lower, upper, seed, x0=None, params: NelderMeadParams | None = None):
        self.params = params or NelderMeadParams()
        super().__init__(dim, lower, upper, seed, x0)

    def _initial_vertices(self, center, sigma):
        vertices = [center.copy()]
        for i in range(self.dimension):
            v = center.copy()
            # step away from the nearer bound so the vertex stays distinct
            v[i] += sigma if v[i] + sigma <= 1.0 else -sigma
            vertices.append(self._clamp_unit(v))
        return np.stack(vertices)

    def _run(self):
        d = self.dimension
        alpha = 1.0
        beta = 1.0 + 2.0 / d  # expansion
        gamma = 0.75 - 1.0 / (2.0 * d)  # contraction
        delta = 1.0 - 1.0 / d if d > 1 else 0.5  # shrink
        self.operations = []

        vertices = self._initial_vertices(self._u0, self.params.initial_sigma)
        losses = yield vertices
        losses = list(losses)
        births = list(range(d + 1))
        next_birth = d + 1

        while True:
            order = sorted(range(d + 1), key=lambda i: (losses[i], births[i]))
            vertices = vertices[order]
            losses = [losses[i] for i in order]
            births = [births[i] for i in order]

            log_volume = _log_simplex_volume(vertices)
            self.record_diagnostics(log_simplex_volume=log_volume)
            if log_volume < np.log(1e-300):
                self._flag("degenerate simplex reinitialized")
                self.operations.append("reinitialize")
                vertices = self._initial_vertices(vertices[0], self.params.initial_sigma)
                new_losses = yield vertices[1:]
                losses = [losses[0]] + list(new_losses)
                births = [births[0]] + list(range(next_birth, next_birth + d))
                next_birth += d
                continue

            if losses[0] == losses[-1]:
                # identical losses on all vertices: contract toward the best
                self.operations.append("shrink")
                vertices = vertices[0] + delta * (vertices - vertices[0])
                vertices = np.stack([self._clamp_unit(v) for v in vertices])
                new_losses = yield vertices[1:]
                losses = [losses[0]] + list(new_losses)
                births = [births[0]] + list(range(next_birth, next_birth + d))
                next_birth += d
                continue

            centroid = vertices[:-1].mean(axis=0)
            worst = vertices[-1]
            reflected = self._clamp_unit(centroid + alpha * (centroid - worst))
            f_reflected = yield from self._eval(reflected)

            if f_reflected < losses[0]:
                expanded = self._clamp_unit(centroid + beta * (reflected - centroid))
                f_expanded = yield from self._eval(expanded)
                if f_expanded < f_reflected:
                    self.operations.append("expand")
                    replacement, f_replacement = expanded, f_expanded
                else:
                    self.operations.append("reflect")
                    replacement, f_replacement = reflected, f_reflected
            elif f_reflected < losses[-2]:
                self.operations.append("reflect")
                replacement, f_replacement = reflected, f_reflected
            else:
                if f_reflected < losses[-1]:
                    contracted = self._clamp_unit(centroid + gamma * (reflected - centroid))
                    f_contracted = yield from self._eval(contracted)
                    accept = f_contracted <= f_reflected
                else:
                    contracted = self._clamp_unit(centroid - gamma * (centroid - worst))
                    f_contracted = yield from self._eval(contracted)
                    accept = f_contracted < losses[-1]
                if accept:
                    self.operations.append("contract")
                    replacement, f_replacement = contracted, f_contracted
                else:
                    # shrink toward the best vertex
                    self.operations.append("shrink")
                    vertices = vertices[0] + delta * (vertices - vertices[0])
                    vertices = np.stack([self._clamp_unit(v) for v in vertices])
                    new_losses = yield vertices[1:]
                    losses = [losses[0]] + list(new_losses)
                    births = [births[0]] + list(range(next_birth, next_birth + d))
                    next_birth += d
                    continue

            vertices[-1] = replacement
            losses[-1] = f_replacement
            births[-1] = next_birth
            next_birth += 1
