"""Powell's conjugate-direction method (no tunable hyperparameters).

Cycles of derivative-free line minimizations along a maintained direction
set; after each cycle the direction of largest single-line decrease may
be replaced by the cycle's net displacement, per the classic acceptance
test.  The inner line search brackets downhill from the current point and
refines by golden section to 1e-8 relative, capped at 50 probes per line;
all internals are fixed constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import AskTellOptimizer

LINE_TOL = 1e-8
MAX_LINE_PROBES = 50
GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
INITIAL_STEP = 0.1


@dataclass(frozen=True)
class PowellParams:
    """Powell has no tunable hyperparameters."""


class PowellOptimizer(AskTellOptimizer):
    def __init__(self, dim, lower, upper, seed, x0=None, params: PowellParams | None = None):
        self.params = params or PowellParams()
        super().__init__(dim, lower, upper, seed, x0)

    def _feasible_interval(self, x, direction):
        """Largest [t_lo, t_hi] keeping x + t*direction inside the cube."""
        moving = direction != 0.0
        if not moving.any():
            return 0.0, 0.0
        with np.errstate(divide="ignore"):
            to_zero = (0.0 - x[moving]) / direction[moving]
            to_one = (1.0 - x[moving]) / direction[moving]
        t_lo = float(np.max(np.minimum(to_zero, to_one)))
        t_hi = float(np.min(np.maximum(to_zero, to_one)))
        return min(t_lo, 0.0), max(t_hi, 0.0)

    def _line_min(self, x, f_x, direction):
        """Minimize along x + t*direction; returns (point, loss) best probed."""
        t_lo, t_hi = self._feasible_interval(x, direction)
        if t_hi - t_lo <= 0.0:
            return x, f_x

        probes_left = MAX_LINE_PROBES
        best_t, best_f = 0.0, f_x

        def point(t):
            return np.clip(x + t * direction, 0.0, 1.0)

        def track(t, f):
            nonlocal best_t, best_f
            if f < best_f:
                best_t, best_f = t, f

        # bracket the minimum starting from t = 0
        step = min(INITIAL_STEP, t_hi) if t_hi > 0 else max(-INITIAL_STEP, t_lo)
        f_step = yield from self._eval(point(step))
        probes_left -= 1
        track(step, f_step)
        if f_step < f_x:
            a, b = 0.0, step
            f_b = f_step
            while probes_left > 0:
                c = b + 2.0 * (b - a)
                c = min(max(c, t_lo), t_hi)
                if c == b:
                    break
                f_c = yield from self._eval(point(c))
                probes_left -= 1
                track(c, f_c)
                if f_c >= f_b:
                    a, b = min(a, c), max(a, c)
                    break
                a, b, f_b = b, c, f_c
            else:
                a, b = min(a, b), max(a, b)
            lo, hi = min(a, b), max(a, b)
        else:
            # try the other side; if both rise, 0 is already bracketed
            other = max(-INITIAL_STEP, t_lo) if t_hi > 0 else min(INITIAL_STEP, t_hi)
            f_other = f_step
            if other != step and other != 0.0 and probes_left > 0:
                f_other = yield from self._eval(point(other))
                probes_left -= 1
                track(other, f_other)
            if f_other < f_x:
                lo, hi = min(0.0, 2.0 * other), max(0.0, 2.0 * other)
                lo, hi = max(lo, t_lo), min(hi, t_hi)
            else:
                lo, hi = min(step, other), max(step, other)

        # golden-section refinement on [lo, hi]
        m1 = hi - GOLDEN * (hi - lo)
        m2 = lo + GOLDEN * (hi - lo)
        f_m1 = yield from self._eval(point(m1))
        probes_left -= 1
        track(m1, f_m1)
        f_m2 = yield from self._eval(point(m2))
        probes_left -= 1
        track(m2, f_m2)
        while probes_left > 0 and (hi - lo) > LINE_TOL * max(1.0, abs(m1) + abs(m2)):
            if f_m1 <= f_m2:
                hi, m2, f_m2 = m2, m1, f_m1
                m1 = hi - GOLDEN * (hi - lo)
                f_m1 = yield from self._eval(point(m1))
                probes_left -= 1
                track(m1, f_m1)
            else:
                lo, m1, f_m1 = m1, m2, f_m2
                m2 = lo + GOLDEN * (hi - lo)
                f_m2 = yield from self._eval(point(m2))
                probes_left -= 1
                track(m2, f_m2)

        return point(best_t), best_f

    def _run(self):
        d = self.dimension
        x = self._u0.copy()
        f_x = yield from self._eval(x)
        self.directions = np.eye(d)
        self.replacement_log = []  # (cycle, replaced index, per-direction drops)
        cycle = 0

        while True:
            x_start, f_start = x.copy(), f_x
            drops = []
            for i in range(d):
                f_before = f_x
                x, f_x = yield from self._line_min(x, f_x, self.directions[i])
                drops.append(f_before - f_x)
            biggest_idx = int(np.argmax(drops))
            biggest_drop = drops[biggest_idx]
            self.record_diagnostics(cycle=cycle, cycle_decrease=f_start - f_x)

            extrapolated = self._clamp_unit(2.0 * x - x_start)
            f_extra = yield from self._eval(extrapolated)
            if f_extra < f_start and biggest_drop > 0.0:
                keep_score = (
                    2.0 * (f_start - 2.0 * f_x + f_extra)
                    * (f_start - f_x - biggest_drop) ** 2
                    - biggest_drop * (f_start - f_extra) ** 2
                )
                if keep_score < 0.0:
                    new_direction = x - x_start
                    norm = np.linalg.norm(new_direction)
                    if norm > 0.0:
                        self.directions[biggest_idx] = new_direction / norm
                        self.replacement_log.append((cycle, biggest_idx, tuple(drops)))
                        x, f_x = yield from self._line_min(
                            x, f_x, self.directions[biggest_idx]
                        )
            cycle += 1
