"""Simulated-annealing power schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

COOLING_BASE = 20
BUDGET_BASE = 64
BUDGET_EXPONENT = 10


def temperature(elapsed: float, t_exploit: float) -> float:
    """``20 ** (-elapsed / t_exploit)``: 1 at the start, decaying to 0."""
    return COOLING_BASE ** (-elapsed / t_exploit)


@dataclass
class SchedulerState:
    campaign_elapsed: float
    t_exploit: float
    min_d: object = math.inf
    max_d: object = math.inf

    @property
    def temperature(self):
        return temperature(self.campaign_elapsed, self.t_exploit)

    def observe(self, d):
        """Widen the corpus distance bounds to include ``d``."""
        if d == math.inf:
            return
        if self.min_d == math.inf or d < self.min_d:
            self.min_d = d
        if self.max_d == math.inf or d > self.max_d:
            self.max_d = d


def normalized_distance(d, min_d, max_d) -> Fraction:
    if d == math.inf or min_d == math.inf:
        return Fraction(1)
    if max_d == min_d:
        return Fraction(0)
    return (Fraction(d) - Fraction(min_d)) / (Fraction(max_d) - Fraction(min_d))


def annealing_energy(entry, state: SchedulerState) -> Fraction:
    """``A = (1 - D)(1 - T) + T/2`` in exact arithmetic, with D the
    entry's normalized seed distance and T the current temperature."""
    t = Fraction(state.temperature)
    dn = normalized_distance(entry.seed_distance, state.min_d, state.max_d)
    return (1 - dn) * (1 - t) + t / 2


def mutation_budget(energy, base: int = BUDGET_BASE) -> int:
    raw = base * 2.0 ** (BUDGET_EXPONENT * (float(energy) - 0.5))
    return max(1, min(16 * base, math.floor(raw + 0.5)))
