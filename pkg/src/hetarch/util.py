"""Shared utilities: stable seed derivation and binomial intervals."""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1


def mix64(*values: int) -> int:
    """Stable 64-bit seed mixer (splitmix64 chain over the inputs).

    Used for all derived RNG streams so that results are reproducible
    across runs, platforms, and worker counts.
    """
    state = 0x9E3779B97F4A7C15
    for v in values:
        state = (state + (v & _MASK64) + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        state = z ^ (z >> 31)
    return state


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054
                    ) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def per_cycle_rate(p_shot: float, rounds: int) -> float:
    """Convert a per-shot failure rate to per-cycle: 1-(1-p)^(1/rounds)."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    p_shot = min(max(p_shot, 0.0), 1.0)
    if p_shot >= 1.0:
        return 1.0
    return 1.0 - (1.0 - p_shot) ** (1.0 / rounds)
