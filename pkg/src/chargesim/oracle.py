"""Closed-form harmonic results and the universal power constant.

The harmonic family admits an exact solution: the battery energy follows
``N * omega0 * sin^2(g * sqrt(N) * t)`` for any charger state of energy
``N * omega0``.  Consequently the maximum average power is governed by the
single dimensionless maximum ``Y = max_x sin^2(x)/x``, computed here at
import time by bracketed maximization so no hand-copied constant can drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .metrics import ChargingMetrics
from .models import NoCouplingError
from .search import golden_section_maximize

__all__ = ["PowerConstant", "power_constant", "harmonic_energy", "harmonic_metrics"]


@dataclass(frozen=True)
class PowerConstant:
    """Argmax and maximum of sin^2(x)/x on (0, pi)."""

    x_star: float
    y_max: float

    def __post_init__(self) -> None:
        if not math.isclose(self.y_max, math.sin(self.x_star) ** 2 / self.x_star,
                            rel_tol=1e-12):
            raise ValueError("y_max must equal sin^2(x_star)/x_star")


@lru_cache(maxsize=1)
def power_constant() -> PowerConstant:
    """Compute (x_star, Y) to 1e-12.

    Golden-section bracketing locates the maximum; because comparison-based
    search cannot resolve a smooth maximum beyond sqrt(machine eps), the
    stationarity condition ``x*sin(2x) = sin^2(x)`` is then polished by
    Newton steps to pin x_star itself at full precision.
    """
    x, _ = golden_section_maximize(
        lambda x: math.sin(x) ** 2 / x, 1e-9, math.pi, rel_tol=1e-10
    )
    for _ in range(60):
        f = x * math.sin(2 * x) - math.sin(x) ** 2
        df = math.sin(2 * x) + 2 * x * math.cos(2 * x) - math.sin(2 * x)
        step = f / df
        x -= step
        if abs(step) < 1e-15 * x:
            break
    return PowerConstant(x_star=x, y_max=math.sin(x) ** 2 / x)


def harmonic_energy(n_units: int, g: float, omega0: float, tau: float) -> float:
    """Exact battery energy of the harmonic family at time tau."""
    if n_units < 1:
        raise ValueError("n_units must be at least 1")
    if g < 0:
        raise ValueError("g must be non-negative")
    return n_units * omega0 * math.sin(g * math.sqrt(n_units) * tau) ** 2


def harmonic_metrics(n_units: int, g: float, omega0: float = 1.0) -> ChargingMetrics:
    """Exact charging figures of merit for the harmonic family.

    Maximum average power ``N * sqrt(N) * g * omega0 * Y`` at optimal time
    ``x_star / (g * sqrt(N))``, which makes the collective advantage exactly
    ``sqrt(N)`` on both the quantum and classical sides.
    """
    if g <= 0:
        raise NoCouplingError("no coupling; charging time undefined")
    pc = power_constant()
    tau_bar = pc.x_star / (g * math.sqrt(n_units))
    e_bar = n_units * omega0 * math.sin(pc.x_star) ** 2
    return ChargingMetrics(p_bar=e_bar / tau_bar, tau_bar=tau_bar, e_bar=e_bar)
