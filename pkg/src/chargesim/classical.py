"""Classical engine: Hamilton's equations for the three model families.

The spin degrees of freedom are integrated directly in the canonical pair
(cos(theta), phi) in which the classical Hamiltonians are written; the polar
tilt ``epsilon`` of the initial conditions keeps cot(theta) finite.  The
harmonic family is integrated in the collective battery quadratures, which is
exact for the chosen initial condition (battery at the origin).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .models import (
    EngineRun,
    ModelKind,
    ModelSpec,
    PhasePoint,
    Side,
    Trajectory,
    TrajectoryDiagnostics,
    initial_state_classical,
    natural_timescale,
)
from .quantum import ENERGY_DRIFT_LIMIT, ConservationError

__all__ = [
    "SingularityError",
    "ClassicalPath",
    "hamilton_rhs",
    "classical_energies",
    "integrate",
    "classical_run",
    "classical_energy_trajectory",
]

_SIN_FLOOR = 1e-12


class SingularityError(RuntimeError):
    """A spin coordinate approached a pole where cot(theta) diverges."""


def _sin_from_cos(c: float, label: str) -> float:
    """sin(theta) from cos(theta), guarding the coordinate poles.

    Exactly |cos| = 1 is a dynamical fixed point (every coupling term carries
    a sin(theta) factor), so it is allowed and returns 0; approaching the
    pole without reaching it is a genuine singularity of the chart.
    """
    if abs(c) > 1.0 + 1e-9:
        raise SingularityError(f"|{label}| exceeded 1 beyond tolerance: {c!r}")
    c = min(1.0, max(-1.0, c))
    s = math.sqrt(1.0 - c * c)
    if s == 0.0:
        return 0.0
    if s < _SIN_FLOOR:
        raise SingularityError(f"sin(theta) below {_SIN_FLOOR:g} for coordinate {label}")
    return s


def _rhs_harmonic(omega0: float, g_n: float, y: np.ndarray) -> list[float]:
    p_a, q_a, p_b, q_b = y
    return [
        -omega0 * q_a - g_n * q_b,
        omega0 * p_a + g_n * p_b,
        -omega0 * q_b - g_n * q_a,
        omega0 * p_b + g_n * p_a,
    ]


def _rhs_spin(omega0: float, g_n: float, y: np.ndarray) -> list[float]:
    c_a, phi_a, c_b, phi_b = y
    s_a = _sin_from_cos(c_a, "cos_theta_a")
    s_b = _sin_from_cos(c_b, "cos_theta_b")
    dphi = phi_a - phi_b
    sin_d = math.sin(dphi)
    cos_d = math.cos(dphi)
    dc_a = 2.0 * g_n * s_a * s_b * sin_d
    dc_b = 2.0 * g_n * s_b * s_a * (-sin_d)
    if s_a == 0.0:
        dphi_a = omega0  # pole: azimuth is pure gauge, polar motion frozen
    else:
        dphi_a = omega0 - 2.0 * g_n * (c_a / s_a) * s_b * cos_d
    if s_b == 0.0:
        dphi_b = omega0
    else:
        dphi_b = omega0 - 2.0 * g_n * (c_b / s_b) * s_a * cos_d
    return [dc_a, dphi_a, dc_b, dphi_b]


def _rhs_dicke(omega0: float, n: int, g: float, y: np.ndarray) -> list[float]:
    p_a, q_a, c, phi = y
    s = _sin_from_cos(c, "cos_theta")
    root2 = math.sqrt(2.0)
    # dp_a/dt is the q_a-gradient of the coupling term sqrt(2)*g*N*q_a*sin*cos,
    # hence carries no q_a factor itself.
    dp_a = -omega0 * q_a - root2 * n * g * s * math.cos(phi)
    dq_a = omega0 * p_a
    dc = 2.0 * root2 * g * q_a * s * math.sin(phi)
    if s == 0.0:
        dphi = omega0
    else:
        dphi = omega0 - 2.0 * root2 * g * q_a * math.cos(phi) * (c / s)
    return [dp_a, dq_a, dc, dphi]


def _rhs_for(spec: ModelSpec):
    omega0 = spec.omega0
    if spec.kind is ModelKind.HARMONIC:
        g_n = spec.g * math.sqrt(spec.n_units)
        return lambda t, y: _rhs_harmonic(omega0, g_n, y)
    if spec.kind is ModelKind.SPIN:
        g_n = spec.g * spec.n_units
        return lambda t, y: _rhs_spin(omega0, g_n, y)
    if spec.kind is ModelKind.DICKE:
        return lambda t, y: _rhs_dicke(omega0, spec.n_units, spec.g, y)
    raise ValueError(f"unsupported model kind {spec.kind!r}")


def hamilton_rhs(spec: ModelSpec, x: PhasePoint) -> np.ndarray:
    """Time derivative of the canonical coordinates at one phase point."""
    if x.kind is not spec.kind:
        raise ValueError("phase point kind does not match the spec")
    return np.asarray(_rhs_for(spec)(0.0, x.coords), dtype=float)


def classical_energies(spec: ModelSpec, coords: np.ndarray):
    """(E_A, E_B, E_total) along an array of coordinates (shape (..., 4))."""
    coords = np.asarray(coords, dtype=float)
    omega0 = spec.omega0
    n = spec.n_units
    a0, a1, b0, b1 = (coords[..., i] for i in range(4))
    if spec.kind is ModelKind.HARMONIC:
        e_a = 0.5 * omega0 * (a0**2 + a1**2)
        e_b = 0.5 * omega0 * (b0**2 + b1**2)
        g_n = spec.g * math.sqrt(n)
        e_1 = g_n * (a1 * b1 + a0 * b0)
    elif spec.kind is ModelKind.SPIN:
        e_a = n * omega0 * (a0 + 1.0) / 2.0
        e_b = n * omega0 * (b0 + 1.0) / 2.0
        s_a = np.sqrt(np.clip(1.0 - a0**2, 0.0, None))
        s_b = np.sqrt(np.clip(1.0 - b0**2, 0.0, None))
        e_1 = spec.g * n**2 * s_a * s_b * np.cos(a1 - b1)
    elif spec.kind is ModelKind.DICKE:
        e_a = 0.5 * omega0 * (a0**2 + a1**2)
        e_b = n * omega0 * (b0 + 1.0) / 2.0
        s = np.sqrt(np.clip(1.0 - b0**2, 0.0, None))
        e_1 = math.sqrt(2.0) * spec.g * n * a1 * s * np.cos(b1)
    else:
        raise ValueError(f"unsupported model kind {spec.kind!r}")
    return e_a, e_b, e_a + e_b + e_1


@dataclass(frozen=True)
class ClassicalPath:
    """Integrated phase-space path with its energy record."""

    times: np.ndarray
    coords: np.ndarray  # shape (len(times), 4)
    battery_energy: np.ndarray
    total_energy: np.ndarray
    solution: object  # dense-output interpolant over [0, times[-1]]

    def point(self, index: int, kind: ModelKind) -> PhasePoint:
        return PhasePoint(kind, self.coords[index])


def _integrate_once(spec: ModelSpec, y0: np.ndarray, grid: np.ndarray,
                    rtol: float, atol: float):
    sol = solve_ivp(
        _rhs_for(spec),
        (0.0, float(grid[-1])),
        y0,
        method="DOP853",
        rtol=rtol,
        atol=atol,
        dense_output=True,
        t_eval=grid,
    )
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    return sol


def integrate(spec: ModelSpec, x0: PhasePoint, grid: np.ndarray) -> ClassicalPath:
    """Integrate Hamilton's equations and sample the energies on ``grid``.

    Adaptive eighth-order Runge-Kutta with dense output; if the total-energy
    drift exceeds the conservation bound the integration is retried once at
    tenfold tighter tolerances before giving up.
    """
    grid = np.asarray(grid, dtype=float)
    if grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
        raise ValueError("time grid must increase strictly from 0")
    y0 = np.asarray(x0.coords, dtype=float)
    limit = ENERGY_DRIFT_LIMIT * spec.energy_scale
    rtol, atol = spec.numerics.ode_rel_tol, spec.numerics.ode_abs_tol
    last_drift = math.inf
    for attempt in range(2):
        sol = _integrate_once(spec, y0, grid, rtol, atol)
        coords = sol.y.T
        _, e_b, e_tot = classical_energies(spec, coords)
        last_drift = float(np.max(np.abs(e_tot - e_tot[0])))
        if last_drift < limit:
            return ClassicalPath(grid, coords, e_b, e_tot, sol.sol)
        rtol, atol = rtol / 10.0, atol / 10.0
    e_a0, e_b0, e_tot0 = (float(v) for v in classical_energies(spec, y0))
    raise ConservationError(
        f"classical energy drift {last_drift:.3e} exceeds {limit:.3e} after retry",
        TrajectoryDiagnostics(
            energy_drift=last_drift,
            charger_energy_initial=e_a0,
            battery_energy_initial=e_b0,
            total_energy_initial=e_tot0,
        ),
    )


def classical_run(spec: ModelSpec, horizon_factor: float | None = None) -> EngineRun:
    """Simulate one classical charging window and expose the battery energy."""
    if spec.side is not Side.CLASSICAL:
        raise ValueError("classical_run requires a classical spec")
    numerics = spec.numerics
    factor = horizon_factor if horizon_factor is not None else numerics.time_horizon_factor
    horizon = factor * natural_timescale(spec)
    grid = np.linspace(0.0, horizon, numerics.grid_points)
    x0 = initial_state_classical(spec)
    path = integrate(spec, x0, grid)

    e_a0, e_b0, e_tot0 = (float(v) for v in classical_energies(spec, x0.coords))
    if spec.kind is ModelKind.HARMONIC and e_b0 != 0.0:
        raise ConservationError(f"harmonic battery must start at exactly zero, got {e_b0!r}")
    tilt_offset = spec.energy_scale * (1.0 - math.cos(spec.epsilon)) / 2.0
    if e_b0 > tilt_offset * (1 + 1e-9) + 1e-12 * spec.energy_scale:
        raise ConservationError(
            f"initial battery energy {e_b0!r} exceeds the tilt offset {tilt_offset!r}"
        )
    diagnostics = TrajectoryDiagnostics(
        energy_drift=float(np.max(np.abs(path.total_energy - path.total_energy[0]))),
        charger_energy_initial=e_a0,
        battery_energy_initial=e_b0,
        total_energy_initial=e_tot0,
    )
    if spec.kind in (ModelKind.SPIN, ModelKind.DICKE):
        cos_cols = (0, 2) if spec.kind is ModelKind.SPIN else (2,)
        for col in cos_cols:
            worst = float(np.max(np.abs(path.coords[:, col])))
            if worst > 1.0 + 1e-12:
                raise ConservationError(
                    f"|cos(theta)| reached {worst!r} along the path", diagnostics
                )
    trajectory = Trajectory(grid, path.battery_energy, spec.energy_scale, diagnostics)

    def energy_at(tau: float) -> float:
        if tau < 0 or tau > horizon * (1 + 1e-12):
            raise ValueError(f"time {tau!r} outside the simulated horizon")
        coords = path.solution(min(tau, horizon))
        return float(classical_energies(spec, coords)[1])

    return EngineRun(spec=spec, trajectory=trajectory, horizon=horizon, energy_at=energy_at)


def classical_energy_trajectory(spec: ModelSpec) -> Trajectory:
    """Battery-energy trajectory of a classical model over the default horizon."""
    return classical_run(spec).trajectory
