"""Quantum engine: state evolution and battery-energy trajectories.

States are propagated under the time-independent total Hamiltonian that acts
during the charging window.  Small problems (dimension up to the configured
threshold) use a full hermitian eigendecomposition, which is exact up to
roundoff and lets the charging-time refinement re-evaluate the state at any
time for free.  Larger problems use adaptive Lanczos (Krylov-subspace)
stepping with a per-step error bound.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .models import (
    EngineRun,
    ModelKind,
    ModelSpec,
    NumericsConfig,
    Side,
    StateVector,
    Trajectory,
    TrajectoryDiagnostics,
    natural_timescale,
)
from .operators import HamiltonianSet, build_hamiltonians, excitation_operator
from .models import initial_state_quantum

__all__ = [
    "ConservationError",
    "KrylovConvergenceError",
    "krylov_propagate",
    "evolve",
    "converged_cutoff",
    "quantum_run",
    "quantum_energy_trajectory",
    "NORM_DRIFT_LIMIT",
    "ENERGY_DRIFT_LIMIT",
    "EXCITATION_DRIFT_LIMIT",
    "CUTOFF_STABILITY_LIMIT",
]

# Conservation thresholds; energy and excitation limits are relative to
# N*omega0 and N respectively.
NORM_DRIFT_LIMIT = 1e-9
ENERGY_DRIFT_LIMIT = 1e-8
EXCITATION_DRIFT_LIMIT = 1e-9
CUTOFF_STABILITY_LIMIT = 1e-6

_INITIAL_CUTOFF_OFFSET = 8
_MAX_CUTOFF_FACTOR = 64


class ConservationError(RuntimeError):
    """A computed trajectory violated a conservation bound."""

    def __init__(self, message: str, diagnostics: TrajectoryDiagnostics | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics


class KrylovConvergenceError(RuntimeError):
    """Krylov step failed to converge within the resource caps."""


def _lanczos_expm(matvec, v: np.ndarray, dt: float, tol: float, m_max: int):
    """One Lanczos approximation of exp(-i*dt*H) v.

    Returns (result, converged).  Convergence is declared when successive
    subspace enlargements change the result by less than ``tol`` relative to
    the input norm; a happy breakdown (invariant subspace) is exact.
    """
    beta0 = np.linalg.norm(v)
    if beta0 == 0.0:
        return v.copy(), True
    dim = v.shape[0]
    m_max = min(m_max, dim)
    basis = np.empty((m_max, dim), dtype=complex)
    basis[0] = v / beta0
    alphas: list[float] = []
    betas: list[float] = []
    previous = None
    for j in range(m_max):
        w = matvec(basis[j])
        alphas.append(float(np.real(np.vdot(basis[j], w))))
        w = w - alphas[j] * basis[j]
        if j > 0:
            w = w - betas[j - 1] * basis[j - 1]
        # Full reorthogonalization keeps the basis orthonormal so the
        # projected propagator stays unitary to roundoff.
        overlaps = basis[: j + 1].conj() @ w
        w = w - basis[: j + 1].T @ overlaps
        beta = float(np.linalg.norm(w))
        evals, evecs = la.eigh_tridiagonal(alphas, betas[:j])
        small = evecs @ (np.exp(-1j * dt * evals) * evecs[0].conj())
        result = beta0 * (basis[: j + 1].T @ small)
        if beta <= 1e-14 * beta0:
            return result, True  # invariant subspace reached
        if previous is not None:
            if np.linalg.norm(result - previous) <= tol * beta0:
                return result, True
        previous = result
        if j + 1 < m_max:
            basis[j + 1] = w / beta
            betas.append(beta)
    return previous if previous is not None else v.copy(), False


def krylov_propagate(matvec, v: np.ndarray, dt: float, tol: float, m_max: int,
                     _depth: int = 0) -> np.ndarray:
    """Evolve ``v`` by exp(-i*dt*H) with adaptive Krylov stepping.

    Steps that do not converge within ``m_max`` basis vectors are bisected
    recursively; persistent failure aborts with a diagnostic.
    """
    if dt == 0.0:
        return v.copy()
    if _depth > 40:
        raise KrylovConvergenceError(
            f"Krylov stepping did not converge: dt={dt!r} after {_depth} bisections "
            f"at subspace size {m_max}"
        )
    result, converged = _lanczos_expm(matvec, v, dt, tol, m_max)
    if converged:
        return result
    half = krylov_propagate(matvec, v, dt / 2.0, tol, m_max, _depth + 1)
    return krylov_propagate(matvec, half, dt / 2.0, tol, m_max, _depth + 1)


class _DensePropagator:
    """Exact propagation through a full hermitian eigendecomposition."""

    def __init__(self, ham: HamiltonianSet, psi0: np.ndarray):
        dense = ham.h_total.matrix.toarray()
        if np.abs(dense.imag).max(initial=0.0) == 0.0:
            evals, evecs = la.eigh(dense.real)
        else:
            evals, evecs = la.eigh(dense)
        self.evals = evals
        self.evecs = evecs
        self.coeffs = evecs.conj().T @ psi0

    def states(self, times: np.ndarray) -> np.ndarray:
        phases = np.exp(-1j * np.outer(self.evals, times))
        return self.evecs @ (phases * self.coeffs[:, None])

    def state_at(self, t: float) -> np.ndarray:
        return self.evecs @ (np.exp(-1j * self.evals * t) * self.coeffs)


class _KrylovPropagator:
    """Sequential Krylov stepping with snapshot-based random access."""

    def __init__(self, ham: HamiltonianSet, psi0: np.ndarray, numerics: NumericsConfig):
        self.matvec = ham.h_total.matrix.dot
        self.tol = numerics.krylov_tol
        self.m_max = numerics.krylov_max_basis
        self._snap_times: list[float] = [0.0]
        self._snap_states: dict[float, np.ndarray] = {0.0: psi0.copy()}

    def remember(self, t: float, state: np.ndarray) -> None:
        if t not in self._snap_states:
            bisect.insort(self._snap_times, t)
            self._snap_states[t] = state.copy()

    def step(self, state: np.ndarray, dt: float) -> np.ndarray:
        return krylov_propagate(self.matvec, state, dt, self.tol, self.m_max)

    def state_at(self, t: float) -> np.ndarray:
        if t < 0:
            raise ValueError("time must be non-negative")
        idx = bisect.bisect_right(self._snap_times, t) - 1
        t0 = self._snap_times[idx]
        state = self._snap_states[t0]
        if t == t0:
            return state
        out = self.step(state, t - t0)
        self.remember(t, out)
        return out


@dataclass(frozen=True)
class EvolutionSamples:
    """Grid expectations produced by one evolution pass."""

    times: np.ndarray
    battery_energy: np.ndarray
    total_energy: np.ndarray
    norms: np.ndarray
    excitation: np.ndarray | None


def _grid_expectations(states: np.ndarray, ham: HamiltonianSet, n_exc) -> tuple:
    hb = ham.h_b.matrix @ states
    ht = ham.h_total.matrix @ states
    e_b = np.einsum("ij,ij->j", states.conj(), hb).real
    e_tot = np.einsum("ij,ij->j", states.conj(), ht).real
    norms = np.linalg.norm(states, axis=0)
    exc = None
    if n_exc is not None:
        ne = n_exc.matrix @ states
        exc = np.einsum("ij,ij->j", states.conj(), ne).real
    return e_b, e_tot, norms, exc


def evolve(ham: HamiltonianSet, psi0: StateVector, grid: np.ndarray,
           numerics: NumericsConfig | None = None,
           n_exc=None, propagator=None) -> tuple[EvolutionSamples, object]:
    """Battery energy, total energy, and norm on a time grid.

    ``grid`` must increase strictly from 0 and ``psi0`` must match the
    Hamiltonian basis.  Returns the samples together with the propagator so
    callers can re-evaluate the state at off-grid times.
    """
    numerics = numerics or NumericsConfig()
    grid = np.asarray(grid, dtype=float)
    if grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
        raise ValueError("time grid must increase strictly from 0")
    if psi0.basis.dimension != ham.dimension:
        raise ValueError("initial state dimension does not match the Hamiltonian")
    amplitudes = psi0.amplitudes
    dim = ham.dimension

    if propagator is None:
        if dim <= numerics.dense_dim_threshold:
            propagator = _DensePropagator(ham, amplitudes)
        else:
            propagator = _KrylovPropagator(ham, amplitudes, numerics)

    if isinstance(propagator, _DensePropagator):
        nt = len(grid)
        chunk = max(1, min(nt, int(2e6 // max(dim, 1)) or 1))
        e_b = np.empty(nt)
        e_tot = np.empty(nt)
        norms = np.empty(nt)
        exc = np.empty(nt) if n_exc is not None else None
        for start in range(0, nt, chunk):
            stop = min(start + chunk, nt)
            states = propagator.states(grid[start:stop])
            b, t, nn, x = _grid_expectations(states, ham, n_exc)
            e_b[start:stop] = b
            e_tot[start:stop] = t
            norms[start:stop] = nn
            if exc is not None:
                exc[start:stop] = x
    else:
        snapshot_every = max(1, len(grid) // 16)
        e_b = np.empty(len(grid))
        e_tot = np.empty(len(grid))
        norms = np.empty(len(grid))
        exc = np.empty(len(grid)) if n_exc is not None else None
        state = amplitudes.copy()
        for i, t in enumerate(grid):
            if i > 0:
                state = propagator.step(state, grid[i] - grid[i - 1])
                if i % snapshot_every == 0:
                    propagator.remember(t, state)
            col = state[:, None]
            b, tt, nn, x = _grid_expectations(col, ham, n_exc)
            e_b[i] = b[0]
            e_tot[i] = tt[0]
            norms[i] = nn[0]
            if exc is not None:
                exc[i] = x[0]

    return EvolutionSamples(grid, e_b, e_tot, norms, exc), propagator


def _resolve_cutoff(spec: ModelSpec) -> int:
    return spec.cutoff if spec.cutoff is not None else 2 * spec.n_units + _INITIAL_CUTOFF_OFFSET


def _dicke_battery_energy(spec: ModelSpec, cutoff: int, grid: np.ndarray) -> np.ndarray:
    ham = build_hamiltonians(spec, cutoff=cutoff)
    psi0 = initial_state_quantum(spec, cutoff=cutoff)
    samples, _ = evolve(ham, psi0, grid, spec.numerics)
    return samples.battery_energy


def converged_cutoff(spec: ModelSpec, grid: np.ndarray | None = None):
    """Smallest photon cutoff whose doubling leaves E_B(t) stable.

    Starting from ``2N + 8`` (or the spec's explicit cutoff), the cutoff is
    doubled until the uniform change of the battery energy drops below
    ``1e-6 * N * omega0`` over the charging window (the configured fraction
    of the grid; see :class:`NumericsConfig`).  Returns ``(cutoff, trail)``
    where the trail lists ``(cutoff, doubled_cutoff, max_change)`` probes.
    """
    if spec.kind is not ModelKind.DICKE or spec.side is not Side.QUANTUM:
        raise ValueError("cutoff convergence applies to quantum Dicke runs")
    if grid is None:
        horizon = spec.numerics.time_horizon_factor * natural_timescale(spec)
        grid = np.linspace(0.0, horizon, spec.numerics.grid_points)
    window = grid[grid <= spec.numerics.cutoff_stability_fraction * grid[-1] * (1 + 1e-12)]
    tol = CUTOFF_STABILITY_LIMIT * spec.energy_scale
    cutoff = max(_resolve_cutoff(spec), spec.n_units + 1)
    trail = []
    e_b = _dicke_battery_energy(spec, cutoff, window)
    while True:
        e_b_doubled = _dicke_battery_energy(spec, 2 * cutoff, window)
        change = float(np.max(np.abs(e_b_doubled - e_b)))
        trail.append((cutoff, 2 * cutoff, change))
        if change < tol:
            return cutoff, tuple(trail)
        cutoff, e_b = 2 * cutoff, e_b_doubled
        if cutoff > _MAX_CUTOFF_FACTOR * spec.n_units:
            raise ConservationError(
                f"photon cutoff did not converge below {_MAX_CUTOFF_FACTOR}*N "
                f"(last change {change:.3e})"
            )


def _check_conservation(spec: ModelSpec, samples: EvolutionSamples,
                        diagnostics: TrajectoryDiagnostics) -> None:
    scale = spec.energy_scale
    if diagnostics.norm_drift is not None and diagnostics.norm_drift >= NORM_DRIFT_LIMIT:
        raise ConservationError(
            f"norm drift {diagnostics.norm_drift:.3e} exceeds {NORM_DRIFT_LIMIT:.1e}",
            diagnostics,
        )
    if diagnostics.energy_drift >= ENERGY_DRIFT_LIMIT * scale:
        raise ConservationError(
            f"total-energy drift {diagnostics.energy_drift:.3e} exceeds "
            f"{ENERGY_DRIFT_LIMIT:.1e} * N * omega0",
            diagnostics,
        )
    if diagnostics.excitation_drift is not None:
        if diagnostics.excitation_drift >= EXCITATION_DRIFT_LIMIT * spec.n_units:
            raise ConservationError(
                f"excitation drift {diagnostics.excitation_drift:.3e} exceeds "
                f"{EXCITATION_DRIFT_LIMIT:.1e} * N",
                diagnostics,
            )


def quantum_run(spec: ModelSpec, horizon_factor: float | None = None) -> EngineRun:
    """Simulate one quantum charging window and expose the battery energy.

    Composes the initial state, the Hamiltonians, and the propagator over a
    uniform grid spanning ``horizon_factor`` (default from the numerics
    config) natural timescales.  Conservation bounds are enforced before the
    run is returned.
    """
    if spec.side is not Side.QUANTUM:
        raise ValueError("quantum_run requires a quantum spec")
    numerics = spec.numerics
    factor = horizon_factor if horizon_factor is not None else numerics.time_horizon_factor
    horizon = factor * natural_timescale(spec)
    grid = np.linspace(0.0, horizon, numerics.grid_points)

    cutoff = None
    if spec.kind is ModelKind.DICKE:
        if spec.cutoff is not None:
            cutoff = spec.cutoff
        else:
            cutoff, _ = converged_cutoff(spec, grid)

    ham = build_hamiltonians(spec, cutoff=cutoff)
    psi0 = initial_state_quantum(spec, cutoff=cutoff)
    n_exc = excitation_operator(spec, ham)
    samples, propagator = evolve(ham, psi0, grid, numerics, n_exc=n_exc)

    exc_drift = None
    if samples.excitation is not None:
        exc_drift = float(np.max(np.abs(samples.excitation - samples.excitation[0])))
    diagnostics = TrajectoryDiagnostics(
        energy_drift=float(np.max(np.abs(samples.total_energy - samples.total_energy[0]))),
        charger_energy_initial=ham.h_a.expectation(psi0.amplitudes),
        battery_energy_initial=ham.h_b.expectation(psi0.amplitudes),
        total_energy_initial=float(samples.total_energy[0]),
        norm_drift=float(np.max(np.abs(samples.norms - 1.0))),
        excitation_drift=exc_drift,
        cutoff=cutoff,
    )
    _check_conservation(spec, samples, diagnostics)
    trajectory = Trajectory(grid, samples.battery_energy, spec.energy_scale, diagnostics)

    h_b = ham.h_b.matrix

    def energy_at(tau: float) -> float:
        if tau < 0 or tau > horizon * (1 + 1e-12):
            raise ValueError(f"time {tau!r} outside the simulated horizon")
        state = propagator.state_at(min(tau, horizon))
        return float(np.real(np.vdot(state, h_b @ state)))

    return EngineRun(spec=spec, trajectory=trajectory, horizon=horizon, energy_at=energy_at)


def quantum_energy_trajectory(spec: ModelSpec) -> Trajectory:
    """Battery-energy trajectory of a quantum model over the default horizon."""
    return quantum_run(spec).trajectory
