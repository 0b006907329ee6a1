"""Model definitions shared by the quantum and classical engines.

Three charger-battery families are supported:

* ``HARMONIC`` -- one bosonic charger mode coupled by excitation hopping to
  ``N`` battery oscillators.  The symmetric battery combination (the bright
  mode) carries all of the transferred energy, so the reduced description is
  two oscillators with coupling ``g * sqrt(N)``.
* ``SPIN`` -- a collective spin of length ``N/2`` charging another collective
  spin of the same length through a transverse exchange coupling.
* ``DICKE`` -- a single cavity mode charging ``N`` qubits (one collective
  spin) through a coupling that keeps the counter-rotating terms.

Each family exists in a quantum version (state vectors in a truncated Hilbert
space) and a rigorously classical version (canonical coordinates evolving
under Hamilton's equations).  Conventions used everywhere: ``hbar = 1``,
energies in units of ``omega0``, times in units of ``1/omega0``.  The charger
always starts with energy ``N * omega0`` and the battery starts empty.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "ModelKind",
    "Side",
    "NumericsConfig",
    "ModelSpec",
    "PhasePoint",
    "BasisInfo",
    "StateVector",
    "TrajectoryDiagnostics",
    "Trajectory",
    "EngineRun",
    "natural_timescale",
    "initial_state_quantum",
    "initial_state_classical",
    "NoCouplingError",
]


class ModelKind(enum.Enum):
    """Charger-battery model family."""

    HARMONIC = "harmonic"
    SPIN = "spin"
    DICKE = "dicke"


class Side(enum.Enum):
    """Quantum or classical realization of a model family."""

    QUANTUM = "quantum"
    CLASSICAL = "classical"


class NoCouplingError(ValueError):
    """Raised when an operation needs g > 0 but the coupling is zero."""


@dataclass(frozen=True)
class NumericsConfig:
    """Numerical controls shared by both engines.

    Attributes:
        ode_rel_tol, ode_abs_tol: tolerances of the adaptive Runge-Kutta
            integrator used by the classical engine.
        krylov_tol: per-step error bound of the Krylov propagator used for
            quantum states too large for dense diagonalization.
        time_horizon_factor: charging window length in units of the model's
            natural timescale.
        grid_points: number of uniform samples of the energy trajectory.
        refine_tol: relative width of the charging-time bracket at which the
            golden-section power maximization stops.
        dense_dim_threshold: largest Hilbert-space dimension evolved through
            a full eigendecomposition; larger problems use Krylov stepping.
        krylov_max_basis: maximum Krylov subspace size per step.
        cutoff_stability_fraction: fraction of the horizon over which the
            photon-cutoff doubling check demands a stable battery energy.
            Strongly coupled Dicke dynamics amplifies truncation differences
            exponentially at late times, so stability is required on the
            charging window that determines the figures of merit (the optimal
            charging time is verified to fall inside it), not on the entire
            horizon.
    """

    ode_rel_tol: float = 1e-11
    ode_abs_tol: float = 1e-13
    krylov_tol: float = 1e-12
    time_horizon_factor: float = 10.0
    grid_points: int = 2000
    refine_tol: float = 1e-6
    dense_dim_threshold: int = 2000
    krylov_max_basis: int = 40
    cutoff_stability_fraction: float = 0.35

    def __post_init__(self) -> None:
        for name in ("ode_rel_tol", "ode_abs_tol", "krylov_tol",
                     "time_horizon_factor", "refine_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.grid_points < 100:
            raise ValueError("grid_points must be at least 100")
        if self.dense_dim_threshold < 2:
            raise ValueError("dense_dim_threshold must be at least 2")
        if self.krylov_max_basis < 4:
            raise ValueError("krylov_max_basis must be at least 4")
        if not 0.0 < self.cutoff_stability_fraction <= 1.0:
            raise ValueError("cutoff_stability_fraction must lie in (0, 1]")


@dataclass(frozen=True)
class ModelSpec:
    """Full description of one simulation instance.

    Attributes:
        kind: model family.
        side: quantum or classical dynamics.
        n_units: number of battery units N.
        g: charger-battery coupling energy (units of omega0), >= 0.
        omega0: characteristic energy of charger and battery units.
        epsilon: polar tilt (radians) regularizing classical spin initial
            conditions away from the coordinate poles.
        phi0: initial azimuth of the classical spin coordinates.
        cutoff: photon-number truncation, Dicke quantum only.  ``None``
            selects the automatic cutoff-doubling policy.
        numerics: numerical controls.
    """

    kind: ModelKind
    side: Side
    n_units: int
    g: float
    omega0: float = 1.0
    epsilon: float = 1e-3
    phi0: float = 0.0
    cutoff: int | None = None
    numerics: NumericsConfig = field(default_factory=NumericsConfig)

    def __post_init__(self) -> None:
        if int(self.n_units) != self.n_units or self.n_units < 1:
            raise ValueError(f"n_units must be a positive integer, got {self.n_units}")
        if self.omega0 <= 0:
            raise ValueError("omega0 must be positive")
        if self.g < 0:
            raise ValueError("g must be non-negative")
        if self.side is Side.CLASSICAL and self.kind in (ModelKind.SPIN, ModelKind.DICKE):
            if not 0.0 < self.epsilon < math.pi / 4:
                raise ValueError("epsilon must lie in (0, pi/4) for classical spin models")
        if self.kind is ModelKind.DICKE and self.side is Side.QUANTUM:
            if self.cutoff is not None and self.cutoff < self.n_units + 1:
                raise ValueError("cutoff must be at least n_units + 1 for quantum Dicke runs")

    @property
    def energy_scale(self) -> float:
        """Total charger energy N * omega0, the natural energy unit of a run."""
        return self.n_units * self.omega0


_PHASE_LABELS = {
    ModelKind.HARMONIC: ("p_a", "q_a", "P_b", "Q_b"),
    ModelKind.SPIN: ("cos_theta_a", "phi_a", "cos_theta_b", "phi_b"),
    ModelKind.DICKE: ("p_a", "q_a", "cos_theta", "phi"),
}


@dataclass(frozen=True)
class PhasePoint:
    """Canonical coordinates of one classical configuration.

    Coordinate layout per family (all dimensionless):

    * HARMONIC: ``(p_a, q_a, P_b, Q_b)`` where ``(P_b, Q_b)`` are the
      collective battery quadratures.
    * SPIN: ``(cos_theta_a, phi_a, cos_theta_b, phi_b)``.
    * DICKE: ``(p_a, q_a, cos_theta, phi)``.
    """

    kind: ModelKind
    coords: np.ndarray

    def __post_init__(self) -> None:
        coords = np.asarray(self.coords, dtype=float)
        if coords.shape != (4,):
            raise ValueError(f"expected 4 coordinates, got shape {coords.shape}")
        object.__setattr__(self, "coords", coords)
        for label, value in zip(self.labels, coords):
            if label.startswith("cos_theta") and abs(value) > 1.0 + 1e-12:
                raise ValueError(f"|{label}| must not exceed 1, got {value!r}")

    @property
    def labels(self) -> tuple[str, ...]:
        return _PHASE_LABELS[self.kind]

    def __getitem__(self, label: str) -> float:
        return float(self.coords[self.labels.index(label)])


@dataclass(frozen=True)
class BasisInfo:
    """Tensor-factor layout of a truncated Hilbert space.

    ``factors`` names the tensor factors in Kronecker (row-major) order and
    ``dims`` gives their dimensions.  A single factor describes a basis that
    is not a tensor product (the excitation-conserving oscillator sector).
    """

    factors: tuple[str, ...]
    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.factors) != len(self.dims) or not self.factors:
            raise ValueError("factors and dims must be non-empty and of equal length")
        if any(d < 1 for d in self.dims):
            raise ValueError("all factor dimensions must be positive")

    @property
    def dimension(self) -> int:
        return int(np.prod(self.dims))


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes over a truncated Hilbert basis."""

    amplitudes: np.ndarray
    basis: BasisInfo

    def __post_init__(self) -> None:
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (self.basis.dimension,):
            raise ValueError(
                f"amplitude length {amp.shape} does not match basis dimension "
                f"{self.basis.dimension}"
            )
        object.__setattr__(self, "amplitudes", amp)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class TrajectoryDiagnostics:
    """Conservation record attached to every computed trajectory.

    Drifts are absolute, in the same energy units as the trajectory; the
    acceptance thresholds are relative to ``N * omega0``.
    """

    energy_drift: float
    charger_energy_initial: float
    battery_energy_initial: float
    total_energy_initial: float
    norm_drift: float | None = None
    excitation_drift: float | None = None
    cutoff: int | None = None


@dataclass(frozen=True)
class Trajectory:
    """Battery energy sampled on a time grid, with conservation diagnostics."""

    times: np.ndarray
    battery_energy: np.ndarray
    energy_scale: float
    diagnostics: TrajectoryDiagnostics

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        energy = np.asarray(self.battery_energy, dtype=float)
        if times.shape != energy.shape or times.ndim != 1:
            raise ValueError("times and battery_energy must be 1-d arrays of equal length")
        if times[0] != 0.0 or np.any(np.diff(times) <= 0):
            raise ValueError("times must increase strictly from 0")
        if self.energy_scale <= 0:
            raise ValueError("energy_scale must be positive")
        # Quantum and harmonic-classical runs start at exactly zero; tilted
        # classical spin initial conditions carry N*omega0*(1-cos(eps))/2,
        # which stays below this bound for every supported tilt.
        if energy[0] > 1e-4 * self.energy_scale:
            raise ValueError("battery must start discharged")
        if np.min(energy) < -1e-9 * self.energy_scale:
            raise ValueError("battery energy must stay non-negative")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "battery_energy", energy)

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class EngineRun:
    """One engine execution: sampled trajectory plus a point re-evaluator.

    ``energy_at(tau)`` returns the battery energy at an arbitrary time inside
    the simulated horizon with full engine accuracy; the power maximizer uses
    it to refine the optimal charging time beyond the grid resolution.
    """

    spec: ModelSpec
    trajectory: Trajectory
    horizon: float
    energy_at: Callable[[float], float]


def natural_timescale(spec: ModelSpec) -> float:
    """Natural charging timescale of a model family.

    The spin-spin exchange dynamics is governed by the energy ``g * N``; the
    boson-coupled families (harmonic, Dicke) by ``g * sqrt(N)``.  Returns the
    inverse of that energy.
    """
    if spec.g == 0:
        raise NoCouplingError("no coupling; charging time undefined")
    if spec.kind is ModelKind.SPIN:
        return 1.0 / (spec.g * spec.n_units)
    return 1.0 / (spec.g * math.sqrt(spec.n_units))


def _require_side(spec: ModelSpec, side: Side) -> None:
    if spec.side is not side:
        raise ValueError(f"expected a {side.value} spec, got {spec.side.value}")


def initial_state_quantum(spec: ModelSpec, cutoff: int | None = None) -> StateVector:
    """Initial product state: charger holding N quanta, battery in its ground state.

    * HARMONIC: charger Fock state ``|N>`` with the bright mode in vacuum,
      expressed in the excitation-conserving sector basis ``|k>_A |N-k>_B``
      (index k = charger occupation).
    * SPIN: charger spin fully up ``|J, +J>``, battery spin fully down
      ``|J, -J>`` with ``J = N/2``.
    * DICKE: cavity Fock state ``|N>`` and battery spin ``|J, -J>``.

    In every case ``<H_A> = N * omega0`` and ``<H_B> = 0``.
    """
    _require_side(spec, Side.QUANTUM)
    n = spec.n_units
    if spec.kind is ModelKind.HARMONIC:
        basis = BasisInfo(("charger_excitation",), (n + 1,))
        amp = np.zeros(n + 1, dtype=complex)
        amp[n] = 1.0
        return StateVector(amp, basis)
    if spec.kind is ModelKind.SPIN:
        basis = BasisInfo(("charger_spin", "battery_spin"), (n + 1, n + 1))
        amp = np.zeros((n + 1) ** 2, dtype=complex)
        amp[n * (n + 1)] = 1.0  # charger m=+J (index N), battery m=-J (index 0)
        return StateVector(amp, basis)
    if spec.kind is ModelKind.DICKE:
        nc = cutoff if cutoff is not None else spec.cutoff
        if nc is None:
            raise ValueError("quantum Dicke initial state needs a photon cutoff")
        if nc < n + 1:
            raise ValueError("cutoff must be at least n_units + 1")
        basis = BasisInfo(("cavity", "battery_spin"), (nc, n + 1))
        amp = np.zeros(nc * (n + 1), dtype=complex)
        amp[n * (n + 1)] = 1.0  # photons=N, battery m=-J
        return StateVector(amp, basis)
    raise ValueError(f"unsupported model kind {spec.kind!r}")


def initial_state_classical(spec: ModelSpec) -> PhasePoint:
    """Lowest-energy battery configuration with the charger holding N * omega0.

    The charger quadratures satisfy ``p_a(0) = q_a(0)``; spin coordinates are
    tilted by ``epsilon`` off the poles so that the azimuthal equations stay
    regular.  For spin models the charger energy is ``N*omega0*(1+cos eps)/2``,
    equal to ``N*omega0`` only up to O(eps^2); the exact value is recorded in
    the trajectory diagnostics rather than compensated for.
    """
    _require_side(spec, Side.CLASSICAL)
    n = spec.n_units
    root_n = math.sqrt(n)
    eps = spec.epsilon
    phi0 = spec.phi0
    if spec.kind is ModelKind.HARMONIC:
        coords = np.array([root_n, root_n, 0.0, 0.0])
    elif spec.kind is ModelKind.SPIN:
        coords = np.array([math.cos(eps), phi0, -math.cos(eps), phi0])
    elif spec.kind is ModelKind.DICKE:
        coords = np.array([root_n, root_n, -math.cos(eps), phi0])
    else:
        raise ValueError(f"unsupported model kind {spec.kind!r}")
    return PhasePoint(spec.kind, coords)
