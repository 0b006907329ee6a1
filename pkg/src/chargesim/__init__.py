"""Collective charger-battery charging: quantum models and classical analogs."""

__version__ = "0.1.0"

from .models import (  # noqa: F401
    ModelKind,
    ModelSpec,
    NumericsConfig,
    PhasePoint,
    Side,
    StateVector,
    Trajectory,
    initial_state_classical,
    initial_state_quantum,
    natural_timescale,
)
from .operators import (  # noqa: F401
    HamiltonianSet,
    SparseOperator,
    boson_ops,
    build_hamiltonians,
    collective_spin_ops,
)
from .quantum import quantum_energy_trajectory, quantum_run  # noqa: F401
from .classical import (  # noqa: F401
    classical_energy_trajectory,
    classical_run,
    hamilton_rhs,
    integrate,
)
from .metrics import (  # noqa: F401
    AdvantageResult,
    ChargingMetrics,
    collective_advantage,
    fit_power_law,
    max_average_power,
    quantum_classical_ratio,
)
from .oracle import harmonic_energy, harmonic_metrics, power_constant  # noqa: F401
from .runner import SweepConfig, convergence_check, load_sweep_config, run_sweep  # noqa: F401
