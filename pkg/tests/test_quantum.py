import math

import numpy as np
import pytest

from chargesim.models import (
    ModelKind,
    ModelSpec,
    NumericsConfig,
    Side,
    initial_state_quantum,
    natural_timescale,
)
from chargesim.operators import build_hamiltonians, build_multimode_harmonic, excitation_operator
from chargesim.oracle import harmonic_energy
from chargesim.quantum import (
    converged_cutoff,
    evolve,
    krylov_propagate,
    quantum_energy_trajectory,
    quantum_run,
)


def grid_for(spec, factor=10.0, points=2000):
    horizon = factor * natural_timescale(spec)
    return np.linspace(0.0, horizon, points)


class TestKrylovPropagate:
    def test_matches_dense_exponential(self):
        rng = np.random.default_rng(7)
        dim = 60
        h = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        h = (h + h.conj().T) / 2
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        v /= np.linalg.norm(v)
        dt = 0.8
        import scipy.linalg as la
        exact = la.expm(-1j * dt * h) @ v
        approx = krylov_propagate(h.dot, v, dt, tol=1e-13, m_max=40)
        assert np.linalg.norm(approx - exact) < 1e-10

    def test_zero_dt_identity(self):
        v = np.array([1.0, 0.0], dtype=complex)
        out = krylov_propagate(lambda x: x, v, 0.0, 1e-12, 10)
        np.testing.assert_array_equal(out, v)

    def test_substepping_on_large_interval(self):
        rng = np.random.default_rng(3)
        dim = 40
        h = np.diag(rng.uniform(0, 50, size=dim)).astype(complex)
        v = rng.normal(size=dim) + 0j
        v /= np.linalg.norm(v)
        out = krylov_propagate(h.dot, v, 30.0, tol=1e-12, m_max=12)
        exact = np.exp(-1j * 30.0 * np.diag(h).real) * v
        assert np.linalg.norm(out - exact) < 1e-8


class TestEvolve:
    def test_harmonic_matches_closed_form(self):
        spec = ModelSpec(ModelKind.HARMONIC, Side.QUANTUM, 4, 0.5)
        traj = quantum_energy_trajectory(spec)
        exact = np.array([harmonic_energy(4, 0.5, 1.0, t) for t in traj.times])
        assert np.max(np.abs(traj.battery_energy - exact)) < 1e-8 * 4

    def test_zero_coupling_stays_discharged(self):
        for kind, kw in ((ModelKind.HARMONIC, {}), (ModelKind.SPIN, {}),
                         (ModelKind.DICKE, {"cutoff": 10})):
            spec = ModelSpec(kind, Side.QUANTUM, 2, 0.0, **kw)
            ham = build_hamiltonians(spec)
            psi0 = initial_state_quantum(spec)
            grid = np.linspace(0.0, 5.0, 200)
            samples, _ = evolve(ham, psi0, grid, spec.numerics)
            assert np.max(np.abs(samples.battery_energy)) < 1e-12 * 2

    def test_spin_pair_rabi_flop(self):
        # two-level closed form: the coupled pair oscillates at frequency 2g,
        # E_B(t) = sin^2(2 g t), full inversion at t = pi/(4g)
        g = 0.3
        spec = ModelSpec(ModelKind.SPIN, Side.QUANTUM, 1, g)
        ham = build_hamiltonians(spec)
        psi0 = initial_state_quantum(spec)
        t_inv = math.pi / (4 * g)
        grid = np.linspace(0.0, 2 * t_inv, 401)
        samples, _ = evolve(ham, psi0, grid, spec.numerics)
        oracle = np.sin(2 * g * grid) ** 2
        assert np.max(np.abs(samples.battery_energy - oracle)) < 1e-12
        assert samples.battery_energy[200] == pytest.approx(1.0, abs=1e-12)

    def test_krylov_agrees_with_dense(self):
        spec = ModelSpec(ModelKind.DICKE, Side.QUANTUM, 3, 0.6, cutoff=16)
        ham = build_hamiltonians(spec)
        psi0 = initial_state_quantum(spec)
        grid = grid_for(spec, factor=5.0, points=300)
        dense, _ = evolve(ham, psi0, grid, spec.numerics)
        forced = NumericsConfig(dense_dim_threshold=2)
        kry, _ = evolve(ham, psi0, grid, forced)
        assert np.max(np.abs(dense.battery_energy - kry.battery_energy)) < 1e-8

    def test_rejects_bad_grid(self):
        spec = ModelSpec(ModelKind.SPIN, Side.QUANTUM, 1, 0.5)
        ham = build_hamiltonians(spec)
        psi0 = initial_state_quantum(spec)
        with pytest.raises(ValueError):
            evolve(ham, psi0, np.array([0.5, 1.0]), spec.numerics)


class TestQuantumRun:
    def test_first_harmonic_maximum_position(self):
        # N=4, g=0.05: full transfer first occurs at t = pi/(2*0.05*2)
        spec = ModelSpec(ModelKind.HARMONIC, Side.QUANTUM, 4, 0.05)
        run = quantum_run(spec)
        t_full = math.pi / (2 * 0.05 * 2)
        assert run.energy_at(t_full) == pytest.approx(4.0, rel=1e-10)
        earlier = run.trajectory.times[run.trajectory.times < 0.99 * t_full]
        e_earlier = run.trajectory.battery_energy[: len(earlier)]
        assert np.max(e_earlier) < 4.0 * (1 - 1e-6)

    def test_spin_energy_in_omega0_units_universal(self):
        # dynamics depends only on g*t: in units of omega0 the trajectory is
        # the same for omega0=1 and omega0=7 on the shared g*t grid
        n1 = ModelSpec(ModelKind.SPIN, Side.QUANTUM, 3, 0.4, omega0=1.0)
        n7 = ModelSpec(ModelKind.SPIN, Side.QUANTUM, 3, 0.4, omega0=7.0)
        t1 = quantum_run(n1).trajectory
        t7 = quantum_run(n7).trajectory
        np.testing.assert_allclose(t1.times, t7.times)  # timescale has no omega0
        np.testing.assert_allclose(
            t1.battery_energy / 1.0, t7.battery_energy / 7.0, atol=1e-9
        )

    def test_dicke_single_qubit_rotating_wave_oracle(self):
        # N=1 weak coupling: E_B(t) ~ sin^2(g t) within 5% at g = 0.01
        spec = ModelSpec(ModelKind.DICKE, Side.QUANTUM, 1, 0.01)
        run = quantum_run(spec)
        oracle = np.sin(0.01 * run.trajectory.times) ** 2
        assert np.max(np.abs(run.trajectory.battery_energy - oracle)) < 0.05

    def test_norm_and_energy_drift_recorded(self):
        spec = ModelSpec(ModelKind.SPIN, Side.QUANTUM, 4, 0.7)
        run = quantum_run(spec)
        d = run.trajectory.diagnostics
        assert d.norm_drift < 1e-9
        assert d.energy_drift < 1e-8 * 4
        assert d.excitation_drift < 1e-9 * 4
        assert d.charger_energy_initial == pytest.approx(4.0, rel=1e-14)

    def test_energy_at_matches_grid(self):
        spec = ModelSpec(ModelKind.HARMONIC, Side.QUANTUM, 2, 0.3)
        run = quantum_run(spec)
        k = 700
        t = run.trajectory.times[k]
        assert run.energy_at(t) == pytest.approx(run.trajectory.battery_energy[k],
                                                 rel=1e-12, abs=1e-12)

    def test_energy_at_outside_horizon_rejected(self):
        run = quantum_run(ModelSpec(ModelKind.HARMONIC, Side.QUANTUM, 2, 0.3))
        with pytest.raises(ValueError):
            run.energy_at(run.horizon * 1.5)


class TestBrightModeExactness:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_multimode_matches_reduction(self, n):
        g = 0.35
        spec = ModelSpec(ModelKind.HARMONIC, Side.QUANTUM, n, g)
        grid = grid_for(spec, factor=6.0, points=400)

        reduced_ham = build_hamiltonians(spec)
        reduced_psi = initial_state_quantum(spec)
        reduced, _ = evolve(reduced_ham, reduced_psi, grid, spec.numerics)

        full_ham, full_psi = build_multimode_harmonic(spec)
        full, _ = evolve(full_ham, full_psi, grid, spec.numerics)

        assert np.max(np.abs(reduced.battery_energy - full.battery_energy)) < 1e-9 * n


class TestCutoffConvergence:
    def test_weak_coupling_accepts_initial(self):
        spec = ModelSpec(ModelKind.DICKE, Side.QUANTUM, 8, 0.01)
        cutoff, trail = converged_cutoff(spec)
        assert cutoff == 2 * 8 + 8
        assert len(trail) == 1

    def test_strong_coupling_grows(self):
        spec = ModelSpec(ModelKind.DICKE, Side.QUANTUM, 8, 2.0)
        cutoff, trail = converged_cutoff(spec)
        assert cutoff > 8 + 1
        assert cutoff > 2 * 8 + 8  # strong coupling needs more photons
        assert trail[-1][2] < 1e-6 * 8

    def test_stability_at_accepted_cutoff(self):
        spec = ModelSpec(ModelKind.DICKE, Side.QUANTUM, 4, 0.5)
        cutoff, trail = converged_cutoff(spec)
        assert trail[-1][0] == cutoff
        assert trail[-1][2] < 1e-6 * 4

    def test_non_dicke_rejected(self):
        with pytest.raises(ValueError):
            converged_cutoff(ModelSpec(ModelKind.SPIN, Side.QUANTUM, 4, 0.5))
