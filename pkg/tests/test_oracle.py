import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chargesim.metrics import ChargingMetrics
from chargesim.models import NoCouplingError
from chargesim.oracle import harmonic_energy, harmonic_metrics, power_constant
from chargesim.search import golden_section_maximize


def _independent_power_constant():
    """Dense grid scan plus local golden-section, sharing no library code."""
    xs = np.linspace(1e-6, math.pi, 200001)
    vals = np.sin(xs) ** 2 / xs
    i = int(np.argmax(vals))
    lo, hi = xs[i - 1], xs[i + 1]
    inv_phi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    for _ in range(200):
        if b - a < 1e-14:
            break
        c = b - inv_phi * (b - a)
        d = a + inv_phi * (b - a)
        if math.sin(c) ** 2 / c > math.sin(d) ** 2 / d:
            b = d
        else:
            a = c
    x = 0.5 * (a + b)
    return x, math.sin(x) ** 2 / x


X_STAR_ORACLE, Y_ORACLE = _independent_power_constant()


class TestPowerConstant:
    def test_matches_independent_oracle(self):
        pc = power_constant()
        # the independent comparison-based oracle carries sqrt(eps) x noise
        assert pc.x_star == pytest.approx(X_STAR_ORACLE, abs=1e-7)
        assert pc.y_max == pytest.approx(Y_ORACLE, abs=1e-13)

    def test_approximate_values(self):
        pc = power_constant()
        assert pc.x_star == pytest.approx(1.1656, abs=5e-4)
        assert pc.y_max == pytest.approx(0.7246, abs=5e-4)

    def test_definition_identity(self):
        pc = power_constant()
        assert pc.y_max == math.sin(pc.x_star) ** 2 / pc.x_star

    def test_stationarity(self):
        pc = power_constant()
        x = pc.x_star
        assert abs(x * math.sin(2 * x) - math.sin(x) ** 2) < 1e-10


class TestHarmonicEnergy:
    def test_quarter_period_full_transfer(self):
        g = 0.37
        assert harmonic_energy(1, g, 1.0, math.pi / (2 * g)) == pytest.approx(1.0, rel=1e-12)

    def test_zero_time(self):
        assert harmonic_energy(5, 1.3, 2.0, 0.0) == 0.0

    def test_direct_evaluation(self):
        # N=4, g=0.1, tau=2.5: 4 sin^2(0.5) = 0.9193953882637206
        expected = 4 * math.sin(0.5) ** 2
        assert harmonic_energy(4, 0.1, 1.0, 2.5) == pytest.approx(expected, rel=1e-15)
        assert expected == pytest.approx(0.9193953882637206, abs=1e-12)

    @given(
        n=st.integers(min_value=1, max_value=100),
        g=st.floats(min_value=0.0, max_value=10.0),
        tau=st.floats(min_value=0.0, max_value=100.0),
    )
    def test_bounded_by_full_charge(self, n, g, tau):
        e = harmonic_energy(n, g, 1.0, tau)
        assert 0.0 <= e <= n


class TestHarmonicMetrics:
    def test_advantage_is_sqrt_n(self):
        g = 0.2
        p16 = harmonic_metrics(16, g).p_bar
        p1 = harmonic_metrics(1, g).p_bar
        assert p16 / (16 * p1) == pytest.approx(4.0, rel=1e-12)

    def test_single_unit_advantage_one(self):
        p1 = harmonic_metrics(1, 0.3).p_bar
        assert p1 / (1 * p1) == 1.0

    def test_power_formula(self):
        pc = power_constant()
        m = harmonic_metrics(4, 0.1, 1.0)
        assert m.p_bar == pytest.approx(4 * 2 * 0.1 * pc.y_max, rel=1e-12)

    def test_tau_bar(self):
        pc = power_constant()
        m = harmonic_metrics(4, 0.2, 1.0)
        assert m.tau_bar == pytest.approx(pc.x_star / 0.4, rel=1e-12)
        assert m.tau_bar == pytest.approx(2.914, abs=2e-3)

    def test_zero_coupling_rejected(self):
        with pytest.raises(NoCouplingError):
            harmonic_metrics(3, 0.0)

    def test_returns_consistent_metrics(self):
        m = harmonic_metrics(9, 0.5)
        assert isinstance(m, ChargingMetrics)
        assert m.p_bar == pytest.approx(m.e_bar / m.tau_bar, rel=1e-14)


class TestGoldenSection:
    def test_finds_parabola_max(self):
        # Comparison search resolves a smooth maximum to ~sqrt(eps) in x,
        # but the value at that point is then exact to machine precision.
        x, y = golden_section_maximize(lambda x: -(x - 2.0) ** 2 + 5.0, 0.0, 5.0, 1e-12)
        assert x == pytest.approx(2.0, abs=1e-6)
        assert y == pytest.approx(5.0, abs=1e-15)

    def test_bad_bracket(self):
        with pytest.raises(ValueError):
            golden_section_maximize(lambda x: x, 2.0, 1.0, 1e-6)

    @given(peak=st.floats(min_value=0.2, max_value=0.8))
    def test_recovers_random_peak(self, peak):
        x, _ = golden_section_maximize(lambda x: -abs(x - peak), 0.0, 1.0, 1e-10)
        assert x == pytest.approx(peak, abs=1e-8)
