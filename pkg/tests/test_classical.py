"""Tests for symbols, limit measures and transfer operators."""

import math

import numpy as np
import pytest

from qelab.billiard import PhasePoint, gamma
from qelab.classical import (
    DIRICHLET,
    NEUMANN,
    MeasureKind,
    TransferKind,
    c_const,
    const,
    ergodic_average,
    ergodic_averages,
    eta_power,
    eta_window,
    fourier,
    from_function,
    invariant_function,
    mean_ergodic_distance,
    mu_density,
    omega,
    parse_observable,
    projection_P,
    transfer_apply,
    transfer_values,
    weighted_norm_mc,
)
from qelab.conditions import BoundaryCondition, BoundaryKind
from qelab.kernels.multiplier import psi_robin_symbol


class TestSymbols:
    """Test symbol evaluation and the observable registry."""

    def test_const_broadcasts(self):
        values = const(2.0)(np.zeros((3, 4)), 0.5)
        assert values.shape == (3, 4)
        assert np.all(values == 2.0)

    def test_eta_window_support(self):
        w = eta_window(0.5, 0.2)
        assert w(0.0, 0.5) == pytest.approx(1.0)
        assert w(0.0, 0.75) == 0.0
        assert w.eta_max == pytest.approx(0.7)

    def test_eta_window_reaching_glancing_rejected(self):
        with pytest.raises(ValueError, match="reaches"):
            eta_window(0.8, 0.3)

    def test_parse_product(self):
        a = parse_observable("fourier:2*eta_window:0,0.5", 4.0)
        assert a.name == "fourier:2*eta_window:0,0.5"
        assert a.max_mode == 2
        assert a.eta_max == pytest.approx(0.5)
        assert a(1.0, 0.0) == pytest.approx(math.cos(math.pi))

    def test_parse_defaults(self):
        assert parse_observable("const", 1.0).name == "const"
        assert parse_observable("eta", 1.0)(0.0, 0.3) == pytest.approx(0.3)
        assert parse_observable("eta_window", 1.0).eta_max == pytest.approx(0.75)

    def test_parse_unknown(self):
        with pytest.raises(ValueError, match="unknown observable"):
            parse_observable("wobble:3", 1.0)


class TestMeasures:
    """Test limit states against closed forms."""

    def test_disk_states_of_one(self, disk):
        assert omega(NEUMANN, const(), disk).real == pytest.approx(4.0, rel=1e-12)
        assert omega(DIRICHLET, const(), disk).real == pytest.approx(2.0, rel=1e-12)

    def test_stadium_neumann_state(self, stadium_domain):
        expected = 2 * stadium_domain.length / stadium_domain.area
        assert omega(NEUMANN, const(), stadium_domain).real == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(2.87980, abs=1e-5)

    def test_odd_observables_vanish(self, stadium_domain):
        assert abs(omega(NEUMANN, eta_power(1), stadium_domain)) < 1e-12
        assert abs(omega(DIRICHLET, fourier(1, stadium_domain.length), stadium_domain)) < 1e-12

    def test_psi_robin_zero_alpha_is_neumann(self, disk):
        kind = MeasureKind.for_condition(BoundaryCondition.psi_robin(0.0))
        assert kind.kind is BoundaryKind.PSI_ROBIN
        assert omega(kind, const(), disk).real == pytest.approx(4.0, rel=1e-12)

    def test_psi_robin_needs_multiplier(self):
        with pytest.raises(ValueError):
            MeasureKind(BoundaryKind.PSI_ROBIN)

    def test_density_times_invariant_function(self):
        kind = MeasureKind(BoundaryKind.PSI_ROBIN, k=psi_robin_symbol(2.0))
        s = np.linspace(0, 1, 7)
        eta = np.linspace(-0.9, 0.9, 7)
        for k in (NEUMANN, DIRICHLET, kind):
            assert mu_density(k, s, eta) * invariant_function(k, s, eta) == pytest.approx(1.0)

    def test_projection_of_one(self, stadium_domain):
        """P applied to 1 is (pi / 2) gamma for Neumann."""
        assert c_const(stadium_domain) * omega(NEUMANN, const(), stadium_domain).real == (
            pytest.approx(math.pi / 2)
        )
        p = projection_P(NEUMANN, const(), stadium_domain)
        assert p(0.0, 0.6) == pytest.approx(math.pi / 2 * 0.8)


class TestTransfer:
    """Test transfer operators on their invariant functions."""

    @pytest.mark.parametrize(
        ("kind", "transfer"),
        [(NEUMANN, TransferKind.T), (DIRICHLET, TransferKind.TSTAR)],
    )
    def test_invariant_function_is_fixed(self, stadium_domain, rng, kind, transfer):
        phi = from_function(lambda s, eta: invariant_function(kind, s, eta))
        s = rng.uniform(0, stadium_domain.length, 50)
        eta = rng.uniform(-0.9, 0.9, 50)
        values, ok = transfer_values(transfer, phi, stadium_domain, s, eta)
        assert ok.all()
        assert np.allclose(values.real, invariant_function(kind, s, eta), rtol=1e-9)

    def test_psi_robin_weight_fixes_invariant_function(self, stadium_domain):
        k = psi_robin_symbol(1.5)
        kind = MeasureKind(BoundaryKind.PSI_ROBIN, k=k)
        phi = from_function(lambda s, eta: invariant_function(kind, s, eta))
        q = PhasePoint(1.0, 0.4)
        out = transfer_apply(TransferKind.PSI_ROBIN_WEIGHT, phi, stadium_domain, q, k)
        assert out.valid
        assert out.value.real == pytest.approx(
            float(invariant_function(kind, 1.0, 0.4)), rel=1e-9
        )

    def test_disk_transfer_of_one(self, disk):
        """gamma is conserved on the disk so T leaves constants alone."""
        out = transfer_apply(TransferKind.T, const(), disk, PhasePoint(0.2, 0.3))
        assert out.value == pytest.approx(1.0)

    def test_corner_step_is_invalid(self, square):
        out = transfer_apply(TransferKind.T, const(), square, PhasePoint(0.5, 1 / math.sqrt(5)))
        assert not out.valid
        assert out.value == 0

    def test_ergodic_average_of_invariant_function(self, stadium_domain):
        phi = from_function(lambda s, eta: gamma(eta))
        avg = ergodic_averages(NEUMANN, phi, stadium_domain, [0.3, 2.0], [0.2, -0.5], 25)
        assert np.allclose(avg.values.real, gamma(np.array([0.2, -0.5])), rtol=1e-9)
        assert avg.survival_fraction == 1.0

    def test_single_start_average_on_disk(self, disk):
        """eta = 0.5 rotates by 2 pi / 3, so nine steps of cos s cancel."""
        a = fourier(1, disk.length)
        avg = ergodic_average(NEUMANN, a, disk, PhasePoint(0.0, 0.5), 9)
        assert abs(avg) < 1e-12

    def test_transfer_preserves_weighted_norm(self, stadium_domain):
        lhs, rhs = weighted_norm_mc(
            TransferKind.T, eta_window(0.0, 0.5), stadium_domain, 4000, np.random.default_rng(3)
        )
        assert abs(lhs.mean - rhs.mean) < 5 * (lhs.stderr + rhs.stderr)

    def test_mean_ergodic_distance_decays(self, stadium_domain):
        a = fourier(1, stadium_domain.length)
        short = mean_ergodic_distance(stadium_domain, a, 5, 300, np.random.default_rng(11))
        long = mean_ergodic_distance(stadium_domain, a, 200, 300, np.random.default_rng(11))
        assert long.mean < short.mean / 2
