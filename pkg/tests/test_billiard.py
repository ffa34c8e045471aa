"""Tests for the billiard map, orbits and averages."""

import math

import numpy as np
import pytest

from qelab.billiard import (
    STEP_CORNER,
    STEP_INTERIOR,
    HitCorner,
    Interior,
    PhasePoint,
    StepStatus,
    Tangential,
    billiard_inverse,
    billiard_map,
    billiard_step,
    birkhoff_average,
    gamma,
    generating_check,
    ks_invariance,
    lift,
    orbit,
    orbit_ensemble,
)
from qelab.errors import TangentialError


def circular_gap(a: float, b: float, length: float) -> float:
    d = abs(a - b) % length
    return min(d, length - d)


class TestLift:
    """Test the inward lift of phase points."""

    def test_gamma(self):
        assert gamma(np.array([0.0, 0.6, 1.0])) == pytest.approx([1.0, 0.8, 0.0])

    def test_lift_is_unit_and_inward(self, disk):
        v = lift(disk, PhasePoint(0.0, 0.6))
        assert np.hypot(*v) == pytest.approx(1.0)
        assert v == pytest.approx([-0.8, 0.6])

    def test_tangential_lift_rejected(self, disk):
        with pytest.raises(TangentialError):
            lift(disk, PhasePoint(1.0, 1.0))


class TestDiskMap:
    """On the disk the map is a rotation by 2 arccos(eta) and eta is conserved."""

    @pytest.mark.parametrize("eta", [-0.7, 0.0, 0.5, 0.9])
    def test_rotation(self, disk, eta):
        out = billiard_map(disk, PhasePoint(0.3, eta))
        assert isinstance(out, Interior)
        expected = 0.3 + 2 * math.acos(eta)
        assert circular_gap(out.point.s, expected, disk.length) < 1e-10
        assert out.point.eta == pytest.approx(eta, abs=1e-10)

    def test_orbit_conserves_eta(self, disk):
        orb = orbit(disk, PhasePoint(0.0, 0.5), 50)
        assert orb.reason is StepStatus.COMPLETED
        assert orb.steps == 50
        assert np.max(np.abs(orb.eta - 0.5)) < 1e-10
        assert circular_gap(orb.s[1], 2 * math.pi / 3, disk.length) < 1e-10
        assert circular_gap(orb.s[3], 0.0, disk.length) < 1e-9

    def test_birkhoff_of_eta(self, disk):
        result = birkhoff_average(disk, PhasePoint(1.0, 0.4), lambda s, eta: eta, 100)
        assert not result.truncated
        assert result.value.real == pytest.approx(0.4, abs=1e-9)


class TestSquareMap:
    """Test reflections and corner handling on the unit square."""

    def test_edge_bounce(self, square):
        eta = 1 / math.sqrt(2)
        out = billiard_map(square, PhasePoint(0.5, eta))
        assert isinstance(out, Interior)
        assert out.point.s == pytest.approx(1.5)
        assert out.point.eta == pytest.approx(eta)

    def test_corner_terminates(self, square):
        eta = 1 / math.sqrt(5)
        out = billiard_map(square, PhasePoint(0.5, eta))
        assert isinstance(out, HitCorner)
        assert out.s == pytest.approx(2.0)
        orb = orbit(square, PhasePoint(0.5, eta), 10)
        assert orb.reason is StepStatus.CORNER
        assert orb.steps == 0
        assert orb.corner_s == pytest.approx(2.0)

    def test_tangential_start(self, square):
        assert isinstance(billiard_map(square, PhasePoint(0.5, 1.0)), Tangential)

    def test_batch_status(self, square):
        s, eta, status = billiard_step(square, [0.5, 0.5], [1 / math.sqrt(2), 1 / math.sqrt(5)])
        assert status.tolist() == [STEP_INTERIOR, STEP_CORNER]
        assert s[0] == pytest.approx(1.5)
        assert np.isnan(eta[1])


class TestStadiumMap:
    """Test map identities on a corner-free chaotic domain."""

    def test_inverse_undoes_forward(self, stadium_domain, rng):
        for s, eta in zip(rng.uniform(0, stadium_domain.length, 20), rng.uniform(-0.9, 0.9, 20)):
            out = billiard_map(stadium_domain, PhasePoint(float(s), float(eta)))
            assert isinstance(out, Interior)
            back = billiard_inverse(stadium_domain, out.point)
            assert isinstance(back, Interior)
            assert circular_gap(back.point.s, s, stadium_domain.length) < 1e-9
            assert back.point.eta == pytest.approx(eta, abs=1e-9)

    def test_generating_function(self, stadium_domain):
        assert generating_check(stadium_domain, PhasePoint(1.2, 0.3)) < 1e-10

    def test_ensemble_shapes(self, stadium_domain):
        ens = orbit_ensemble(stadium_domain, [0.5, 1.5, 2.5], [0.1, -0.2, 0.3], 15)
        assert ens.s.shape == (16, 3)
        assert ens.n_starts == 3
        assert ens.survival_fraction == 1.0

    def test_uniform_invariance(self, stadium_domain):
        """Pooled iterates of uniform starts stay uniform in s and eta."""
        ks_s, ks_eta = ks_invariance(stadium_domain, 300, 10, np.random.default_rng(7))
        assert ks_s < 0.08
        assert ks_eta < 0.08
