"""Tests for Bessel wrappers and the Helmholtz layer kernels."""

import math

import numpy as np
import pytest
from scipy import special

from qelab.errors import DiagonalError, SingularityError
from qelab.geometry import boundary_point, boundary_points
from qelab.kernels import (
    E_kernel,
    F_kernel,
    PairGeometry,
    Wavenumber,
    bessel,
    double_layer_matrix,
    f_split,
    green0,
    green0_matrix,
    helmholtz_fd_residual,
    multiplier_eigenvalues,
    psi_robin_symbol,
)
from qelab.kernels.layers import e_diagonal


class TestSpecial:
    """Test the validated Bessel wrappers."""

    def test_values_at_zero(self):
        assert bessel("J0", 0.0) == pytest.approx(1.0)
        assert bessel("J1", 0.0) == pytest.approx(0.0)

    def test_first_zero(self):
        assert abs(bessel("J0", 2.404825557695773)) < 1e-14

    def test_negative_argument(self):
        with pytest.raises(ValueError):
            bessel("J1", [-1.0, 1.0])

    def test_y_singular_at_zero(self):
        with pytest.raises(SingularityError):
            bessel("Y0", [0.0, 1.0])


class TestGreen:
    """Test the free-space Green function."""

    def test_wavenumber_positive(self):
        assert Wavenumber(4.0).h == pytest.approx(0.25)
        with pytest.raises(ValueError):
            Wavenumber(0.0)

    def test_coincident_points(self):
        with pytest.raises(DiagonalError):
            green0(2.0, [0.1, 0.2], [0.1, 0.2])

    def test_value(self):
        expected = 0.25j * (special.j0(3.0) + 1j * special.y0(3.0))
        assert green0(3.0, [1.0, 0.0], [0.0, 0.0]).value == pytest.approx(expected)

    def test_solves_helmholtz(self):
        """G0 is annihilated by Delta + lam^2 away from the source."""
        lam = 3.0

        def field(z):
            return green0_matrix(lam, z, np.zeros((1, 2)))[:, 0]

        res = helmholtz_fd_residual(field, [[0.7, 0.2], [-0.4, 0.9]], lam, 1e-3)
        assert np.all(res < 1e-4)


class TestLayerKernels:
    """Test F and E, their diagonals and their Nystrom splits."""

    def test_f_diagonal_is_curvature(self, disk):
        y = boundary_point(disk, 1.0)
        assert F_kernel(5.0, y, y).value == pytest.approx(1 / (2 * math.pi))

    def test_f_continuous_at_diagonal(self, disk):
        y = boundary_point(disk, 1.0)
        yp = boundary_point(disk, 1.0 + 1e-4)
        assert F_kernel(5.0, y, yp).value == pytest.approx(1 / (2 * math.pi), abs=1e-3)

    def test_f_undefined_at_corner(self, square):
        y = boundary_point(square, 1.0)
        with pytest.raises(DiagonalError):
            F_kernel(5.0, y, y)

    def test_f_uses_normal_at_first_point(self, stadium_domain):
        """F(y, y') = -(i lam / 2) H1(lam r) nu_y . (y - y') / r."""
        lam = 4.0
        y = boundary_point(stadium_domain, 0.5)
        yp = boundary_point(stadium_domain, 3.0)
        d = y.position - yp.position
        r = float(np.hypot(*d))
        h1 = special.j1(lam * r) + 1j * special.y1(lam * r)
        expected = -0.5j * lam * h1 * float(y.normal @ d) / r
        assert F_kernel(lam, y, yp).value == pytest.approx(expected)
        assert F_kernel(lam, yp, y).value != pytest.approx(expected)

    def test_f_vanishes_on_flat_side(self, square):
        y = boundary_point(square, 0.2)
        yp = boundary_point(square, 0.7)
        assert F_kernel(3.0, y, yp).value == 0

    def test_f_is_twice_double_layer(self, stadium_domain):
        """The double layer with source y' and target y is F(y', y) / 2."""
        y = boundary_point(stadium_domain, 0.5)
        yp = boundary_point(stadium_domain, 3.0)
        dl = double_layer_matrix(4.0, y.position[None], yp.position[None], yp.normal[None])
        assert F_kernel(4.0, yp, y).value == pytest.approx(2 * dl[0, 0])

    def test_f_split_matches_pointwise(self, stadium_domain):
        samples = boundary_points(stadium_domain, np.linspace(0, stadium_domain.length, 9)[:-1])
        split = f_split(6.0, PairGeometry(samples))
        for i, j in [(0, 3), (2, 7), (5, 1)]:
            assert split.full[i, j] == pytest.approx(F_kernel(6.0, samples[j], samples[i]).value)
        assert np.allclose(split.diag_smooth, samples.curvature / (2 * math.pi))

    def test_e_split_reassembles(self, disk):
        y = boundary_point(disk, 0.4)
        yp = boundary_point(disk, 2.1)
        smooth, logcoef = E_kernel(3.0, y, yp, disk.length)
        ref = math.log(4 * math.sin(math.pi * (0.4 - 2.1) / disk.length) ** 2)
        r = float(np.hypot(*(y.position - yp.position)))
        full = 0.5j * (special.j0(3.0 * r) + 1j * special.y0(3.0 * r))
        assert smooth + logcoef * ref == pytest.approx(full)

    def test_e_diagonal_limit(self):
        lam, r = 2.5, 1e-6
        full = 0.5j * (special.j0(lam * r) + 1j * special.y0(lam * r))
        logcoef = -special.j0(lam * r) / (2 * math.pi)
        assert full - logcoef * math.log(r * r) == pytest.approx(e_diagonal(lam), abs=1e-8)


class TestMultiplier:
    """Test the tangential multiplier of the Psi1-Robin condition."""

    def test_eigenvalues(self):
        values = multiplier_eigenvalues(2.0, 8, 2 * math.pi)
        assert values.tolist() == pytest.approx([0, 2, 4, 6, 8, 6, 4, 2])

    def test_symbol(self):
        assert psi_robin_symbol(3.0)(0.0, -0.5) == pytest.approx(1.5)
        with pytest.raises(ValueError):
            psi_robin_symbol(-1.0)
