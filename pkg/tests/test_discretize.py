"""Tests for boundary grids, Nystrom assembly and quantization."""

import math
import tempfile
from pathlib import Path

import numpy as np
import pytest

from qelab.classical import const, eta_power, fourier
from qelab.discretize import (
    OperatorKind,
    adjoint,
    assemble,
    dump_matrix,
    interpolate_trace,
    kress_weights,
    make_grid,
    matrix_element,
    multiplier_matrix,
    quantize,
    refine_grid,
    uniform_grid,
)
from qelab.errors import ResourceLimitError, UnsupportedConfigurationError


class TestGrids:
    """Test node counts, weights and refinement."""

    def test_uniform_node_count(self, disk):
        grid = make_grid(disk, 10, 20.0)
        assert grid.uniform
        assert grid.n == 200
        assert grid.weights.sum() == pytest.approx(disk.length)
        assert grid.points_per_wavelength(20.0) == pytest.approx(10.0)

    def test_minimum_nodes(self, disk):
        assert make_grid(disk, 10, 0.5).n == 64

    def test_explicit_nodes(self, disk):
        assert make_grid(disk, 10, 5.0, nodes=90).n == 90

    def test_low_ppw_rejected(self, disk):
        with pytest.raises(ValueError):
            make_grid(disk, 5.9, 10.0)

    def test_resource_limit(self, disk):
        with pytest.raises(ResourceLimitError):
            make_grid(disk, 10, 1000.0, max_nodes=512)

    def test_panel_grid_on_corners(self, square):
        grid = make_grid(square, 10, 10.0)
        assert not grid.uniform
        assert grid.n % 16 == 0
        assert grid.weights.sum() == pytest.approx(4.0, rel=1e-8)
        x = grid.samples.position[:, 0]
        assert np.sum(grid.weights * x) == pytest.approx(2.0, rel=1e-8)

    def test_refine(self, disk, square):
        assert refine_grid(uniform_grid(disk, 64), 2).n == 128
        coarse = make_grid(square, 10, 5.0)
        fine = refine_grid(coarse, 2)
        assert len(fine.panels) == 2 * len(coarse.panels)
        with pytest.raises(ValueError):
            refine_grid(coarse, 0)

    def test_interpolate_uniform(self, disk):
        coarse = uniform_grid(disk, 64)
        fine = refine_grid(coarse, 2)
        u = np.cos(2 * coarse.s)
        assert np.allclose(interpolate_trace(coarse, fine, u), np.cos(2 * fine.s), atol=1e-12)

    def test_interpolate_panels(self, square):
        coarse = make_grid(square, 10, 5.0)
        fine = refine_grid(coarse, 2)
        u = np.sin(coarse.s)
        assert np.allclose(interpolate_trace(coarse, fine, u), np.sin(fine.s), atol=1e-6)

    def test_interpolate_mixed_types(self, disk, square):
        with pytest.raises(UnsupportedConfigurationError):
            interpolate_trace(uniform_grid(disk, 64), make_grid(square, 10, 5.0), np.zeros(64))


class TestKress:
    """Test the periodic log-quadrature weights."""

    def test_odd_rejected(self):
        with pytest.raises(ValueError):
            kress_weights(63)

    def test_integrates_log_times_cosine(self):
        n = 32
        t = 2 * math.pi * np.arange(n) / n
        r = kress_weights(n)
        assert r.sum() == pytest.approx(0.0, abs=1e-12)
        assert np.sum(r * np.cos(t)) == pytest.approx(-2 * math.pi)


class TestAssemble:
    """Test the discretised layer operators."""

    def test_double_layer_reproduces_constants(self, disk):
        """F 1 tends to 1 as lam -> 0 on a smooth boundary."""
        grid = uniform_grid(disk, 64)
        f = assemble(OperatorKind.F, 1e-3, grid)
        assert np.allclose(f @ np.ones(grid.n), 1.0, atol=1e-4)

    def test_fstar_is_weighted_adjoint(self, square):
        grid = make_grid(square, 10, 4.0)
        f = assemble("F", 4.0, grid)
        fs = assemble("Fstar", 4.0, grid)
        assert np.allclose(fs.entries, adjoint(f.entries, grid.weights))

    def test_adjoint_identity(self, square, rng):
        grid = make_grid(square, 10, 4.0)
        a = rng.normal(size=(grid.n, grid.n)) + 1j * rng.normal(size=(grid.n, grid.n))
        u = rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n)
        v = rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n)
        lhs = grid.inner(adjoint(a, grid.weights) @ u, v)
        rhs = grid.inner(u, a @ v)
        assert lhs == pytest.approx(rhs)

    def test_robin_combination(self, disk):
        grid = uniform_grid(disk, 64)
        f = assemble("F", 3.0, grid).entries
        e = assemble("E", 3.0, grid).entries
        robin = assemble("robin", 3.0, grid, param=2.0)
        assert np.allclose(robin.entries, f - 2.0 * e)
        assert robin.param == 2.0

    def test_multiplier_on_fourier_mode(self, disk):
        grid = uniform_grid(disk, 64)
        k = multiplier_matrix(0.5, grid)
        v = np.cos(3 * grid.s)
        assert np.allclose(k @ v, 1.5 * v, atol=1e-12)

    def test_multiplier_needs_uniform_grid(self, square):
        with pytest.raises(UnsupportedConfigurationError):
            assemble("psirobin", 4.0, make_grid(square, 10, 4.0), param=1.0)

    def test_matrix_element_shape(self, disk):
        op = assemble("E", 2.0, uniform_grid(disk, 64))
        with pytest.raises(ValueError):
            matrix_element(op, np.ones(10), np.ones(64))

    def test_dump_matrix(self, disk):
        op = assemble("F", 2.0, uniform_grid(disk, 64))
        with tempfile.TemporaryDirectory() as tmpdir:
            path = dump_matrix(op, Path(tmpdir) / "sub" / "F.c16")
            raw = np.fromfile(path, dtype="<c16").reshape(64, 64)
        assert np.array_equal(raw, op.entries)


class TestQuantize:
    """Test the quantization of boundary symbols."""

    def test_const_is_identity(self, disk):
        op = quantize(const(), 10.0, uniform_grid(disk, 64))
        assert np.allclose(op.entries, np.eye(64), atol=1e-12)

    def test_multiplication_symbol(self, disk):
        grid = uniform_grid(disk, 64)
        op = quantize(fourier(1, disk.length), 10.0, grid)
        assert np.allclose(op.entries, np.diag(np.cos(grid.s)), atol=1e-12)

    def test_momentum_symbol_on_exponential(self, disk):
        grid = uniform_grid(disk, 64)
        op = quantize(eta_power(1), 10.0, grid)
        v = np.exp(3j * grid.s)
        assert np.allclose(op @ v, 0.3 * v, atol=1e-12)
        assert op.label == "eta^1"

    def test_panel_grid_multiplication_only(self, square):
        grid = make_grid(square, 10, 4.0)
        op = quantize(fourier(1, square.length), 4.0, grid)
        assert np.allclose(np.diag(op.entries), np.cos(2 * math.pi * grid.s / 4.0))
        with pytest.raises(UnsupportedConfigurationError):
            quantize(eta_power(1), 4.0, grid)
