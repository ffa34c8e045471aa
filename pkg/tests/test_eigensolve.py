"""Tests for the eigenvalue search, traces, normalisation and audits."""

import math

import numpy as np
import pytest
from scipy import special

from qelab.conditions import BoundaryCondition
from qelab.discretize import make_grid, uniform_grid
from qelab.eigensolve import (
    Eigenpair,
    GridPolicy,
    NormMethod,
    SolverOptions,
    audit_weyl,
    bc_residual,
    characteristic_matrix,
    default_step,
    expand_multiplicity,
    group_clusters,
    interior_field,
    interior_quadrature,
    is_star_shaped,
    mean_spacing,
    neumann_zero_mode,
    normalize_interior,
    null_traces,
    operator_residual,
    oracle_disk_eigenvalues,
    polar_gram,
    scan,
    scan_and_refine,
    sigma_min,
    solve_spectrum,
    tensor_quadrature,
    weyl_count,
)
from qelab.errors import MissingEigenvalueError
from qelab.geometry import centroid

NEUMANN = BoundaryCondition.neumann()
DIRICHLET = BoundaryCondition.dirichlet()

J_PRIME_11 = 1.841183781340659
J_PRIME_21 = 3.054236928227140
J_11 = 3.831705970207512


@pytest.fixture(scope="module")
def disk_grid():
    from qelab.geometry import unit_disk

    return uniform_grid(unit_disk(), 64)


@pytest.fixture(scope="module")
def dirichlet_disk():
    from qelab.geometry import unit_disk

    return solve_spectrum(unit_disk(), DIRICHLET, 2.0, 6.0)


@pytest.fixture(scope="module")
def neumann_disk():
    from qelab.geometry import unit_disk

    return solve_spectrum(unit_disk(), NEUMANN, 1.0, 4.0, include_zero_mode=True)


class TestWeyl:
    """Test counting functions and the completeness audit."""

    def test_two_term_count(self, disk):
        assert weyl_count(disk, NEUMANN, 4.0) == pytest.approx(4.0 + 2.0)
        assert weyl_count(disk, DIRICHLET, 4.0) == pytest.approx(4.0 - 2.0)

    def test_spacing_and_step(self, disk):
        assert mean_spacing(disk, 10.0) == pytest.approx(0.2)
        assert default_step(disk, 10.0) == pytest.approx(0.1)

    def test_empty_spectrum_flagged(self, stadium_domain):
        audit = audit_weyl(stadium_domain, NEUMANN, [], 0.5, 20.0)
        assert not audit.passed
        assert len(audit.windows) > 1
        assert all(w.deficit > 0 for w in audit.flagged)
        count = weyl_count(stadium_domain, NEUMANN, np.array([0.5, 20.0]))
        predicted = count[1] - count[0]
        assert audit.total_predicted == pytest.approx(float(predicted))

    def test_oracle_dirichlet(self):
        lams = expand_multiplicity(oracle_disk_eigenvalues(DIRICHLET, 6.0))
        j_01, j_21, j_02 = 2.404825557695773, 5.135622301840683, 5.520078110286311
        expected = [j_01, J_11, J_11, j_21, j_21, j_02]
        assert lams == pytest.approx(expected)

    def test_oracle_neumann_skips_zero(self):
        modes = oracle_disk_eigenvalues(NEUMANN, 4.0)
        assert modes[0].lam == pytest.approx(J_PRIME_11)
        assert modes[0].multiplicity == 2
        assert len(expand_multiplicity(modes)) == 5

    def test_oracle_robin(self):
        modes = oracle_disk_eigenvalues(BoundaryCondition.robin(1.0), 2.0)
        assert modes[0].m == 0
        assert modes[0].lam == pytest.approx(1.2558, abs=1e-4)

    def test_oracle_radius_scaling(self):
        unit = oracle_disk_eigenvalues(DIRICHLET, 6.0)
        half = oracle_disk_eigenvalues(DIRICHLET, 12.0, radius=0.5)
        assert [d.lam for d in half] == pytest.approx([2 * d.lam for d in unit])

    def test_oracle_robin_radius_scaling(self):
        """kappa on radius R matches kappa R on the unit disk, scaled by 1 / R."""
        unit = oracle_disk_eigenvalues(BoundaryCondition.robin(0.5), 5.0)
        half = oracle_disk_eigenvalues(BoundaryCondition.robin(1.0), 10.0, radius=0.5)
        assert [d.m for d in half] == [d.m for d in unit]
        assert [d.lam for d in half] == pytest.approx([2 * d.lam for d in unit])


class TestCharacteristicMatrix:
    """Test sigma_min at known disk eigenvalues."""

    def test_neumann_zero(self, disk_grid):
        assert sigma_min(NEUMANN, J_PRIME_21, disk_grid) < 1e-7
        assert sigma_min(NEUMANN, 3.5, disk_grid) > 0.05

    def test_dirichlet_zero(self, disk_grid):
        assert sigma_min(DIRICHLET, J_11, disk_grid) < 1e-7

    @pytest.mark.parametrize("bc", [BoundaryCondition.robin(1.0), BoundaryCondition.psi_robin(0.5)])
    def test_robin_families(self, disk_grid, bc):
        modes = [d for d in oracle_disk_eigenvalues(bc, 5.0) if d.m == 1]
        assert modes
        assert sigma_min(bc, modes[0].lam, disk_grid) < 1e-7

    def test_label(self, disk_grid):
        matrix = characteristic_matrix(BoundaryCondition.robin(2.0), 3.0, disk_grid)
        assert matrix.label == "robin:2"

    def test_double_null_space(self, disk_grid):
        matrix = characteristic_matrix(NEUMANN, J_PRIME_11, disk_grid)
        sigmas, vecs = null_traces(matrix, SolverOptions())
        assert len(sigmas) == 2
        assert vecs.shape == (2, 64)

    def test_scan_brackets_root(self, disk_grid):
        sc = scan(NEUMANN, disk_grid, 2.9, 3.2, 0.02)
        assert sc.step == pytest.approx(0.02)
        assert any(abs(sc.lams[k] - J_PRIME_21) < 0.02 for k in sc.minima)

    def test_random_trace_fails_extinction(self, disk_grid, rng):
        trace = rng.normal(size=64) + 0j
        pair = Eigenpair(lam=3.5, bc=NEUMANN, grid=disk_grid, trace=trace)
        assert bc_residual(pair) > 1e-2


class TestSolveSpectrum:
    """End-to-end solves on the disk against Bessel zeros."""

    def test_dirichlet_eigenvalues(self, dirichlet_disk):
        expected = expand_multiplicity(oracle_disk_eigenvalues(DIRICHLET, 6.0))
        expected = [x for x in expected if x > 2.0]
        assert len(dirichlet_disk) == len(expected)
        assert np.max(np.abs(dirichlet_disk.lams - expected)) < 1e-6
        assert dirichlet_disk.audit is not None and dirichlet_disk.audit.passed

    def test_dirichlet_residuals_and_indices(self, dirichlet_disk):
        for k, p in enumerate(dirichlet_disk.pairs, start=1):
            assert p.index == k
            assert p.normalized
            assert p.residuals.operator_res < 1e-6
            assert p.residuals.pde_res < 1e-4
            assert p.residuals.bc_res < 1e-3

    def test_dirichlet_trace_norm_is_rellich(self, dirichlet_disk):
        """On the unit disk the normal-derivative trace has squared norm 2 lam^2."""
        for p in dirichlet_disk.pairs:
            assert p.trace_norm_sq == pytest.approx(2 * p.lam**2, rel=1e-5)

    def test_degenerate_cluster(self, dirichlet_disk):
        pairs = [p for p in dirichlet_disk.pairs if abs(p.lam - J_11) < 1e-6]
        assert len(pairs) == 2
        assert all(p.cluster == 2 for p in pairs)
        gram = polar_gram(pairs)
        assert abs(gram[0, 1]) < 1e-3

    def test_radial_mode_field(self, dirichlet_disk):
        """The first mode is J0(lam r) / (sqrt(pi) |J1(lam)|)."""
        first = dirichlet_disk.pairs[0]
        values = interior_field(first, [[0.0, 0.0], [0.5, 0.0]])
        expected = 1.0 / (math.sqrt(math.pi) * abs(special.j1(first.lam)))
        assert abs(values[0]) == pytest.approx(expected, rel=1e-3)
        assert (values[1] / values[0]).real == pytest.approx(special.j0(0.5 * first.lam), abs=1e-4)

    def test_polar_normalisation_undoes_scaling(self, dirichlet_disk):
        first = dirichlet_disk.pairs[0]
        scaled = first.with_(trace=3.0 * first.trace, normalized=False)
        out = normalize_interior(scaled, NormMethod.POLAR)
        assert out.normalized
        assert out.trace_norm_sq == pytest.approx(first.trace_norm_sq, rel=1e-2)

    def test_candidates_are_unfiltered(self, disk):
        pairs = scan_and_refine(
            disk, DIRICHLET, 2.0, 3.0, GridPolicy(nodes=64), SolverOptions(step=0.05)
        )
        near = [p for p in pairs if abs(p.lam - 2.404825557695773) < 1e-6]
        assert len(near) == 1
        assert not near[0].normalized
        assert near[0].residuals.bc_res < 1e-3

    def test_neumann_trace_norms(self, neumann_disk):
        zero = neumann_disk.pairs[0]
        assert zero.lam == 0.0 and zero.analytic and zero.index == 1
        assert zero.trace_norm_sq == pytest.approx(2.0)
        first = neumann_disk.pairs[1]
        assert first.lam == pytest.approx(J_PRIME_11, abs=1e-6)
        assert first.trace_norm_sq == pytest.approx(2 / (1 - 1 / J_PRIME_11**2), rel=1e-5)

    def test_neumann_count(self, neumann_disk):
        assert len(neumann_disk) == 6
        assert operator_residual(neumann_disk.pairs[0]) == 0.0

    def test_phase_convention(self, neumann_disk):
        for p in neumann_disk.pairs:
            k = int(np.argmax(np.abs(p.trace)))
            assert abs(p.trace[k].imag) < 1e-12
            assert p.trace[k].real > 0

    def test_residual_limits_drop_pairs(self, disk):
        """Pairs above the operator residual limit are dropped, not returned."""
        loose = solve_spectrum(disk, DIRICHLET, 2.0, 3.0, GridPolicy(nodes=64))
        assert len(loose) == 1
        options = SolverOptions(operator_tolerance=1e-30)
        strict = solve_spectrum(disk, DIRICHLET, 2.0, 3.0, GridPolicy(nodes=64), options)
        assert len(strict) == 0
        assert strict.rejected == loose.rejected + 1

    def test_pde_limit_drops_pairs(self, disk):
        options = SolverOptions(pde_tolerance=1e-30)
        spec = solve_spectrum(disk, DIRICHLET, 2.0, 3.0, GridPolicy(nodes=64), options)
        assert len(spec) == 0
        assert spec.rejected >= 1

    def test_bad_range(self, disk):
        with pytest.raises(ValueError):
            solve_spectrum(disk, NEUMANN, 0.0, 4.0)
        with pytest.raises(ValueError):
            solve_spectrum(disk, NEUMANN, 4.0, 3.0)

    def test_strict_audit_raises_on_deficit(self, stadium_domain):
        """A threshold no minimum can meet leaves every window short."""
        options = SolverOptions(accept_sigma=1e-14, strict_audit=True)
        with pytest.raises(MissingEigenvalueError):
            solve_spectrum(stadium_domain, NEUMANN, 8.0, 9.0, GridPolicy(nodes=96), options)


class TestHelpers:
    """Test clustering, the zero mode and interior quadrature."""

    def test_group_clusters(self, disk_grid):
        pairs = [
            Eigenpair(lam=lam, bc=NEUMANN, grid=disk_grid, trace=np.zeros(64, complex))
            for lam in (3.0, 1.0, 1.0 + 1e-8, 2.0)
        ]
        groups = group_clusters(pairs, 1e-6)
        assert [len(g) for g in groups] == [2, 1, 1]
        assert groups[0][0].lam == 1.0

    def test_zero_mode(self, disk_grid):
        p = neumann_zero_mode(disk_grid)
        assert p.trace[0] == pytest.approx(1 / math.sqrt(math.pi))

    def test_polar_area(self, disk, square, stadium_domain):
        for domain in (disk, square, stadium_domain):
            grid = make_grid(domain, 10, 5.0)
            quad = interior_quadrature(domain, grid, 5.0)
            assert quad.kind == "polar"
            assert quad.area == pytest.approx(domain.area, rel=1e-6)

    def test_star_shaped(self, stadium_domain):
        assert is_star_shaped(stadium_domain, centroid(stadium_domain))

    def test_tensor_area(self, square):
        assert tensor_quadrature(square, 100).area == pytest.approx(1.0, rel=0.05)


@pytest.mark.slow
class TestStadiumSpectrum:
    """Acceptance-scale stadium solve."""

    def test_neumann_audit(self, stadium_domain):
        spec = solve_spectrum(stadium_domain, NEUMANN, 0.5, 20.0)
        assert spec.audit is not None and spec.audit.passed
        assert all(p.residuals.operator_res < 1e-6 for p in spec.pairs)


@pytest.mark.slow
class TestOracleSpectrum:
    """Full solves against closed-form spectra."""

    @pytest.mark.parametrize("bc", [NEUMANN, DIRICHLET], ids=["neumann", "dirichlet"])
    def test_disk_to_twenty(self, disk, bc):
        spec = solve_spectrum(disk, bc, 0.5, 20.0, GridPolicy(nodes=512))
        expected = np.array(
            [lam for lam in expand_multiplicity(oracle_disk_eigenvalues(bc, 20.0)) if lam > 0.5]
        )
        assert len(spec) == len(expected)
        assert np.max(np.abs(spec.lams - expected) / expected) < 1e-6

    def test_square_dirichlet(self, square):
        spec = solve_spectrum(square, DIRICHLET, 4.0, 8.0)
        expected = [math.pi * math.sqrt(2.0), math.pi * math.sqrt(5.0), math.pi * math.sqrt(5.0)]
        assert spec.lams == pytest.approx(expected, rel=1e-6)
