"""Tests for domain construction, boundary evaluation and ray casting."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from qelab.errors import ArclengthRangeError, DomainConstructionError
from qelab.geometry import (
    ArcSpec,
    CornerHit,
    RayHit,
    boundary_point,
    boundary_points,
    build_domain,
    centroid,
    contains,
    distance_to_boundary,
    polygon,
    radial_extent,
    ray_first_hit,
)


class TestBuildDomain:
    """Test arc-list validation and derived quantities."""

    def test_disk_length_and_area(self, disk):
        """Unit disk has L = 2 pi, A = pi and no corners."""
        assert disk.length == pytest.approx(2 * math.pi, rel=1e-14)
        assert disk.area == pytest.approx(math.pi, rel=1e-12)
        assert not disk.has_corners

    def test_stadium_length_and_area(self, stadium_domain):
        """Stadium (a=1, r=1) has L = 4 + 2 pi and A = 4 + pi."""
        assert stadium_domain.length == pytest.approx(4 + 2 * math.pi, rel=1e-13)
        assert stadium_domain.area == pytest.approx(4 + math.pi, rel=1e-12)
        assert not stadium_domain.has_corners

    def test_square_corners(self, square):
        """Unit square has four corners at integer arclengths."""
        assert square.length == pytest.approx(4.0)
        assert square.area == pytest.approx(1.0)
        assert np.allclose(sorted(square.corners), [0.0, 1.0, 2.0, 3.0])

    def test_open_chain_rejected(self):
        """Arcs that do not close up raise."""
        specs = [ArcSpec.segment((0, 0), (1, 0)), ArcSpec.segment((1, 0), (1, 1))]
        with pytest.raises(DomainConstructionError):
            build_domain(specs)

    def test_clockwise_rejected(self):
        """A clockwise polygon has negative area and is refused."""
        with pytest.raises(DomainConstructionError, match="counterclockwise"):
            polygon([(0, 0), (0, 1), (1, 1), (1, 0)])

    def test_negative_radius_rejected(self):
        """Radius must be positive."""
        with pytest.raises(ValidationError):
            ArcSpec.circle((0, 0), -1.0, 0.0, 2 * math.pi)


class TestBoundaryEvaluation:
    """Test positions, frames and arclength checks."""

    def test_disk_frame_at_zero(self, disk):
        """At s = 0 the unit disk has tangent (0, 1) and inward normal (-1, 0)."""
        bp = boundary_point(disk, 0.0)
        assert np.allclose(bp.position, [1.0, 0.0])
        assert np.allclose(bp.tangent, [0.0, 1.0])
        assert np.allclose(bp.normal, [-1.0, 0.0])
        assert bp.curvature == pytest.approx(1.0)

    def test_vectorised_matches_scalar(self, stadium_domain):
        """boundary_points agrees with boundary_point."""
        s = np.linspace(0.1, stadium_domain.length - 0.1, 17)
        batch = boundary_points(stadium_domain, s)
        for i, si in enumerate(s):
            bp = boundary_point(stadium_domain, float(si))
            assert np.allclose(batch.position[i], bp.position)
            assert np.allclose(batch.normal[i], bp.normal)

    def test_square_corner_flag(self, square):
        """Arclengths at a corner are flagged."""
        assert boundary_point(square, 1.0).at_corner
        assert not boundary_point(square, 0.5).at_corner

    @pytest.mark.parametrize("s", [-0.1, 4.0, 7.5])
    def test_out_of_range(self, square, s):
        """Arclength outside [0, L) raises."""
        with pytest.raises(ArclengthRangeError):
            boundary_point(square, s)


class TestRays:
    """Test first-hit ray casting."""

    def test_square_edge_hit(self, square):
        """From (0, 0.5) along (1, 1)/sqrt2 the ray meets the top edge at x = 0.5."""
        hit = ray_first_hit(square, [0.0, 0.5], np.array([1.0, 1.0]) / math.sqrt(2))
        assert isinstance(hit, RayHit)
        assert hit.s_hit == pytest.approx(2.5)
        assert hit.t_hit == pytest.approx(math.sqrt(2) / 2)

    def test_square_corner_hit(self, square):
        """From (0, 0.5) along (2, 1)/sqrt5 the ray lands in the corner (1, 1)."""
        hit = ray_first_hit(square, [0.0, 0.5], np.array([2.0, 1.0]) / math.sqrt(5))
        assert isinstance(hit, CornerHit)
        assert hit.s == pytest.approx(2.0)

    def test_disk_chord(self, disk):
        """A diameter has length 2."""
        hit = ray_first_hit(disk, [1.0, 0.0], [-1.0, 0.0])
        assert isinstance(hit, RayHit)
        assert hit.t_hit == pytest.approx(2.0)
        assert hit.s_hit == pytest.approx(math.pi)

    def test_radial_extent_disk(self, disk):
        """From the centre every direction reaches distance 1."""
        theta = np.linspace(0.1, 2 * math.pi - 0.1, 9)
        dirs = np.column_stack([np.cos(theta), np.sin(theta)])
        t, s = radial_extent(disk, [0.0, 0.0], dirs)
        assert np.allclose(t, 1.0)
        assert np.allclose(s, theta)


class TestInteriorQueries:
    """Test inside tests, distances and centroids."""

    def test_contains(self, stadium_domain):
        pts = np.array([[0.0, 0.0], [1.9, 0.0], [0.0, 1.5], [2.5, 0.0]])
        assert contains(stadium_domain, pts).tolist() == [True, True, False, False]

    def test_distance(self, disk):
        d = distance_to_boundary(disk, [[0.0, 0.0], [0.5, 0.0]])
        assert np.allclose(d, [1.0, 0.5])

    def test_centroid(self, stadium_domain, square):
        assert np.allclose(centroid(stadium_domain), [0.0, 0.0], atol=1e-12)
        assert np.allclose(centroid(square), [0.5, 0.5], atol=1e-12)
