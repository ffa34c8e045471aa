"""Tests for the configuration module."""

import math
import os
import tempfile
from pathlib import Path
from unittest.mock import patch

import pytest

from qelab.config import (
    Settings,
    bundled_domain,
    load_settings,
    parse_angle,
    parse_config,
    parse_config_text,
    resolve_domain_path,
)
from qelab.conditions import BoundaryKind
from qelab.errors import ConfigError

SQUARE_YAML = """\
domain:
  name: square
  arcs:
    - kind: line-segment
      endpoints: [[0, 0], [1, 0]]
    - kind: line-segment
      endpoints: [[1, 0], [1, 1]]
    - kind: line-segment
      endpoints: [[1, 1], [0, 1]]
    - kind: line-segment
      endpoints: [[0, 1], [0, 0]]
run:
  bc: dirichlet
  lmax: 8
"""


class TestSettings:
    """Test Settings class."""

    def test_default_values(self):
        """Test default configuration values."""
        with (
            patch.dict(os.environ, {}, clear=True),
            tempfile.TemporaryDirectory() as tmpdir,
        ):
            original_cwd = os.getcwd()
            try:
                os.chdir(tmpdir)
                settings = Settings()
                assert settings.seed == 0
                assert settings.threads == 1
                assert settings.log_level == "INFO"
                assert settings.points_per_wavelength == 10.0
                assert settings.out_dir.is_absolute()
            finally:
                os.chdir(original_cwd)

    def test_custom_values(self):
        """Test values read from QELAB_ variables."""
        with patch.dict(
            os.environ,
            {
                "QELAB_SEED": "42",
                "QELAB_LOG_LEVEL": "DEBUG",
                "QELAB_THREADS": "4",
            },
        ):
            settings = Settings()
            assert settings.seed == 42
            assert settings.log_level == "DEBUG"
            assert settings.threads == 4

    def test_env_file(self):
        """Test that a .env file in the working directory is honoured."""
        with (
            patch.dict(os.environ, {}, clear=True),
            tempfile.TemporaryDirectory() as tmpdir,
        ):
            Path(tmpdir, ".env").write_text("QELAB_MAX_NODES=1024\n")
            original_cwd = os.getcwd()
            try:
                os.chdir(tmpdir)
                assert Settings().max_nodes == 1024
            finally:
                os.chdir(original_cwd)


class TestLoadSettings:
    """Test load_settings function."""

    def test_overrides_win(self):
        """Non-None overrides replace environment values."""
        with patch.dict(os.environ, {"QELAB_SEED": "3"}):
            settings = load_settings(seed=9, threads=None)
            assert settings.seed == 9
            assert settings.threads == 1

    def test_out_dir_resolved(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            settings = load_settings(out_dir=Path(tmpdir) / "runs" / ".." / "out")
            assert settings.out_dir == (Path(tmpdir) / "out").resolve()

    def test_invalid_value_raises(self):
        with pytest.raises(ConfigError, match="invalid settings"):
            load_settings(threads=0)


class TestAngles:
    """Test angle expressions in domain files."""

    @pytest.mark.parametrize(
        ("text", "expected"),
        [
            ("pi", math.pi),
            ("-pi/2", -math.pi / 2),
            ("3*pi/2", 1.5 * math.pi),
            ("2 pi", 2 * math.pi),
            ("0.25", 0.25),
            (1, 1.0),
        ],
    )
    def test_parse(self, text, expected):
        assert parse_angle(text) == pytest.approx(expected)

    def test_garbage(self):
        with pytest.raises(ValueError):
            parse_angle("tau")


class TestParseConfig:
    """Test domain/run files and their error reporting."""

    def test_square(self):
        domain, run = parse_config_text(SQUARE_YAML)
        assert domain.area == pytest.approx(1.0)
        assert len(domain.corners) == 4
        assert run.boundary_condition.kind is BoundaryKind.DIRICHLET
        assert run.lmax == 8.0
        assert run.lmin == 0.5

    def test_from_file(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "square.yaml"
            path.write_text(SQUARE_YAML)
            domain, _ = parse_config(path)
            assert domain.length == pytest.approx(4.0)
            assert resolve_domain_path(path) == path

    def test_missing_file(self):
        with pytest.raises(ConfigError, match="cannot read"):
            parse_config("/nonexistent/domain.yaml")

    @pytest.mark.parametrize("stem", ["disk", "stadium", "square"])
    def test_bundled_domains(self, stem):
        path = resolve_domain_path(stem)
        assert path == bundled_domain(stem)
        domain, run = parse_config(path)
        assert domain.area > 0
        assert run.lmax > run.lmin

    def test_bundled_stadium_matches_preset(self, stadium_domain):
        domain, _ = parse_config(bundled_domain("stadium"))
        assert domain.length == pytest.approx(stadium_domain.length)
        assert domain.area == pytest.approx(stadium_domain.area)

    def test_unknown_domain(self):
        with pytest.raises(ConfigError, match="no bundled domain"):
            resolve_domain_path("hexagon")

    def test_unknown_key_has_line(self):
        text = SQUARE_YAML + "  colour: blue\n"
        with pytest.raises(ConfigError) as exc:
            parse_config_text(text)
        assert exc.value.line == 15
        assert "run.colour" in str(exc.value)

    def test_bad_boundary_condition(self):
        text = SQUARE_YAML.replace("bc: dirichlet", "bc: sticky")
        with pytest.raises(ConfigError) as exc:
            parse_config_text(text)
        assert exc.value.line == 13

    def test_invalid_arc_has_line(self):
        text = """\
domain:
  arcs:
    - kind: circle-arc
      center: [0, 0]
      radius: -1
      angles: [0, 2*pi]
"""
        with pytest.raises(ConfigError) as exc:
            parse_config_text(text)
        assert exc.value.line == 3

    def test_open_chain(self):
        text = SQUARE_YAML.replace("endpoints: [[0, 1], [0, 0]]", "endpoints: [[0, 1], [0, 0.5]]")
        with pytest.raises(ConfigError, match="open") as exc:
            parse_config_text(text)
        assert exc.value.line == 4

    def test_malformed_yaml(self):
        with pytest.raises(ConfigError, match="malformed YAML") as exc:
            parse_config_text("domain:\n  arcs: [unclosed\n")
        assert exc.value.line is not None

    def test_not_a_mapping(self):
        with pytest.raises(ConfigError):
            parse_config_text("- just\n- a list\n")
