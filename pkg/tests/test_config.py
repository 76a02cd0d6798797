"""Configuration text: parsing, validation diagnostics, canonical re-emit."""

import math
from importlib import resources

import numpy as np
import pytest

from fracsteer.config import parse_config, synthesize_shape
from fracsteer.errors import ConfigError

MINIMAL = """
[model]
alpha = 0.5
truncation = 4
"""


def _default_text():
    return (resources.files("fracsteer") / "data" / "default.cfg").read_text()


class TestParsing:
    def test_minimal(self):
        cfg = parse_config(MINIMAL)
        assert cfg.model.alpha == 0.5
        assert cfg.model.truncation == 4
        assert cfg.model.horizon == 1.0
        assert np.allclose(cfg.model.eigenvalues, [1.0, 4.0, 9.0, 16.0])
        assert cfg.solver.n_steps == 128
        assert cfg.betas == (1e-1, 1e-2, 1e-3, 1e-4)
        assert cfg.output_dir == "out"

    def test_shipped_default(self):
        cfg = parse_config(_default_text())
        m = cfg.model
        assert m.alpha == 0.5
        assert m.truncation == 32
        assert m.state_delay_count == 1
        assert m.control_delay_count == 2
        assert m.nonlocal_terms == ((0.1, 0.25), (0.05, 0.5))
        assert m.nonlinearity.kind == "bounded_tanh"
        assert np.all(m.control_multipliers[0] == 0.0)
        assert np.all(m.control_multipliers[1] == 1.0)
        assert len(cfg.x_points) == 3

    def test_comments_and_blank_lines_ignored(self):
        cfg = parse_config("# leading comment\n\n[model]\nalpha = 0.5 # tail\n"
                           "truncation = 2\n")
        assert cfg.model.alpha == 0.5


class TestDiagnostics:
    def test_unknown_section_with_line(self):
        with pytest.raises(ConfigError) as e:
            parse_config("[model]\nalpha = 0.5\ntruncation = 2\n\n[extras]\n")
        assert e.value.line == 5
        assert "extras" in str(e.value)

    def test_unknown_key_with_line(self):
        with pytest.raises(ConfigError) as e:
            parse_config("[model]\nalpha = 0.5\ntruncation = 2\nomega = 3\n")
        assert e.value.line == 4
        assert "omega" in str(e.value)

    def test_duplicate_key(self):
        with pytest.raises(ConfigError) as e:
            parse_config("[model]\nalpha = 0.5\nalpha = 0.6\ntruncation = 2\n")
        assert e.value.line == 3

    def test_missing_required_key(self):
        with pytest.raises(ConfigError) as e:
            parse_config("[model]\ntruncation = 2\n")
        assert "alpha" in str(e.value)

    def test_malformed_line(self):
        with pytest.raises(ConfigError) as e:
            parse_config("[model]\nalpha 0.5\n")
        assert e.value.line == 2

    def test_key_before_section(self):
        with pytest.raises(ConfigError) as e:
            parse_config("alpha = 0.5\n")
        assert e.value.line == 1

    def test_hypothesis_hint_in_message(self):
        bad = MINIMAL + "state_delays = scaled_sine(0.5)\n"
        with pytest.raises(ConfigError) as e:
            parse_config(bad)
        assert "(H5)" in str(e.value)

    def test_bad_number(self):
        with pytest.raises(ConfigError) as e:
            parse_config("[model]\nalpha = fast\ntruncation = 2\n")
        assert "alpha" in str(e.value)

    def test_bad_descriptor(self):
        with pytest.raises(ConfigError) as e:
            parse_config(MINIMAL + "nonlinearity = cubic(2)\n")
        assert "nonlinearity" in str(e.value)


class TestCanonicalForm:
    def test_round_trip_is_lossless(self):
        cfg = parse_config(_default_text())
        again = parse_config(cfg.to_text())
        assert again.sections == cfg.sections
        assert again.digest() == cfg.digest()
        assert np.array_equal(again.model.u0.coeffs, cfg.model.u0.coeffs)
        assert np.array_equal(again.target.coeffs, cfg.target.coeffs)
        assert again.betas == cfg.betas

    def test_digest_tracks_content(self):
        cfg = parse_config(_default_text())
        other = parse_config(_default_text().replace("alpha = 0.5",
                                                     "alpha = 0.6"))
        assert cfg.digest() != other.digest()

    def test_none_values_round_trip(self):
        cfg = parse_config(MINIMAL + "nonlocal_terms = none\n")
        again = parse_config(cfg.to_text())
        assert again.model.nonlocal_terms == ()
        assert again.sections == cfg.sections


class TestShapes:
    def test_zero_and_single_mode(self):
        assert np.all(synthesize_shape("zero", 3) == 0.0)
        c = synthesize_shape("single_mode(2, 1.5)", 3)
        assert np.allclose(c, [0.0, 1.5, 0.0])
        with pytest.raises(ValueError):
            synthesize_shape("single_mode(5, 1.0)", 3)

    def test_gaussian_bump_coefficients(self):
        # compare the projection against a dense trapezoid quadrature
        n = 8
        c = synthesize_shape("gaussian_bump(1.0, 0.35)", n)
        x = np.linspace(0.0, math.pi, 40001)
        f = np.exp(-((x - 1.0) ** 2) / (2.0 * 0.35 ** 2))
        for k in range(1, n + 1):
            phi = math.sqrt(2.0 / math.pi) * np.sin(k * x)
            assert c[k - 1] == pytest.approx(np.trapezoid(f * phi, x),
                                             abs=1e-8)

    def test_unknown_shape(self):
        with pytest.raises(ValueError):
            synthesize_shape("sawtooth(1)", 4)
