import os
import tempfile
import unittest
from unittest.mock import patch

from config import (
    FIGURE_DEFAULTS,
    RunConfig,
    get_config_summary,
    get_setting,
    load_run_config,
    parse_run_config,
    validate_config,
)
from utils.errors import ConfigError
from utils.units_models import MaterialKind


class TestGetSetting(unittest.TestCase):

    @patch.dict(os.environ, {"EDDY_CASIMIR_TEST_KEY": "  42  "})
    def test_environment_wins(self):
        self.assertEqual(get_setting("EDDY_CASIMIR_TEST_KEY", "7"), "42")

    @patch("config.dotenv_values", return_value={})
    def test_fallback(self, _):
        self.assertEqual(get_setting("EDDY_CASIMIR_MISSING_KEY", "fallback"), "fallback")

    @patch("config.dotenv_values", return_value={"EDDY_CASIMIR_FILE_KEY": "from-file"})
    def test_dotenv_file(self, _):
        self.assertEqual(get_setting("EDDY_CASIMIR_FILE_KEY"), "from-file")

    def test_summary_keys(self):
        self.assertEqual(set(get_config_summary()), {"threads", "log_level", "debug_mode", "figure_rel_tol"})


class TestValidateConfig(unittest.TestCase):

    def test_unknown_keys_warn(self):
        status = validate_config({"colour": "red", "plotting.dpi": "300", "fig1.dpi": "300"})
        self.assertEqual(len(status["warnings"]), 3)
        self.assertEqual(status["errors"], [])
        self.assertFalse(status["material_section"])

    def test_empty_value_is_an_error(self):
        status = validate_config({"material.gamma": ""})
        self.assertTrue(status["material_section"])
        self.assertEqual(len(status["errors"]), 1)


class TestRunConfig(unittest.TestCase):

    def test_defaults_mirror_captions(self):
        config = RunConfig()
        self.assertIsNone(config.material)
        self.assertEqual(config.figure("fig2")["gamma"], 1e-3)
        self.assertAlmostEqual(config.material_for("fig1").gamma, 0.08)
        self.assertAlmostEqual(config.cutoff(config.material_for("fig1")), 0.4)
        with self.assertRaises(ConfigError):
            config.figure("fig9")

    def test_parse_sections(self):
        config = parse_run_config({
            "material.kind": "drude",
            "material.gamma": "0.02",
            "quadrature.rel_tol": "1e-7",
            "thermo.cutoff_ratio": "10",
            "fig1.points": "5",
        })
        self.assertIs(config.material.kind, MaterialKind.DRUDE)
        self.assertAlmostEqual(config.material_for("fig4").gamma, 0.02)
        self.assertEqual(config.quadrature.rel_tol, 1e-7)
        self.assertAlmostEqual(config.cutoff(config.material), 0.2)
        self.assertEqual(config.figure("fig1")["points"], 5)
        self.assertEqual(config.figure("fig1")["L_max"], FIGURE_DEFAULTS["fig1"]["L_max"])

    def test_bad_quadrature_names_key(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_run_config({"quadrature.rel_tol": "0.5"})
        self.assertEqual(ctx.exception.key, "quadrature.rel_tol")

    def test_bad_figure_value(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_run_config({"fig3.L": "far"})
        self.assertEqual(ctx.exception.key, "fig3.L")

    def test_cutoff_ratio_below_one(self):
        with self.assertRaises(ConfigError):
            parse_run_config({"thermo.cutoff_ratio": "0.5"})

    def test_unknown_key_warns(self):
        with self.assertWarns(UserWarning):
            parse_run_config({"colour": "red"})

    def test_load_from_file(self):
        with tempfile.NamedTemporaryFile(mode="w", suffix=".env", delete=False) as tmp:
            tmp.write("# perfect crystal\nmaterial.gamma_ref=0.08\nmaterial.rate_exponent=2\nmaterial.T_ref=0.01\n")
        try:
            config = load_run_config(tmp.name)
        finally:
            os.remove(tmp.name)
        self.assertEqual(config.material.rate_exponent, 2)
        self.assertAlmostEqual(config.material.at_temperature(0.005).gamma, 0.02)

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            load_run_config("/nonexistent/run.env")

    def test_no_path_gives_defaults(self):
        self.assertEqual(load_run_config(None), RunConfig())


if __name__ == "__main__":
    unittest.main()
