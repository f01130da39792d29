import os
import tempfile
import unittest
from unittest.mock import patch

import pandas as pd
from click.testing import CliRunner

import app
from commands.acceptance import Criterion
from commands.figures import FigureDataset
from utils.mode_density import SpectralAxis, SpectralCurve
from utils.thermo import QuantityKind, ThermoResult


def _dataset():
    return FigureDataset("fig1", pd.DataFrame({"L_over_lambda_p": [0.5], "converged": [True]}), {"Lambda": 0.4})


@patch("app.configure_logging")
class TestFigCommand(unittest.TestCase):

    def setUp(self):
        self.runner = CliRunner()

    @patch("app.build_figure", return_value=_dataset())
    def test_fig_to_stdout(self, build, _):
        result = self.runner.invoke(app.main, ["fig", "1"])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("# figure=fig1\n# Lambda=0.40000000000000002\nL_over_lambda_p,converged\n", result.output)
        self.assertEqual(build.call_args[0][0], "fig1")

    @patch("app.build_figure", return_value=_dataset())
    def test_fig_to_file(self, build, _):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "fig1.csv")
            result = self.runner.invoke(app.main, ["fig", "1", "--out", path])
            self.assertEqual(result.exit_code, 0, result.output)
            with open(path, encoding="utf-8") as handle:
                self.assertTrue(handle.read().startswith("# figure=fig1\n"))

    def test_unknown_figure(self, _):
        result = self.runner.invoke(app.main, ["fig", "5"])
        self.assertEqual(result.exit_code, 2)


@patch("app.configure_logging")
class TestCheckCommand(unittest.TestCase):

    def setUp(self):
        self.runner = CliRunner()

    @patch("app.run_acceptance")
    def test_failure_sets_exit_code(self, run, _):
        run.return_value = [
            Criterion(1, "zero-frequency density", True, "1e-4", "< 2e-2"),
            Criterion(2, "cross-route agreement", False, "3e-5", "< 1e-6"),
        ]
        result = self.runner.invoke(app.main, ["check"])
        self.assertEqual(result.exit_code, 1)
        self.assertIn("[FAIL] 2. cross-route agreement", result.output)

    @patch("app.run_acceptance")
    def test_only_subset_passes(self, run, _):
        run.return_value = [Criterion(3, "low-temperature entropy", True, "0.01", "< 0.05")]
        result = self.runner.invoke(app.main, ["check", "--only", "3", "--only", "1"])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("1/1 criteria passed", result.output)
        self.assertEqual(run.call_args[0][1], (3, 1))


@patch("app.configure_logging")
class TestSweepAndBranchTable(unittest.TestCase):

    def setUp(self):
        self.runner = CliRunner()

    def test_branch_point_sweep(self, _):
        result = self.runner.invoke(app.main, ["sweep", "-q", "branch_point", "-a", "k:0.01:1:3", "--si"])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("# quantity=branch_point\n", result.output)
        self.assertIn("# penetration_depth_nm=21.699999999999999\n", result.output)
        self.assertIn("k,value,converged,value_si\n", result.output)

    def test_missing_parameter_is_reported(self, _):
        result = self.runner.invoke(app.main, ["sweep", "-q", "entropy", "-a", "L:1:10:3"])
        self.assertEqual(result.exit_code, 1)
        self.assertIn("needs fixed values for T", result.output)

    def test_unknown_quantity(self, _):
        result = self.runner.invoke(app.main, ["sweep", "-q", "heat_capacity", "-a", "L:1:10:3"])
        self.assertEqual(result.exit_code, 2)

    def test_branch_table(self, _):
        result = self.runner.invoke(app.main, ["branch-table", "--k-min", "0.01", "--k-max", "1", "--points", "4"])
        self.assertEqual(result.exit_code, 0, result.output)
        lines = result.output.strip().splitlines()
        self.assertEqual(lines[0], "# material.gamma=0.080000000000000002")
        self.assertEqual(lines[2], "k,xi_k")
        self.assertEqual(len(lines), 7)

    def test_branch_table_bad_range(self, _):
        result = self.runner.invoke(app.main, ["branch-table", "--k-min", "1", "--k-max", "0.1"])
        self.assertEqual(result.exit_code, 2)

def _curve():
    return SpectralCurve(axis=SpectralAxis.IMAGINARY_CUT, L=30.0, gamma=0.08,
                         samples=[(0.001, 2.0), (0.01, 1.0)], converged=[True, True])


@patch("app.configure_logging")
class TestCurveAndPlateau(unittest.TestCase):

    def setUp(self):
        self.runner = CliRunner()

    @patch("app.spectral_curve", return_value=_curve())
    def test_curve_to_stdout(self, sample, _):
        result = self.runner.invoke(app.main, ["curve", "-L", "30", "--f-min", "0.001", "--f-max", "0.01", "-n", "3"])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertTrue(result.output.startswith("# axis=xi L=30 gamma=0.080000000000000002\nfrequency,density\n"))
        axis, frequencies, L = sample.call_args[0][:3]
        self.assertIs(axis, SpectralAxis.IMAGINARY_CUT)
        self.assertEqual(L, 30.0)
        self.assertEqual(len(frequencies), 3)
        self.assertAlmostEqual(frequencies[0], 0.001)
        self.assertAlmostEqual(frequencies[-1], 0.01)

    def test_curve_bad_range(self, _):
        result = self.runner.invoke(app.main, ["curve", "-L", "30", "--f-min", "0.1", "--f-max", "0.01"])
        self.assertEqual(result.exit_code, 2)

    @patch("app.static_plateau_factor", return_value=0.96)
    @patch("app.s_infinity")
    @patch("app.entropy")
    def test_plateau_table(self, entropy, s_inf, factor, _):
        entropy.side_effect = lambda T, L, m, quad: ThermoResult(
            quantity=QuantityKind.ENTROPY, value=-T, L=L, T=T, gamma=m.gamma)
        s_inf.return_value = ThermoResult(quantity=QuantityKind.ENTROPY, value=-1.0, L=10.0, T=float("inf"), gamma=0.08)
        result = self.runner.invoke(app.main, ["plateau", "-L", "10", "-n", "2", "-w", "1"])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(entropy.call_count, 2)
        self.assertIn("# static_plateau_factor=0.95999999999999996\n", result.output)
        self.assertIn("L,T,gamma,Lambda,quantity,value,normalization,converged\n", result.output)
        rows = [line for line in result.output.splitlines() if line.startswith("10,")]
        self.assertEqual(len(rows), 3)

    def test_plateau_bad_range(self, _):
        result = self.runner.invoke(app.main, ["plateau", "-L", "10", "--t-min", "1", "--t-max", "0.5"])
        self.assertEqual(result.exit_code, 2)

    @patch("utils.thermo.plateau_factor", return_value=0.9)
    def test_plateau_factor_sweep(self, factor, _):
        result = self.runner.invoke(app.main, ["sweep", "-q", "plateau_factor", "-a", "L:10:100:2", "-w", "1"])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("# quantity=plateau_factor\n", result.output)
        self.assertIn("L,value,converged\n10,0.90000000000000002,True\n", result.output)
        self.assertEqual(factor.call_count, 2)


if __name__ == "__main__":
    unittest.main()
