import math
import unittest
from unittest.mock import MagicMock, patch

import pytest
from pydantic import ValidationError

from utils.errors import DomainError, NotApplicableError
from utils.mode_density import (
    SMALL_WINDOW,
    SpectralAxis,
    SpectralCurve,
    SumRuleCheck,
    mode_count,
    rho_lifshitz_real,
    rho_real,
    rho_real_sum_rule,
    rho_tilde,
    rho_tilde_scattering,
    rho_zero_limit,
    spectral_curve,
    xi_panel_edges,
)
from utils.numerics import QuadratureSpec
from utils.units_models import MaterialModel, thouless_frequency


def _xi_for_window(a: float, L: float, gamma: float) -> float:
    """Cut frequency at which k_max * L = a (Omega = 1)."""
    k = a / L
    # k_max^2 = xi / (gamma - xi) - xi^2, solved to leading order and polished once
    xi = gamma * k * k / (1.0 + k * k)
    return gamma * (k * k + xi * xi) / (1.0 + k * k + xi * xi)


class TestBranchCutDensity(unittest.TestCase):

    def setUp(self):
        self.m = MaterialModel.drude(0.08)
        self.quad = QuadratureSpec()

    def test_routes_agree(self):
        """log-derivative of D and the scattering-phase route give the same rho_tilde."""
        for xi, L in ((0.01, 1.0), (1e-3, 10.0), (0.05, 0.3)):
            analytic = rho_tilde(xi, L, self.m, self.quad)
            scattering = rho_tilde_scattering(xi, L, self.m, self.quad)
            self.assertLess(abs(scattering.value - analytic.value), 1e-6 * abs(analytic.value))

    def test_finite_difference_fallback(self):
        fd = self.quad.model_copy(update={"derivative_method": "finite_difference"})
        analytic = rho_tilde(0.01, 1.0, self.m, self.quad).value
        numeric = rho_tilde(0.01, 1.0, self.m, fd).value
        self.assertLess(abs(numeric - analytic), 1e-3 * abs(analytic))

    def test_vanishes_above_gamma(self):
        self.assertEqual(rho_tilde(0.08, 1.0, self.m, self.quad).value, 0.0)
        self.assertEqual(rho_tilde_scattering(0.1, 1.0, self.m, self.quad).value, 0.0)
        self.assertEqual(mode_count(0.09, 1.0, self.m, self.quad).value, 0.0)

    def test_argument_checks(self):
        with self.assertRaises(NotApplicableError):
            rho_tilde(0.01, 1.0, MaterialModel.plasma(), self.quad)
        with self.assertRaises(DomainError):
            rho_tilde(0.0, 1.0, self.m, self.quad)
        with self.assertRaises(DomainError):
            rho_tilde(0.01, -1.0, self.m, self.quad)

    def test_panel_edges_span_the_cut(self):
        edges = xi_panel_edges(10.0, self.m, self.quad)
        self.assertEqual(edges[0], 0.0)
        self.assertAlmostEqual(edges[-1], 0.08)
        self.assertEqual(edges, sorted(edges))


class TestSmallFrequencyLimit(unittest.TestCase):

    def setUp(self):
        self.m = MaterialModel.drude(0.08)
        self.quad = QuadratureSpec()

    def _leading_order(self, xi, L):
        return -L * math.sqrt(xi) / (8.0 * math.pi ** 2 * 0.08 ** 1.5)

    def test_vanishes_monotonically(self):
        for L in (10.0, 100.0):
            xi_L = thouless_frequency(self.m, L)
            results = [rho_tilde(xi_L * 10.0 ** -n, L, self.m, self.quad) for n in range(2, 15)]
            self.assertTrue(all(r.converged for r in results))
            magnitudes = [abs(r.value) for r in results]
            self.assertTrue(all(r.value < 0.0 for r in results))
            self.assertTrue(all(b < a for a, b in zip(magnitudes, magnitudes[1:])), magnitudes)
            self.assertLess(magnitudes[-1], 1e-5 * magnitudes[0])

    def test_square_root_onset(self):
        """rho_tilde -> -L sqrt(xi) / (8 pi^2 gamma^1.5) once k_max L << 1."""
        for xi, L in ((1e-12, 10.0), (1e-13, 100.0)):
            for density in (rho_tilde, rho_tilde_scattering):
                value = density(xi, L, self.m, self.quad).value
                self.assertLess(abs(value / self._leading_order(xi, L) - 1.0), 1e-3)

    def test_routes_agree_just_above_the_expansion(self):
        L = 10.0
        for a in (2.0 * SMALL_WINDOW, 1e-3, 1e-2):
            xi = _xi_for_window(a, L, 0.08)
            analytic = rho_tilde(xi, L, self.m, self.quad)
            scattering = rho_tilde_scattering(xi, L, self.m, self.quad)
            self.assertTrue(analytic.converged and scattering.converged)
            self.assertLess(abs(scattering.value - analytic.value), 1e-6 * abs(analytic.value))
            self.assertLess(abs(analytic.value / self._leading_order(xi, L) - 1.0), 3.0 * a)

    def test_continuous_across_the_expansion_switch(self):
        L = 10.0
        below = rho_tilde(_xi_for_window(0.999 * SMALL_WINDOW, L, 0.08), L, self.m, self.quad).value
        above = rho_tilde(_xi_for_window(1.001 * SMALL_WINDOW, L, 0.08), L, self.m, self.quad).value
        self.assertLess(abs(above / below - 1.0), 1e-3)

    def test_mode_count_difference_matches_density(self):
        fd = self.quad.model_copy(update={"derivative_method": "finite_difference"})
        xi, L = 1e-12, 10.0
        self.assertLess(abs(rho_tilde(xi, L, self.m, fd).value / rho_tilde(xi, L, self.m, self.quad).value - 1.0), 1e-4)

    def test_vanishes_at_large_separation(self):
        values = [abs(rho_tilde(0.01, L, self.m, self.quad).value) for L in (10.0, 100.0, 2000.0)]
        self.assertTrue(values[0] > values[1] > values[2])
        self.assertLess(values[2], 1e-6 * values[0])


class TestRealFrequencyDensity(unittest.TestCase):

    def setUp(self):
        self.m = MaterialModel.drude(0.08)
        self.quad = QuadratureSpec().relaxed(1e-6)

    def test_zero_frequency_closed_form(self):
        expected = -(2.0 * math.log(2.0) - 1.0) / (8.0 * math.pi ** 2 * 0.08)
        self.assertAlmostEqual(rho_zero_limit(10.0, self.m) / expected, 1.0, places=12)
        # independent of L
        self.assertEqual(rho_zero_limit(10.0, self.m), rho_zero_limit(100.0, self.m))

    def test_argument_checks(self):
        with self.assertRaises(DomainError):
            rho_real(-1.0, 1.0, self.m, self.quad)
        with self.assertRaises(NotApplicableError):
            rho_real(0.1, 1.0, MaterialModel.plasma(), self.quad)
        with self.assertRaises(DomainError):
            rho_lifshitz_real(0.0, 1.0, self.m, self.quad)

    def test_zero_frequency_limit_from_small_omega(self):
        for L in (10.0, 100.0):
            result = rho_real(1e-6 * thouless_frequency(self.m, L), L, self.m, self.quad)
            self.assertTrue(result.converged)
            self.assertLess(abs(result.value / rho_zero_limit(L, self.m) - 1.0), 0.02)

    @pytest.mark.slow
    def test_zero_frequency_from_cut_integral(self):
        value = rho_real(0.0, 10.0, self.m, self.quad).value
        self.assertLess(abs(value / rho_zero_limit(10.0, self.m) - 1.0), 0.02)

    @pytest.mark.slow
    def test_eddy_density_carries_full_drude_density(self):
        m = MaterialModel.drude(1e-3)
        L = 20.0 * math.pi
        eddy = rho_real(1e-5, L, m, self.quad).value
        full = rho_lifshitz_real(1e-5, L, m, self.quad).value
        self.assertLess(abs(eddy - full), 0.05 * abs(full))


class TestSpectralCurve(unittest.TestCase):

    def test_sampled_curve(self):
        m = MaterialModel.drude(0.08)
        curve = spectral_curve(SpectralAxis.IMAGINARY_CUT, [1e-3, 1e-2, 5e-2], 1.0, m, QuadratureSpec())
        self.assertEqual(len(curve.samples), 3)
        self.assertEqual(list(curve.frequencies), [1e-3, 1e-2, 5e-2])

    def test_frequencies_must_increase(self):
        with self.assertRaises(ValidationError):
            SpectralCurve(axis="omega", L=1.0, gamma=0.08, samples=[(0.2, 1.0), (0.1, 1.0)], converged=[True, True])

    def test_cut_samples_inside_cut(self):
        with self.assertRaises(ValidationError):
            SpectralCurve(axis="xi", L=1.0, gamma=0.08, samples=[(0.01, 1.0), (0.1, 1.0)], converged=[True, True])

    def test_sum_rule_error(self):
        check = SumRuleCheck(xi=0.01, from_real_axis=1.01, from_cut=1.0)
        self.assertAlmostEqual(check.relative_error, 0.01)

    @patch("utils.mode_density.integrate_over_cut", return_value=MagicMock(value=1.0))
    @patch("utils.mode_density.spectral_curve")
    def test_sum_rule_bookkeeping(self, curve, _):
        """A constant density on the grid (1/omega^2 tail above it) smears to a closed form."""
        c, xi = 2.0, 0.01
        curve.side_effect = lambda axis, grid, L, m, quad: SpectralCurve(
            axis=axis, L=L, gamma=m.gamma, samples=[(float(w), c) for w in grid], converged=[True] * len(grid))
        check = rho_real_sum_rule(xi, 1.0, MaterialModel.drude(0.08), QuadratureSpec())
        upper = 8.0
        expected = c / math.pi * (math.log((upper ** 2 + xi ** 2) / xi ** 2)
                                  + upper ** 2 / xi ** 2 * math.log1p(xi ** 2 / upper ** 2))
        self.assertLess(abs(check.from_real_axis - expected), 1e-6 * expected)
        self.assertEqual(check.from_cut, 1.0)


if __name__ == "__main__":
    unittest.main()
