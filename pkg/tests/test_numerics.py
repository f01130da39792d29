import math
import unittest

from pydantic import ValidationError

from utils.errors import DomainError
from utils.numerics import (
    ConvergenceLedger,
    QuadratureSpec,
    QuadResult,
    adaptive_integrate,
    central_difference,
    cubic_roots,
    integrate_panels,
    log_panel_edges,
    polynomial_residual,
    richardson_derivative,
    richardson_extrapolate,
)


class TestQuadratureSpec(unittest.TestCase):

    def test_defaults_and_relaxed_copy(self):
        spec = QuadratureSpec()
        self.assertEqual(spec.rel_tol, 1e-8)
        relaxed = spec.relaxed(1e-6)
        self.assertEqual(relaxed.rel_tol, 1e-6)
        # relaxing never tightens
        self.assertEqual(relaxed.relaxed(1e-9).rel_tol, 1e-6)

    def test_validation(self):
        with self.assertRaises(ValidationError):
            QuadratureSpec(rel_tol=0.1)
        with self.assertRaises(ValidationError):
            QuadratureSpec(derivative_method="spline")


class TestAdaptiveIntegrate(unittest.TestCase):

    def setUp(self):
        self.spec = QuadratureSpec(rel_tol=1e-10, abs_tol=0.0)

    def test_closed_forms(self):
        """Closed-form integrals including endpoint singularities and an infinite range."""
        cases = [
            (lambda x: x * x, 0.0, 1.0, 1.0 / 3.0),
            (math.sin, 0.0, math.pi, 2.0),
            (lambda x: math.exp(-x), 0.0, math.inf, 1.0),
            (math.log, 0.0, 1.0, -1.0),
            (lambda x: 1.0 / math.sqrt(x), 0.0, 1.0, 2.0),
        ]
        for f, a, b, exact in cases:
            result = adaptive_integrate(f, a, b, self.spec)
            self.assertTrue(result.converged)
            self.assertLess(abs(result.value - exact), 1e-9 * abs(exact))
            self.assertGreater(result.evaluations, 0)

    def test_empty_and_reversed_ranges(self):
        self.assertEqual(adaptive_integrate(math.sin, 1.0, 1.0, self.spec).value, 0.0)
        with self.assertRaises(DomainError):
            adaptive_integrate(math.sin, 2.0, 1.0, self.spec)

    def test_non_convergence_is_flagged_not_raised(self):
        spec = QuadratureSpec(rel_tol=1e-12, abs_tol=0.0, max_refinements=10)
        result = adaptive_integrate(lambda x: math.sin(1.0 / x), 1e-6, 1.0, spec)
        self.assertFalse(result.converged)

    def test_panels_add_up(self):
        edges = log_panel_edges(1e-3, 1.0, 2)
        self.assertEqual(edges[0], 0.0)
        self.assertEqual(edges[-1], 1.0)
        result = integrate_panels(lambda x: x, edges, self.spec)
        self.assertAlmostEqual(result.value, 0.5, places=12)

    def test_bad_panel_range(self):
        with self.assertRaises(DomainError):
            log_panel_edges(1.0, 0.5, 2)


class TestConvergenceLedger(unittest.TestCase):

    def test_inner_failure_propagates(self):
        ledger = ConvergenceLedger()
        good = QuadResult(value=1.0, error_estimate=0.0, evaluations=3, converged=True)
        bad = QuadResult(value=2.0, error_estimate=1.0, evaluations=4, converged=False)
        self.assertEqual(ledger.value(good) + ledger.value(bad), 3.0)
        sealed = ledger.seal(QuadResult(value=5.0, error_estimate=0.0, evaluations=1, converged=True))
        self.assertFalse(sealed.converged)
        self.assertEqual(sealed.evaluations, 8)


class TestRichardson(unittest.TestCase):

    def test_removes_quadratic_error(self):
        # samples of 1 + h^2 at h = 1, 1/2, 1/4
        samples = [1.0 + h * h for h in (1.0, 0.5, 0.25)]
        result = richardson_extrapolate(samples, ratio=2.0, order=2)
        self.assertAlmostEqual(result.value, 1.0, places=12)
        self.assertTrue(result.reliable)

    def test_needs_three_samples(self):
        with self.assertRaises(DomainError):
            richardson_extrapolate([1.0, 2.0])

    def test_derivatives(self):
        self.assertAlmostEqual(central_difference(math.exp, 0.5, 1e-3), math.exp(0.5), places=10)
        self.assertAlmostEqual(richardson_derivative(math.sin, 0.3, 0.1).value, math.cos(0.3), places=9)


class TestCubicRoots(unittest.TestCase):

    def _assert_roots(self, coefficients, expected):
        roots = cubic_roots(coefficients)
        for root in roots:
            self.assertLess(polynomial_residual(coefficients, root), 1e-12)
        for value in expected:
            self.assertLess(min(abs(r - value) for r in roots), 1e-9)

    def test_distinct_real_roots(self):
        self._assert_roots([1.0, -6.0, 11.0, -6.0], [1.0, 2.0, 3.0])

    def test_roots_of_unity(self):
        self._assert_roots([1.0, 0.0, 0.0, -1.0], [1.0, complex(-0.5, math.sqrt(3) / 2), complex(-0.5, -math.sqrt(3) / 2)])

    def test_double_root(self):
        # (x - 1)^2 (x + 2)
        self._assert_roots([1.0, 0.0, -3.0, 2.0], [1.0, -2.0])

    def test_zero_leading_coefficient(self):
        with self.assertRaises(DomainError):
            cubic_roots([0.0, 1.0, 2.0, 3.0])


if __name__ == "__main__":
    unittest.main()
