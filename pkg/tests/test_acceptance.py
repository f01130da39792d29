import unittest
from unittest.mock import patch

import pytest

from commands.acceptance import CRITERIA, Criterion, run_acceptance
from utils.errors import ConfigError
from utils.numerics import QuadratureSpec


class TestRunner(unittest.TestCase):

    def test_numerics_floor_passes(self):
        (criterion,) = run_acceptance(only=[12])
        self.assertEqual(criterion.number, 12)
        self.assertTrue(criterion.passed, criterion.measured)

    def test_unknown_criterion(self):
        with self.assertRaises(ConfigError) as ctx:
            run_acceptance(only=[12, 99])
        self.assertEqual(ctx.exception.key, "only")

    def test_exception_becomes_failed_criterion(self):
        def broken(quad):
            raise ZeroDivisionError("bad grid")

        with patch.dict(CRITERIA, {3: broken}):
            (criterion,) = run_acceptance(only=[3])
        self.assertFalse(criterion.passed)
        self.assertIn("ZeroDivisionError: bad grid", criterion.measured)

    def test_nested_criteria_run_at_relaxed_tolerance(self):
        seen = {}

        def record(number):
            def check(quad):
                seen[number] = quad.rel_tol
                return Criterion(number, "recorded", True, "", "")
            return check

        with patch.dict(CRITERIA, {1: record(1), 2: record(2)}):
            run_acceptance(QuadratureSpec(rel_tol=1e-9), only=[2, 1])
        self.assertEqual(seen, {1: 1e-6, 2: 1e-9})


@pytest.mark.slow
class TestCriteria(unittest.TestCase):

    def _check(self, number):
        (criterion,) = run_acceptance(only=[number])
        self.assertTrue(criterion.passed, f"{criterion.title}: {criterion.measured}")

    def test_zero_frequency_density(self):
        self._check(1)

    def test_cross_route_agreement(self):
        self._check(2)

    def test_entropy_plateau(self):
        self._check(4)

    def test_thermal_consistency(self):
        self._check(10)


if __name__ == "__main__":
    unittest.main()
