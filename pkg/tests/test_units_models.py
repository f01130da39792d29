import unittest

from pydantic import ValidationError

from utils.errors import ConfigError, NotApplicableError, PoleEvaluationError
from utils.units_models import (
    MaterialKind,
    MaterialModel,
    UnitSystem,
    diffusion_coefficient,
    drude_epsilon,
    material_from_mapping,
    omega2_epsilon,
    omega2_epsilon_derivative,
    scattering_rate_at,
    thouless_frequency,
)


class TestDrudeEpsilon(unittest.TestCase):

    def setUp(self):
        self.m = MaterialModel.drude(0.5)

    def test_imaginary_axis_value(self):
        """On omega = i xi the permittivity is real: 1 + Omega^2 / (xi (xi + gamma))."""
        eps = drude_epsilon(2j, self.m)
        self.assertAlmostEqual(eps.real, 1.2, places=14)
        self.assertAlmostEqual(eps.imag, 0.0, places=14)

    def test_plasma_model_is_real_on_real_axis(self):
        eps = drude_epsilon(2.0, MaterialModel.plasma())
        self.assertAlmostEqual(eps.real, 0.75, places=14)
        self.assertEqual(eps.imag, 0.0)

    def test_poles_raise(self):
        with self.assertRaises(PoleEvaluationError):
            drude_epsilon(0.0, self.m)
        with self.assertRaises(PoleEvaluationError):
            drude_epsilon(-0.5j, self.m)
        # still a ZeroDivisionError for callers that only know the builtin
        with self.assertRaises(ZeroDivisionError):
            drude_epsilon(0.0, self.m)

    def test_omega2_epsilon_is_regular_at_zero(self):
        self.assertEqual(omega2_epsilon(0.0, self.m), 0j)

    def test_omega2_epsilon_derivative_matches_difference_quotient(self):
        omega, h = complex(0.3, -0.1), 1e-6
        numeric = (omega2_epsilon(omega + h, self.m) - omega2_epsilon(omega - h, self.m)) / (2 * h)
        self.assertAlmostEqual(abs(numeric - omega2_epsilon_derivative(omega, self.m)), 0.0, places=7)


class TestMaterialModel(unittest.TestCase):

    def test_drude_needs_positive_gamma(self):
        with self.assertRaises(ValidationError):
            MaterialModel.drude(0.0)

    def test_plasma_has_no_gamma(self):
        with self.assertRaises(ValidationError):
            MaterialModel(kind=MaterialKind.PLASMA, gamma=0.1)

    def test_rate_exponent_needs_reference_temperature(self):
        with self.assertRaises(ValidationError):
            MaterialModel.drude(0.08, rate_exponent=2)

    def test_transport_scales(self):
        m = MaterialModel.drude(0.08)
        self.assertAlmostEqual(diffusion_coefficient(m), 0.08)
        self.assertAlmostEqual(thouless_frequency(m, 10.0), 8e-4)
        with self.assertRaises(NotApplicableError):
            diffusion_coefficient(MaterialModel.plasma())

    def test_perfect_crystal_rate(self):
        crystal = MaterialModel.drude(0.08, rate_exponent=2, T_ref=0.01)
        self.assertAlmostEqual(scattering_rate_at(crystal, 0.005), 0.02)
        frozen = crystal.at_temperature(0.005)
        self.assertAlmostEqual(frozen.gamma, 0.02)
        self.assertIsNone(frozen.rate_exponent)
        # without an exponent the rate is temperature independent
        fixed = MaterialModel.drude(0.08)
        self.assertIs(fixed.at_temperature(1.0), fixed)


class TestMaterialFromMapping(unittest.TestCase):

    def test_section_keys(self):
        m = material_from_mapping({"material.kind": "Drude", "material.gamma": "0.08"})
        self.assertEqual(m.kind, MaterialKind.DRUDE)
        self.assertAlmostEqual(m.gamma, 0.08)

    def test_bare_keys_and_reference_rate(self):
        m = material_from_mapping({"gamma_ref": "0.08", "rate_exponent": "2", "T_ref": "0.01"})
        self.assertEqual(m.rate_exponent, 2)
        self.assertAlmostEqual(m.gamma, 0.08)

    def test_plasma_ignores_gamma(self):
        m = material_from_mapping({"kind": "plasma", "gamma": "0.08"})
        self.assertEqual(m.kind, MaterialKind.PLASMA)
        self.assertEqual(m.gamma, 0.0)

    def test_bad_value_names_key(self):
        with self.assertRaises(ConfigError) as ctx:
            material_from_mapping({"material.gamma": "fast"})
        self.assertEqual(ctx.exception.key, "material.gamma")


class TestUnitSystem(unittest.TestCase):

    def test_gold_penetration_depth(self):
        units = UnitSystem.from_plasma_energy_ev(9.0)
        self.assertAlmostEqual(units.penetration_depth_m * 1e9, 21.92, delta=0.05)

    def test_conversions(self):
        units = UnitSystem(20e-9)
        self.assertAlmostEqual(units.length_to_nm(1.0), 20.0)
        self.assertAlmostEqual(units.length_from_nm(40.0), 2.0)
        self.assertAlmostEqual(units.frequency_to_kelvin(units.frequency_from_kelvin(300.0)), 300.0, places=9)

    def test_gold_thouless_frequency_round_trip(self):
        """lambda = 20 nm and hbar gamma = 500 K give hbar D / L^2 of about 20 K at L = 100 nm."""
        units = UnitSystem(20e-9)
        m = MaterialModel.drude(units.frequency_from_kelvin(500.0))
        L = units.length_from_nm(100.0)
        self.assertAlmostEqual(L, 5.0, places=12)
        kelvin = units.frequency_to_kelvin(thouless_frequency(m, L))
        self.assertLess(abs(kelvin / 20.0 - 1.0), 0.3)
        self.assertAlmostEqual(units.frequency_to_kelvin(m.gamma), 500.0, places=9)

    def test_rejects_non_positive_depth(self):
        with self.assertRaises(ValueError):
            UnitSystem(0.0)


if __name__ == "__main__":
    unittest.main()
