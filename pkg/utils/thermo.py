# ==============================================================================
# 🌡️ Thermo - eddy-current Casimir energy, free energy, entropy, pressures
# ==============================================================================
"""
Thermodynamics of the eddy-current continuum between two Drude plates.

Each imaginary frequency xi on the cut carries a Lorentzian share
(1/pi) xi / (xi^2 + omega^2) of the real-frequency density. Integrating the
per-mode free energy T ln[2 sinh(omega / 2T)] against that Lorentzian gives
closed forms (Binet's integral for ln Gamma):

    free energy  K_F(xi, T) = -(xi / 2pi) ln(xi / Lambda) - T mu(z)
    entropy      K_S(xi, T) = mu(z) - z mu'(z)

with z = xi / (2 pi T) and mu(z) = ln Gamma(z) - (z - 1/2) ln z + z - ln(2 pi)/2.
Only the zero-point term depends on the cutoff Lambda, so entropies are
cutoff independent by construction.

Pressures are attraction-positive: P = +dF/dL.
"""
import math
import warnings
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict
from scipy import special

from utils.errors import ConvergenceError, DomainError, RegimeWarning
from utils.mode_density import integrate_over_cut, rho_zero_limit
from utils.numerics import QuadratureSpec, QuadResult, adaptive_integrate, richardson_extrapolate
from utils.units_models import MaterialModel, thouless_frequency

DEFAULT_CUTOFF_RATIO = 5.0
_ZETA3 = float(special.zeta(3.0))
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)
_SERIES_THRESHOLD = 10.0

# Stirling-series coefficients of mu(z) and of mu(z) - z mu'(z), odd powers 1/z, 1/z^3, ...
_MU_SERIES = (1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0)
_ENTROPY_SERIES = (1.0 / 6.0, -1.0 / 90.0, 1.0 / 210.0, -1.0 / 210.0, 5.0 / 594.0)


class QuantityKind(str, Enum):
    ENERGY = "energy"
    PRESSURE = "pressure"
    FREE_ENERGY = "free_energy"
    ENTROPY = "entropy"


class ThermoResult(BaseModel):
    """One thermodynamic value per unit area, in internal units, with its bookkeeping."""
    model_config = ConfigDict(frozen=True)

    quantity: QuantityKind
    value: float
    L: float
    T: float
    gamma: float
    cutoff: Optional[float] = None
    normalization: Optional[float] = None
    error_estimate: float = 0.0
    converged: bool = True

    @property
    def normalized(self) -> float:
        if not self.normalization:
            raise DomainError(f"{self.quantity.value} result carries no normalization")
        return self.value / self.normalization


def default_cutoff(m: MaterialModel) -> float:
    """Lambda = 5 gamma."""
    return DEFAULT_CUTOFF_RATIO * m.gamma


def entropy_scale(L: float) -> float:
    """zeta(3) / (16 pi L^2), the magnitude of the high-temperature entropy plateau."""
    return _ZETA3 / (16.0 * math.pi * L * L)


def perfect_reflector_pressure_T0(L: float) -> float:
    """TE share pi^2 / (480 L^4) of the ideal-mirror Casimir pressure."""
    return math.pi ** 2 / (480.0 * L ** 4)


def perfect_reflector_thermal_pressure(T: float, L: float) -> float:
    """High-temperature ideal-mirror TE pressure zeta(3) T / (8 pi L^3)."""
    return _ZETA3 * T / (8.0 * math.pi * L ** 3)


def _result(quantity: QuantityKind, qr: QuadResult, L: float, T: float, m: MaterialModel,
            cutoff: Optional[float] = None, normalization: Optional[float] = None) -> ThermoResult:
    return ThermoResult(
        quantity=quantity, value=qr.value, L=L, T=T, gamma=m.gamma, cutoff=cutoff,
        normalization=normalization, error_estimate=qr.error_estimate, converged=qr.converged,
    )


def _check_length(L: float) -> None:
    if L <= 0:
        raise DomainError(f"plate separation must be positive, got {L}")


# ------------------------------------------------------------------------------
# 1. Per-mode kernels
# ------------------------------------------------------------------------------

def zero_point_energy_mode(xi: float, Lambda: float) -> float:
    """Zero-point energy -(xi / 2pi) ln(xi / Lambda) of an overdamped mode."""
    if xi <= 0 or Lambda <= 0:
        raise DomainError("zero-point energy needs xi > 0 and Lambda > 0")
    return -(xi / (2.0 * math.pi)) * math.log(xi / Lambda)


def _series(coefficients: Tuple[float, ...], z: float) -> float:
    inverse, inverse_square = 1.0 / z, 1.0 / (z * z)
    total = 0.0
    for c in coefficients:
        total += c * inverse
        inverse *= inverse_square
    return total


def binet_remainder(z: float) -> float:
    """mu(z) = ln Gamma(z) - (z - 1/2) ln z + z - ln(2 pi)/2 (Stirling series above z = 10)."""
    if z > _SERIES_THRESHOLD:
        return _series(_MU_SERIES, z)
    return float(special.gammaln(z)) - (z - 0.5) * math.log(z) + z - _HALF_LOG_TWO_PI


def _bose_free_energy(omega: float, T: float) -> float:
    return T * math.log(-math.expm1(-omega / T))


def _bose_entropy(omega: float, T: float) -> float:
    y = omega / T
    if y > 700.0:
        return 0.0
    return y / math.expm1(y) - math.log(-math.expm1(-y))


def _lorentz_average(fn: Callable[[float], float], xi: float, T: float, spec: QuadratureSpec) -> QuadResult:
    """(1/pi) int_0^inf d omega xi / (xi^2 + omega^2) fn(omega), panelled at xi and T."""
    lo, hi = sorted((xi, T))
    integrand = lambda w: xi / (math.pi * (xi * xi + w * w)) * fn(w)
    total = adaptive_integrate(integrand, 0.0, lo, spec, label="lorentz average")
    total = total + adaptive_integrate(integrand, lo, hi, spec, label="lorentz average")
    return total + adaptive_integrate(integrand, hi, math.inf, spec, label="lorentz average")


def free_energy_kernel(xi: float, T: float, Lambda: float, method: str = "closed_form",
                       spec: Optional[QuadratureSpec] = None) -> float:
    """
    Free energy carried by one unit of cut density at xi.

    Args:
        method: ``closed_form`` (Binet) or ``nested`` (omega quadrature of the
            thermal part against the Lorentzian).
    """
    zero_point = zero_point_energy_mode(xi, Lambda)
    if T == 0:
        return zero_point
    if T < 0:
        raise DomainError(f"temperature must be non-negative, got {T}")
    if method == "nested":
        thermal = _lorentz_average(lambda w: _bose_free_energy(w, T), xi, T, spec or QuadratureSpec())
        return zero_point + thermal.value
    return zero_point - T * binet_remainder(xi / (2.0 * math.pi * T))


def entropy_kernel(xi: float, T: float, method: str = "closed_form",
                   spec: Optional[QuadratureSpec] = None) -> float:
    """
    Entropy carried by one unit of cut density at xi:
    ln Gamma(z) + ln(z)/2 + z - z psi(z) - ln(2 pi)/2 - 1/2, z = xi / (2 pi T).
    """
    if T <= 0:
        raise DomainError(f"entropy needs T > 0, got {T}")
    if method == "nested":
        return _lorentz_average(lambda w: _bose_entropy(w, T), xi, T, spec or QuadratureSpec()).value
    z = xi / (2.0 * math.pi * T)
    if z > _SERIES_THRESHOLD:
        return _series(_ENTROPY_SERIES, z)
    return (float(special.gammaln(z)) + 0.5 * math.log(z) + z - z * float(special.digamma(z))
            - _HALF_LOG_TWO_PI - 0.5)


# ------------------------------------------------------------------------------
# 2. Zero temperature
# ------------------------------------------------------------------------------

def casimir_energy_T0(L: float, m: MaterialModel, Lambda: Optional[float] = None,
                      quad: Optional[QuadratureSpec] = None) -> ThermoResult:
    """E(L) = int_0^gamma d xi rho_tilde(xi; L) [-(xi / 2pi) ln(xi / Lambda)]."""
    _check_length(L)
    quad = quad or QuadratureSpec()
    Lambda = default_cutoff(m) if Lambda is None else Lambda
    if Lambda < m.gamma:
        raise DomainError(f"cutoff Lambda={Lambda} must not be below gamma={m.gamma}")
    qr = integrate_over_cut(lambda xi: zero_point_energy_mode(xi, Lambda), L, m, quad, label="casimir_energy_T0")
    return _result(QuantityKind.ENERGY, qr, L, 0.0, m, cutoff=Lambda)


def length_derivative(fn: Callable[[float], QuadResult], L: float, spec: QuadratureSpec) -> QuadResult:
    """dF/dL by central differences at h, h/2, h/4 (h = length_step * L), Richardson-extrapolated."""
    step = spec.length_step * L
    samples, converged, evaluations = [], True, 0
    for _ in range(3):
        upper, lower = fn(L + step), fn(L - step)
        samples.append((upper.value - lower.value) / (2.0 * step))
        converged = converged and upper.converged and lower.converged
        evaluations += upper.evaluations + lower.evaluations
        step /= 2.0
    limit = richardson_extrapolate(samples, ratio=2.0, order=2, order_step=2)
    return QuadResult(value=limit.value, error_estimate=limit.error_estimate,
                      evaluations=evaluations, converged=converged)


def casimir_pressure_T0(L: float, m: MaterialModel, Lambda: Optional[float] = None,
                        quad: Optional[QuadratureSpec] = None) -> ThermoResult:
    """Attraction-positive pressure dE/dL; negative (repulsive) for Lambda = 5 gamma."""
    _check_length(L)
    quad = quad or QuadratureSpec()
    Lambda = default_cutoff(m) if Lambda is None else Lambda

    def energy(length: float) -> QuadResult:
        e = casimir_energy_T0(length, m, Lambda, quad)
        return QuadResult(value=e.value, error_estimate=e.error_estimate, evaluations=0, converged=e.converged)

    qr = length_derivative(energy, L, quad)
    return _result(QuantityKind.PRESSURE, qr, L, 0.0, m, cutoff=Lambda,
                   normalization=perfect_reflector_pressure_T0(L))


# ------------------------------------------------------------------------------
# 3. Distance asymptotes
# ------------------------------------------------------------------------------

class AsymptoticRegime(str, Enum):
    SHORT = "short"   # L << lambda
    LONG = "long"     # L >> c / gamma


class EnergyAsymptote(BaseModel):
    """
    Asymptotic energy forms with least-squares calibrated prefactors:

    * short: E = c0 - c1 * gamma L ln(Lambda / gamma)
    * long:  E = c0 * gamma^(1/2) L^(-7/2) ln(Lambda L)
    """
    model_config = ConfigDict(frozen=True)

    regime: AsymptoticRegime
    gamma: float
    cutoff: float
    coefficients: Tuple[float, ...]
    lengths: Tuple[float, ...]

    @staticmethod
    def basis(regime: AsymptoticRegime, L: float, gamma: float, cutoff: float) -> Tuple[float, ...]:
        if regime is AsymptoticRegime.SHORT:
            return 1.0, -gamma * L * math.log(cutoff / gamma)
        return (math.sqrt(gamma) * L ** -3.5 * math.log(cutoff * L),)

    def __call__(self, L: float) -> float:
        return float(np.dot(self.coefficients, self.basis(self.regime, L, self.gamma, self.cutoff)))

    def pressure(self, L: float) -> float:
        """dE/dL of the asymptotic form (attraction-positive)."""
        if self.regime is AsymptoticRegime.SHORT:
            return -self.coefficients[1] * self.gamma * math.log(self.cutoff / self.gamma)
        return self.coefficients[0] * math.sqrt(self.gamma) * L ** -4.5 * (1.0 - 3.5 * math.log(self.cutoff * L))

    @classmethod
    def calibrate(cls, m: MaterialModel, regime: AsymptoticRegime, Lambda: Optional[float] = None,
                  quad: Optional[QuadratureSpec] = None,
                  lengths: Optional[Sequence[float]] = None) -> "EnergyAsymptote":
        Lambda = default_cutoff(m) if Lambda is None else Lambda
        if lengths is None:
            factors = (0.01, 0.02, 0.04, 0.08) if regime is AsymptoticRegime.SHORT else (10.0, 20.0, 40.0)
            scale = 1.0 / m.plasma_frequency if regime is AsymptoticRegime.SHORT else 1.0 / m.gamma
            lengths = [f * scale for f in factors]
        energies = [casimir_energy_T0(L, m, Lambda, quad).value for L in lengths]
        design = np.array([cls.basis(regime, L, m.gamma, Lambda) for L in lengths])
        coefficients, *_ = np.linalg.lstsq(design, np.array(energies), rcond=None)
        logger.info("calibrated {} asymptote: coefficients={}", regime.value, coefficients.tolist())
        return cls(regime=regime, gamma=m.gamma, cutoff=Lambda,
                   coefficients=tuple(float(c) for c in coefficients), lengths=tuple(lengths))


def _in_regime(L: float, m: MaterialModel, regime: AsymptoticRegime) -> bool:
    if regime is AsymptoticRegime.SHORT:
        return L * m.plasma_frequency <= 0.1
    return L * m.gamma >= 10.0


def asymptotic_energy(L: float, m: MaterialModel, regime: AsymptoticRegime,
                      Lambda: Optional[float] = None, quad: Optional[QuadratureSpec] = None,
                      asymptote: Optional[EnergyAsymptote] = None) -> float:
    """Evaluate a calibrated asymptote; warns with RegimeWarning outside its regime."""
    _check_length(L)
    regime = AsymptoticRegime(regime)
    if not _in_regime(L, m, regime):
        warnings.warn(f"L={L} is outside the {regime.value}-distance regime", RegimeWarning)
    if asymptote is None:
        asymptote = EnergyAsymptote.calibrate(m, regime, Lambda, quad)
    return asymptote(L)


# ------------------------------------------------------------------------------
# 4. Finite temperature
# ------------------------------------------------------------------------------

def free_energy(T: float, L: float, m: MaterialModel, quad: Optional[QuadratureSpec] = None,
                Lambda: Optional[float] = None) -> ThermoResult:
    """
    F(T, L) = int d xi rho_tilde(xi; L) K_F(xi, T); equals casimir_energy_T0 at T = 0.

    A material with a rate exponent has gamma(0) = 0 and no T = 0 value; pass
    ``m.at_temperature(T_ref)`` to freeze a rate instead.
    """
    _check_length(L)
    if T < 0:
        raise DomainError(f"temperature must be non-negative, got {T}")
    if T == 0:
        if m.rate_exponent is not None:
            raise DomainError("gamma(T) vanishes at T = 0; freeze the scattering rate with at_temperature first")
        result = casimir_energy_T0(L, m, Lambda, quad)
        return result.model_copy(update={"quantity": QuantityKind.FREE_ENERGY})
    quad = quad or QuadratureSpec()
    material = m.at_temperature(T)
    Lambda = default_cutoff(material) if Lambda is None else Lambda
    qr = integrate_over_cut(lambda xi: free_energy_kernel(xi, T, Lambda), L, material, quad, label="free_energy")
    return _result(QuantityKind.FREE_ENERGY, qr, L, T, material, cutoff=Lambda)


def _thermal_part(T: float, L: float, m: MaterialModel, quad: QuadratureSpec) -> QuadResult:
    return integrate_over_cut(
        lambda xi: -T * binet_remainder(xi / (2.0 * math.pi * T)), L, m, quad, label="thermal_free_energy",
    )


def thermal_free_energy(T: float, L: float, m: MaterialModel,
                        quad: Optional[QuadratureSpec] = None) -> ThermoResult:
    """F(T, L) - F(0, L) at the scattering rate of temperature T; cutoff free."""
    _check_length(L)
    if T <= 0:
        raise DomainError(f"thermal free energy needs T > 0, got {T}")
    material = m.at_temperature(T)
    qr = _thermal_part(T, L, material, quad or QuadratureSpec())
    return _result(QuantityKind.FREE_ENERGY, qr, L, T, material)


def entropy(T: float, L: float, m: MaterialModel, quad: Optional[QuadratureSpec] = None,
            method: str = "closed_form", Lambda: Optional[float] = None) -> ThermoResult:
    """
    S(T, L) = int d xi rho_tilde(xi; L) K_S(xi, T).

    Materials with a rate exponent use gamma(T) frozen at the given temperature.

    Args:
        method: ``closed_form`` (digamma kernel), ``nested`` (omega quadrature of
            the per-mode entropy) or ``kernel_difference`` (-dK_F/dT by central
            differences with the cutoff ``Lambda`` kept in the kernel).
    """
    _check_length(L)
    if T <= 0:
        raise DomainError(f"entropy needs T > 0, got {T}")
    quad = quad or QuadratureSpec()
    material = m.at_temperature(T)

    if method == "kernel_difference":
        Lambda = default_cutoff(material) if Lambda is None else Lambda
        h = quad.temperature_step * T
        kernel = lambda xi: -(free_energy_kernel(xi, T + h, Lambda) - free_energy_kernel(xi, T - h, Lambda)) / (2.0 * h)
    elif method in ("closed_form", "nested"):
        kernel = lambda xi: entropy_kernel(xi, T, method, quad)
    else:
        raise DomainError(f"unknown entropy method {method!r}")

    qr = integrate_over_cut(kernel, L, material, quad, label="entropy")
    return _result(QuantityKind.ENTROPY, qr, L, T, material, cutoff=Lambda, normalization=entropy_scale(L))


def s_infinity(L: float, m: MaterialModel, quad: Optional[QuadratureSpec] = None) -> ThermoResult:
    """
    High-temperature entropy plateau S_inf(L) = -(1/2) int d xi rho_tilde(xi; L) ln xi.

    Its ratio to -zeta(3) / (16 pi L^2) is the shape factor f(L / lambda).
    """
    _check_length(L)
    qr = integrate_over_cut(lambda xi: -0.5 * math.log(xi), L, m, quad or QuadratureSpec(), label="s_infinity")
    return _result(QuantityKind.ENTROPY, qr, L, math.inf, m, normalization=entropy_scale(L))


def plateau_factor(L: float, m: MaterialModel, quad: Optional[QuadratureSpec] = None) -> float:
    """
    f(L / lambda) = -S_inf(L) / (zeta(3) / (16 pi L^2)), tending to 1 for L >> lambda.

    Raises:
        ConvergenceError: The plateau integral did not reach its tolerance.
    """
    result = s_infinity(L, m, quad)
    if not result.converged:
        raise ConvergenceError(f"entropy plateau at L={L} did not converge", residual=result.error_estimate)
    return -result.normalized


def entropy_asymptotes(T: float, L: float, m: MaterialModel) -> float:
    """
    Closed-form entropy limits: (pi^2/3) T rho(0; L) for T < xi_L, else -zeta(3) / (16 pi L^2).
    """
    _check_length(L)
    if T < 0:
        raise DomainError(f"temperature must be non-negative, got {T}")
    material = m.at_temperature(T) if T > 0 else m
    if T < thouless_frequency(material, L):
        return math.pi ** 2 / 3.0 * T * rho_zero_limit(L, material)
    return -entropy_scale(L)


def thermal_pressure_eddy(T: float, L: float, m: MaterialModel,
                          quad: Optional[QuadratureSpec] = None) -> ThermoResult:
    """Temperature-dependent eddy pressure P(T, L) - P(0, L) = d[F(T) - F(0)]/dL."""
    _check_length(L)
    if T <= 0:
        raise DomainError(f"thermal pressure needs T > 0, got {T}")
    quad = quad or QuadratureSpec()
    material = m.at_temperature(T)
    qr = length_derivative(lambda length: _thermal_part(T, length, material, quad), L, quad)
    return _result(QuantityKind.PRESSURE, qr, L, T, material,
                   normalization=perfect_reflector_thermal_pressure(T, L))


def low_temperature_coefficients(temperatures: Sequence[float], values: Sequence[float]) -> Tuple[float, float]:
    """
    Fit F(T) - F(0) = a T^2 + b T^(5/2) + c T^3 and return (a, b).

    The cubic column absorbs the next order so the first two coefficients are stable.
    """
    t = np.asarray(temperatures, dtype=float)
    if t.size < 4:
        raise DomainError("at least four temperatures are needed for the low-temperature fit")
    design = np.column_stack([t ** 2, t ** 2.5, t ** 3])
    coefficients, *_ = np.linalg.lstsq(design, np.asarray(values, dtype=float), rcond=None)
    return float(coefficients[0]), float(coefficients[1])
