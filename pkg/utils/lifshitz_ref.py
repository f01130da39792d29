# ==============================================================================
# 🧮 Lifshitz Reference - TE Matsubara sums for Drude, plasma and ideal mirrors
# ==============================================================================
"""
Reference TE-polarization Lifshitz free energy and pressure of two identical
mirrors, summed over imaginary (Matsubara) frequencies xi_n = 2 pi n T.

The k integral is written in kappa = sqrt(k^2 + xi^2), k dk = kappa d kappa,
and cut at kappa = xi + k_cutoff / L. On the imaginary axis
kappa_m^2 = kappa^2 + Omega^2 xi / (xi + gamma), so every reflection
coefficient is real.
"""
import math
from enum import Enum
from typing import Callable, Optional

from loguru import logger
from pydantic import BaseModel, ConfigDict, model_validator

from utils.errors import ConvergenceError, DomainError
from utils.mode_density import rho_lifshitz_real
from utils.numerics import (
    ZERO_RESULT,
    ConvergenceLedger,
    QuadratureSpec,
    QuadResult,
    adaptive_integrate,
    integrate_panels,
    log_panel_edges,
)
from utils.thermo import (
    QuantityKind,
    ThermoResult,
    entropy_scale,
    perfect_reflector_pressure_T0,
    perfect_reflector_thermal_pressure,
)
from utils.units_models import MaterialKind, MaterialModel

_TAIL_RUN = 3


class MirrorKind(str, Enum):
    DRUDE = "drude"
    PLASMA = "plasma"
    PERFECT_REFLECTOR = "perfect"


class Mirror(BaseModel):
    """A mirror of the reference calculation; ideal mirrors carry no material."""
    model_config = ConfigDict(frozen=True)

    kind: MirrorKind
    material: Optional[MaterialModel] = None

    @model_validator(mode="after")
    def _check_material(self) -> "Mirror":
        if self.kind is MirrorKind.PERFECT_REFLECTOR:
            if self.material is not None:
                raise ValueError("a perfect reflector takes no material")
        elif self.material is None or self.material.kind.value != self.kind.value:
            raise ValueError(f"a {self.kind.value} mirror needs a {self.kind.value} material")
        return self

    @classmethod
    def from_material(cls, m: MaterialModel) -> "Mirror":
        kind = MirrorKind.DRUDE if m.kind is MaterialKind.DRUDE else MirrorKind.PLASMA
        return cls(kind=kind, material=m)

    @classmethod
    def perfect(cls) -> "Mirror":
        return cls(kind=MirrorKind.PERFECT_REFLECTOR)

    @property
    def gamma(self) -> float:
        return self.material.gamma if self.material is not None else 0.0

    def at_temperature(self, T: float) -> "Mirror":
        if self.material is None or T <= 0:
            return self
        return Mirror(kind=self.kind, material=self.material.at_temperature(T))

    def coupling(self, xi: float) -> float:
        """kappa_m^2 - kappa^2 = xi^2 (eps(i xi) - 1) at imaginary frequency i xi."""
        m = self.material
        if self.kind is MirrorKind.PLASMA:
            return m.plasma_frequency ** 2
        return m.plasma_frequency ** 2 * xi / (xi + m.gamma)

    def reflectance(self, kv: float, coupling: float) -> float:
        """r_TE^2 on the imaginary axis."""
        if self.kind is MirrorKind.PERFECT_REFLECTOR:
            return 1.0
        if coupling == 0.0:
            return 0.0
        km = math.sqrt(kv * kv + coupling)
        # (kappa - kappa_m) = -coupling / (kappa + kappa_m) avoids cancellation
        r = -coupling / (kv + km) ** 2
        return r * r


# ------------------------------------------------------------------------------
# 1. Single-frequency k integrals
# ------------------------------------------------------------------------------

def _frequency_term(xi: float, L: float, mirror: Mirror, quad: QuadratureSpec, pressure: bool) -> QuadResult:
    """int k dk/(2pi) of ln(1 - r^2 e) (free energy) or 2 kappa r^2 e/(1 - r^2 e) (pressure)."""
    coupling = 0.0 if mirror.kind is MirrorKind.PERFECT_REFLECTOR else mirror.coupling(xi)
    if mirror.kind is MirrorKind.DRUDE and coupling == 0.0:
        return ZERO_RESULT

    def integrand(kv: float) -> float:
        reflected = mirror.reflectance(kv, coupling) * math.exp(-2.0 * kv * L)
        if pressure:
            return kv * 2.0 * kv * reflected / (1.0 - reflected)
        return kv * math.log1p(-reflected)

    label = "lifshitz pressure" if pressure else "lifshitz free energy"
    return adaptive_integrate(integrand, xi, xi + quad.k_cutoff / L, quad, label=label).scaled(1.0 / (2.0 * math.pi))


def _matsubara_sum(T: float, L: float, mirror: Mirror, quad: QuadratureSpec, pressure: bool) -> QuadResult:
    """T sum'_{n >= 0} of the frequency terms, stopped once the tail drops below rel_tol."""
    total = _frequency_term(0.0, L, mirror, quad, pressure).scaled(0.5)
    small_run = 0
    for n in range(1, quad.matsubara_max_terms + 1):
        term = _frequency_term(2.0 * math.pi * n * T, L, mirror, quad, pressure)
        total = total + term
        if abs(term.value) <= quad.rel_tol * abs(total.value):
            small_run += 1
            if small_run >= _TAIL_RUN:
                logger.debug("Matsubara sum converged after {} terms (T={}, L={})", n + 1, T, L)
                return total.scaled(T)
        else:
            small_run = 0
    residual = abs(term.value / total.value) if total.value else math.inf
    raise ConvergenceError(f"Matsubara sum not converged in {quad.matsubara_max_terms} terms", residual=residual)


def _continuum(L: float, mirror: Mirror, quad: QuadratureSpec, pressure: bool) -> QuadResult:
    """T -> 0 limit of the sum: int_0^inf d xi / (2pi) of the frequency terms."""
    ledger = ConvergenceLedger()
    scale = min(mirror.gamma, 1.0 / L) if mirror.gamma > 0 else 1.0 / L
    edges = log_panel_edges(1e-3 * scale, quad.k_cutoff / L, quad.panels_per_decade)
    outer = integrate_panels(
        lambda xi: ledger.value(_frequency_term(xi, L, mirror, quad, pressure)),
        edges, quad, label="lifshitz continuum",
    )
    return ledger.seal(outer).scaled(1.0 / (2.0 * math.pi))


def _thermo(quantity: QuantityKind, qr: QuadResult, T: float, L: float, mirror: Mirror,
            normalization: Optional[float] = None) -> ThermoResult:
    return ThermoResult(quantity=quantity, value=qr.value, L=L, T=T, gamma=mirror.gamma,
                        normalization=normalization, error_estimate=qr.error_estimate, converged=qr.converged)


def _check(T: float, L: float) -> None:
    if L <= 0:
        raise DomainError(f"plate separation must be positive, got {L}")
    if T < 0:
        raise DomainError(f"temperature must be non-negative, got {T}")


# ------------------------------------------------------------------------------
# 2. Free energy and pressure
# ------------------------------------------------------------------------------

def matsubara_free_energy(T: float, L: float, mirror: Mirror,
                          quad: Optional[QuadratureSpec] = None) -> ThermoResult:
    """
    TE free energy per area F = T sum'_n int k dk/(2pi) ln[1 - r^2 exp(-2 kappa_n L)].

    T = 0 gives the zero-point energy through the continuum integral.
    """
    _check(T, L)
    quad = quad or QuadratureSpec()
    mirror = mirror.at_temperature(T)
    if T == 0:
        qr = _continuum(L, mirror, quad, pressure=False)
        return _thermo(QuantityKind.ENERGY, qr, T, L, mirror)
    return _thermo(QuantityKind.FREE_ENERGY, _matsubara_sum(T, L, mirror, quad, pressure=False), T, L, mirror)


def casimir_energy_T0(L: float, mirror: Mirror, quad: Optional[QuadratureSpec] = None) -> ThermoResult:
    return matsubara_free_energy(0.0, L, mirror, quad)


def lifshitz_pressure(T: float, L: float, mirror: Mirror,
                      quad: Optional[QuadratureSpec] = None) -> ThermoResult:
    """Attraction-positive TE pressure dF/dL, differentiated under the integral."""
    _check(T, L)
    quad = quad or QuadratureSpec()
    mirror = mirror.at_temperature(T)
    if T == 0:
        qr = _continuum(L, mirror, quad, pressure=True)
    else:
        qr = _matsubara_sum(T, L, mirror, quad, pressure=True)
    return _thermo(QuantityKind.PRESSURE, qr, T, L, mirror, normalization=perfect_reflector_pressure_T0(L))


def thermal_pressure(T: float, L: float, mirror: Mirror,
                     quad: Optional[QuadratureSpec] = None) -> ThermoResult:
    """P(T, L) - P(0, L), normalized to zeta(3) T / (8 pi L^3)."""
    if T <= 0:
        raise DomainError(f"thermal pressure needs T > 0, got {T}")
    quad = quad or QuadratureSpec()
    hot = lifshitz_pressure(T, L, mirror, quad)
    # the T = 0 reference keeps the scattering rate of temperature T
    cold_mirror = mirror.at_temperature(T)
    cold = _continuum(L, cold_mirror, quad, pressure=True)
    return ThermoResult(
        quantity=QuantityKind.PRESSURE, value=hot.value - cold.value, L=L, T=T, gamma=cold_mirror.gamma,
        normalization=perfect_reflector_thermal_pressure(T, L),
        error_estimate=hot.error_estimate + cold.error_estimate,
        converged=hot.converged and cold.converged,
    )



def matsubara_thermal_free_energy(T: float, L: float, mirror: Mirror,
                                  quad: Optional[QuadratureSpec] = None) -> ThermoResult:
    """F(T, L) - F(0, L) from the Matsubara sum, both at the scattering rate of temperature T."""
    if T <= 0:
        raise DomainError(f"thermal free energy needs T > 0, got {T}")
    quad = quad or QuadratureSpec()
    hot = matsubara_free_energy(T, L, mirror, quad)
    cold_mirror = mirror.at_temperature(T)
    cold = _continuum(L, cold_mirror, quad, pressure=False)
    return ThermoResult(
        quantity=QuantityKind.FREE_ENERGY, value=hot.value - cold.value, L=L, T=T, gamma=cold_mirror.gamma,
        error_estimate=hot.error_estimate + cold.error_estimate,
        converged=hot.converged and cold.converged,
    )


def static_plateau_factor(L: float, m: MaterialModel, quad: Optional[QuadratureSpec] = None) -> float:
    """
    Entropy (-1/2) int k dk/(2pi) ln[1 - r_p^2(k) exp(-2 k L)] of the static plasma TE term,
    over zeta(3) / (16 pi L^2).

    A Drude mirror lacks exactly this term, so it is the high-temperature
    plateau factor of the eddy-current entropy; 1 for ideal mirrors.
    """
    _check(0.0, L)
    plasma = Mirror.from_material(MaterialModel.plasma(m.plasma_frequency))
    term = _frequency_term(0.0, L, plasma, quad or QuadratureSpec(), pressure=False)
    return -0.5 * term.value / entropy_scale(L)

# ------------------------------------------------------------------------------
# 3. Real-frequency route
# ------------------------------------------------------------------------------

def _thermal_occupation(omega: float, T: float) -> float:
    return T * math.log(-math.expm1(-omega / T))


def _real_axis_average(fn: Callable[[float], float], T: float, L: float, m: MaterialModel,
                       quad: QuadratureSpec) -> QuadResult:
    ledger = ConvergenceLedger()
    edges = log_panel_edges(1e-4 * T, 40.0 * T, quad.panels_per_decade)
    outer = integrate_panels(
        lambda w: ledger.value(rho_lifshitz_real(w, L, m, quad)) * fn(w) if w > 0 else 0.0,
        edges, quad, label="real-frequency free energy",
    )
    return ledger.seal(outer)


def real_frequency_thermal_free_energy(T: float, L: float, m: MaterialModel,
                                       quad: Optional[QuadratureSpec] = None) -> ThermoResult:
    """int_0^inf d omega rho_L(omega; L) T ln(1 - exp(-omega / T)) with the full TE density."""
    _check(T, L)
    if T == 0:
        raise DomainError("the thermal part needs T > 0")
    quad = quad or QuadratureSpec()
    material = m.at_temperature(T)
    qr = _real_axis_average(lambda w: _thermal_occupation(w, T), T, L, material, quad)
    return ThermoResult(quantity=QuantityKind.FREE_ENERGY, value=qr.value, L=L, T=T, gamma=material.gamma,
                        error_estimate=qr.error_estimate, converged=qr.converged)


def real_frequency_free_energy(T: float, L: float, m: MaterialModel,
                               quad: Optional[QuadratureSpec] = None) -> ThermoResult:
    """
    Free energy from the real-frequency density.

    Only the thermal part is a real-axis average over rho_L(omega; L); the
    zero-point part is the imaginary-axis continuum of :func:`matsubara_free_energy`,
    so a comparison with the Matsubara sum tests the thermal parts alone.
    """
    quad = quad or QuadratureSpec()
    material = m.at_temperature(T) if T > 0 else m
    zero_point = matsubara_free_energy(0.0, L, Mirror.from_material(material), quad)
    if T == 0:
        return zero_point
    thermal = real_frequency_thermal_free_energy(T, L, m, quad)
    return ThermoResult(
        quantity=QuantityKind.FREE_ENERGY, value=zero_point.value + thermal.value, L=L, T=T,
        gamma=material.gamma, error_estimate=zero_point.error_estimate + thermal.error_estimate,
        converged=zero_point.converged and thermal.converged,
    )
