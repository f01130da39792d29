# ==============================================================================
# 🧲 Units & Material Models - constants, dimensionless units, Drude / plasma
# ==============================================================================
"""
Material dielectric models and the dimensionless unit system.

Internal units fix hbar = c = k_B = 1 and measure frequencies in units of the
plasma frequency, lengths in units of the penetration depth lambda = c / Omega,
temperatures in units of hbar Omega / k_B and energies per area in units of
hbar Omega / lambda^2. SI values only appear through :class:`UnitSystem`.
"""
from enum import Enum
from typing import Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from scipy import constants

from utils.errors import ConfigError, NotApplicableError, PoleEvaluationError


class MaterialKind(str, Enum):
    DRUDE = "drude"
    PLASMA = "plasma"


class MaterialModel(BaseModel):
    """
    Drude (Omega, gamma) or plasma (Omega) description of a metal.

    ``gamma`` is the scattering rate; with ``rate_exponent`` set it is the
    reference value gamma_0 reached at ``T_ref`` and the rate follows
    gamma(T) = gamma_0 (T / T_ref)^n (perfect-crystal scaling).
    """
    model_config = ConfigDict(frozen=True)

    kind: MaterialKind = MaterialKind.DRUDE
    plasma_frequency: float = Field(1.0, gt=0.0)
    gamma: float = Field(0.0, ge=0.0)
    rate_exponent: Optional[int] = Field(None, ge=2)
    T_ref: Optional[float] = Field(None, gt=0.0)

    @model_validator(mode="after")
    def _check_kind(self) -> "MaterialModel":
        if self.kind is MaterialKind.DRUDE and self.gamma <= 0.0:
            raise ValueError("a Drude material needs gamma > 0")
        if self.kind is MaterialKind.PLASMA and self.gamma != 0.0:
            raise ValueError("the plasma model has no scattering rate (gamma must be 0)")
        if self.rate_exponent is not None:
            if self.kind is not MaterialKind.DRUDE:
                raise ValueError("rate_exponent only applies to Drude materials")
            if self.T_ref is None:
                raise ValueError("rate_exponent needs a reference temperature T_ref")
        return self

    @classmethod
    def drude(cls, gamma: float, plasma_frequency: float = 1.0,
              rate_exponent: Optional[int] = None, T_ref: Optional[float] = None) -> "MaterialModel":
        return cls(kind=MaterialKind.DRUDE, gamma=gamma, plasma_frequency=plasma_frequency,
                   rate_exponent=rate_exponent, T_ref=T_ref)

    @classmethod
    def plasma(cls, plasma_frequency: float = 1.0) -> "MaterialModel":
        return cls(kind=MaterialKind.PLASMA, plasma_frequency=plasma_frequency)

    @property
    def is_drude(self) -> bool:
        return self.kind is MaterialKind.DRUDE

    def at_temperature(self, T: float) -> "MaterialModel":
        """Freeze the scattering rate at temperature ``T`` (identity without rate_exponent)."""
        if self.rate_exponent is None:
            return self
        return MaterialModel.drude(scattering_rate_at(self, T), self.plasma_frequency)


# ------------------------------------------------------------------------------
# Dielectric function
# ------------------------------------------------------------------------------

def drude_epsilon(omega: complex, m: MaterialModel) -> complex:
    """
    Permittivity 1 - Omega^2 / [omega (omega + i gamma)] (plasma: gamma = 0).

    Raises:
        PoleEvaluationError: At omega = 0 or omega = -i gamma.
    """
    omega = complex(omega)
    denominator = omega * (omega + 1j * m.gamma)
    if denominator == 0:
        raise PoleEvaluationError(f"dielectric function evaluated at its pole omega={omega}")
    return 1.0 - m.plasma_frequency ** 2 / denominator


def omega2_epsilon(omega: complex, m: MaterialModel) -> complex:
    """omega^2 eps(omega) = omega^2 - Omega^2 omega / (omega + i gamma), regular at omega = 0."""
    omega = complex(omega)
    shifted = omega + 1j * m.gamma
    if shifted == 0:
        raise PoleEvaluationError("omega^2 eps(omega) evaluated at omega = -i gamma")
    return omega * omega - m.plasma_frequency ** 2 * omega / shifted


def omega2_epsilon_derivative(omega: complex, m: MaterialModel) -> complex:
    """d[omega^2 eps(omega)]/d omega = 2 omega - i gamma Omega^2 / (omega + i gamma)^2."""
    omega = complex(omega)
    shifted = omega + 1j * m.gamma
    if shifted == 0:
        raise PoleEvaluationError("derivative evaluated at omega = -i gamma")
    return 2.0 * omega - 1j * m.gamma * m.plasma_frequency ** 2 / (shifted * shifted)


# ------------------------------------------------------------------------------
# Transport scales
# ------------------------------------------------------------------------------

def diffusion_coefficient(m: MaterialModel) -> float:
    """Electromagnetic diffusion constant D = gamma lambda^2 = gamma / Omega^2 (c = 1)."""
    if not m.is_drude:
        raise NotApplicableError("the plasma model has no diffusive transport")
    return m.gamma / m.plasma_frequency ** 2


def thouless_frequency(m: MaterialModel, L: float) -> float:
    """xi_L = D / L^2."""
    if L <= 0:
        raise ValueError(f"plate separation must be positive, got {L}")
    return diffusion_coefficient(m) / (L * L)


def scattering_rate_at(m: MaterialModel, T: float) -> float:
    """gamma_0 without a rate exponent, else gamma_0 (T / T_ref)^n."""
    if T < 0:
        raise ValueError(f"temperature must be non-negative, got {T}")
    if m.rate_exponent is None:
        return m.gamma
    return m.gamma * (T / m.T_ref) ** m.rate_exponent


# ------------------------------------------------------------------------------
# SI conversion (used by the CLI layer only)
# ------------------------------------------------------------------------------

class UnitSystem:
    """
    Conversion between internal units and SI for a metal of given penetration depth.

    Args:
        penetration_depth_m (float): lambda = c / Omega in metres (gold: ~20 nm).
    """

    def __init__(self, penetration_depth_m: float):
        if penetration_depth_m <= 0:
            raise ValueError("penetration depth must be positive")
        self.penetration_depth_m = penetration_depth_m
        self.plasma_frequency_si = constants.c / penetration_depth_m

    @classmethod
    def from_plasma_energy_ev(cls, hbar_omega_ev: float) -> "UnitSystem":
        omega = hbar_omega_ev * constants.e / constants.hbar
        return cls(constants.c / omega)

    def frequency_from_kelvin(self, kelvin: float) -> float:
        """k_B T (or hbar * rate) given in kelvin -> dimensionless frequency."""
        return constants.k * kelvin / (constants.hbar * self.plasma_frequency_si)

    def frequency_to_kelvin(self, value: float) -> float:
        return value * constants.hbar * self.plasma_frequency_si / constants.k

    def length_from_nm(self, nm: float) -> float:
        return nm * 1e-9 / self.penetration_depth_m

    def length_to_nm(self, value: float) -> float:
        return value * self.penetration_depth_m * 1e9

    def pressure_to_pascal(self, value: float) -> float:
        return value * constants.hbar * self.plasma_frequency_si / self.penetration_depth_m ** 3

    def energy_to_si(self, value: float) -> float:
        """Energy per area -> J / m^2."""
        return value * constants.hbar * self.plasma_frequency_si / self.penetration_depth_m ** 2

    def entropy_to_si(self, value: float) -> float:
        """Entropy per area -> J / (K m^2)."""
        return value * constants.k / self.penetration_depth_m ** 2


# ------------------------------------------------------------------------------
# Config loading
# ------------------------------------------------------------------------------

_MATERIAL_KEYS = ("kind", "gamma", "rate_exponent", "gamma_ref", "T_ref", "plasma_frequency")


def material_from_mapping(values: Mapping[str, Optional[str]]) -> MaterialModel:
    """
    Build a MaterialModel from key/value strings.

    Accepts bare keys (``kind``, ``gamma`` ...) or the ``material.`` section prefix.
    ``gamma_ref`` is the reference rate gamma_0 of the power law and takes
    precedence over ``gamma`` when ``rate_exponent`` is given.
    """
    fields = {}
    for key in _MATERIAL_KEYS:
        raw = values.get(f"material.{key}", values.get(key))
        if raw is not None and str(raw).strip() != "":
            fields[key] = str(raw).strip()

    if "gamma_ref" in fields:
        reference = fields.pop("gamma_ref")
        if "rate_exponent" in fields or "gamma" not in fields:
            fields["gamma"] = reference
    if "kind" in fields:
        fields["kind"] = fields["kind"].lower()
        if fields["kind"] == MaterialKind.PLASMA.value:
            fields.pop("gamma", None)

    try:
        return MaterialModel(**fields)
    except ValidationError as exc:
        first = exc.errors()[0]
        key = ".".join(str(part) for part in first.get("loc", ())) or None
        raise ConfigError(first.get("msg", str(exc)), key=f"material.{key}" if key else None) from exc
