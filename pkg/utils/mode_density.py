# ==============================================================================
# 📈 Mode Density - branch-cut density, real-frequency DOS, Lifshitz DOS
# ==============================================================================
"""
Densities of states of two identical plates at separation L (TE polarization).

On the branch cut omega = -i xi + 0 the reflection amplitude is a pure phase,
r^2 = exp(4 i theta) with theta = atan2(k_z, kappa), and the integrated phase

    N(xi; L) = (1/pi) * int d^2k/(2pi)^2  Im log[1 - r^2 exp(-2 kappa L)]

is non-zero only for k < k_max(xi). The cut density is rho_tilde = -dN/dxi.

All k integrals on the cut use k = k_max cos t, k_z = k_max sin t, so the
moving endpoint k = k_max sits at t = 0 where the phase vanishes; no boundary
term appears and the 1/k_z singularity of d/dxi is absorbed by the Jacobian.
"""
import cmath
import math
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, model_validator

from utils.em_response import (
    BranchSide,
    cut_wavevector,
    dispersion_te,
    log_dispersion_derivative,
)
from utils.errors import BranchPointError, DomainError, NotApplicableError
from utils.numerics import (
    ZERO_RESULT,
    ConvergenceLedger,
    QuadratureSpec,
    QuadResult,
    adaptive_integrate,
    integrate_panels,
    log_panel_edges,
)
from utils.units_models import MaterialModel, diffusion_coefficient, thouless_frequency

_HALF_PI = 0.5 * math.pi
_MEASURE = 1.0 / (2.0 * math.pi ** 2)   # (1/pi) * 1/(2pi) from d^2k/(2pi)^2 and the phase prefactor


# ------------------------------------------------------------------------------
# 1. Types
# ------------------------------------------------------------------------------

class SpectralAxis(str, Enum):
    IMAGINARY_CUT = "xi"
    REAL_FREQUENCY = "omega"


class SpectralCurve(BaseModel):
    """Sampled density per unit area and unit frequency (TE polarization)."""
    model_config = ConfigDict(frozen=True)

    axis: SpectralAxis
    L: float
    gamma: float
    samples: List[Tuple[float, float]]
    converged: List[bool]
    polarization: str = "TE"

    @model_validator(mode="after")
    def _check_samples(self) -> "SpectralCurve":
        frequencies = [f for f, _ in self.samples]
        if any(b <= a for a, b in zip(frequencies[:-1], frequencies[1:])):
            raise ValueError("spectral curve frequencies must be strictly increasing")
        if self.axis is SpectralAxis.IMAGINARY_CUT and frequencies:
            if frequencies[0] <= 0.0 or frequencies[-1] > self.gamma:
                raise ValueError("branch-cut samples must lie in (0, gamma]")
        if len(self.converged) != len(self.samples):
            raise ValueError("one convergence flag per sample is required")
        return self

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([f for f, _ in self.samples])

    @property
    def densities(self) -> np.ndarray:
        return np.array([d for _, d in self.samples])


class SumRuleCheck(BaseModel):
    """Both sides of the omega-xi sum rule at one imaginary frequency."""
    xi: float
    from_real_axis: float
    from_cut: float

    @property
    def relative_error(self) -> float:
        return abs(self.from_real_axis - self.from_cut) / abs(self.from_cut)


# ------------------------------------------------------------------------------
# 2. Branch-cut geometry
# ------------------------------------------------------------------------------

def _check_arguments(xi: float, L: float, m: MaterialModel) -> None:
    if not m.is_drude:
        raise NotApplicableError("the plasma model has no eddy-current branch cut")
    if L <= 0:
        raise DomainError(f"plate separation must be positive, got {L}")
    if xi <= 0:
        raise DomainError(f"cut frequency must be positive, got {xi}")


def _cut_window(xi: float, L: float, m: MaterialModel, spec: QuadratureSpec) -> Optional[Tuple[float, float]]:
    """(k_max, t0) of the on-cut region, or None when it is empty or fully suppressed."""
    if xi >= m.gamma:
        return None
    k_max = cut_wavevector(xi, m)
    k_cut_square = (spec.k_cutoff / L) ** 2 - xi * xi
    if k_max == 0.0 or k_cut_square <= 0.0:
        return None
    t0 = math.acos(min(1.0, math.sqrt(k_cut_square) / k_max))
    return k_max, t0


def _cut_side_sign(xi: float, m: MaterialModel) -> float:
    """kappa_m = -i * sign * k_z on the right-hand side of the cut."""
    drift = 2.0 * xi - m.gamma * m.plasma_frequency ** 2 / (m.gamma - xi) ** 2
    return -1.0 if drift > 0 else 1.0


# k_max * L below which the cut integrals switch to their small-window expansion
SMALL_WINDOW = 1e-4


def _window_breakpoints(k_max: float, L: float) -> Optional[List[float]]:
    """
    Breakpoints in t around the step of arg(1 - z), which sits at t ~ k_max L / 2.

    For k_max L << 1 the step is far narrower than [0, pi/2] and an unguided
    Gauss-Kronrod rule steps over it.
    """
    a = k_max * L
    if a >= 1.0:
        return None
    return [f * a for f in (0.05, 0.25, 1.0, 4.0, 16.0) if f * a < _HALF_PI]


def _small_window_count(k_max: float, L: float) -> QuadResult:
    """
    N(xi; L) for a = k_max L << 1.

    Away from t = 0 the phase is 2 theta - pi/2 + kappa L cot(2 theta), whose
    zeroth order integrates to zero; the boundary layer at t ~ a adds -pi a^2 / 16.
    """
    a = k_max * L
    value = _MEASURE * k_max ** 2 * (a / 6.0 - math.pi * a * a / 16.0)
    return QuadResult(value=value, error_estimate=abs(value) * a * a, evaluations=0, converged=True)


def _small_window_density(xi: float, k_max: float, L: float, m: MaterialModel) -> QuadResult:
    """-d/dxi of :func:`_small_window_count`; tends to -L sqrt(xi) / (8 pi^2 gamma^1.5) as xi -> 0."""
    a = k_max * L
    dk_max = (m.plasma_frequency ** 2 * m.gamma / (m.gamma - xi) ** 2 - 2.0 * xi) / (2.0 * k_max)
    value = -_MEASURE * dk_max * (0.5 * L * k_max ** 2 - 0.25 * math.pi * L * L * k_max ** 3)
    return QuadResult(value=value, error_estimate=abs(value) * a * a, evaluations=0, converged=True)


# ------------------------------------------------------------------------------
# 3. Integrated phase and branch-cut density
# ------------------------------------------------------------------------------

def mode_count(xi: float, L: float, m: MaterialModel, quad: QuadratureSpec) -> QuadResult:
    """Integrated phase N(xi; L), whose negative xi-derivative is rho_tilde."""
    _check_arguments(xi, L, m)
    window = _cut_window(xi, L, m, quad)
    if window is None:
        return ZERO_RESULT
    k_max, t0 = window
    if k_max * L < SMALL_WINDOW:
        return _small_window_count(k_max, L)
    sign = _cut_side_sign(xi, m)

    def integrand(t: float) -> float:
        k = k_max * math.cos(t)
        kz = k_max * math.sin(t)
        kv = math.hypot(k, xi)
        theta = math.atan2(sign * kz, kv)
        z = math.exp(-2.0 * kv * L) * cmath.exp(4j * theta)
        return k * kz * cmath.phase(1.0 - z)

    return adaptive_integrate(integrand, t0, _HALF_PI, quad, points=_window_breakpoints(k_max, L),
                              label="mode_count").scaled(_MEASURE)


def _finite_difference_density(count: Callable[[float], QuadResult], x: float, h: float) -> QuadResult:
    """-dN/dx by the five-point stencil, with errors carried through."""
    weights = ((2.0, -1.0), (1.0, 8.0), (-1.0, -8.0), (-2.0, 1.0))
    results = [(w, count(x + offset * h)) for offset, w in weights]
    value = -sum(w * r.value for w, r in results) / (12.0 * h)
    error = sum(abs(w) * r.error_estimate for w, r in results) / (12.0 * h)
    return QuadResult(
        value=value,
        error_estimate=error,
        evaluations=sum(r.evaluations for _, r in results),
        converged=all(r.converged for _, r in results),
    )


def rho_tilde(xi: float, L: float, m: MaterialModel, quad: QuadratureSpec) -> QuadResult:
    """
    Branch-cut mode density rho_tilde(xi; L) = -dN/dxi.

    The analytic route differentiates log D_TE along the cut through
    d/dxi = -i d/domega, so d(Im log D)/dxi = -Re(D'/D). With
    ``quad.derivative_method == "finite_difference"`` the five-point stencil on
    :func:`mode_count` is used instead, with step fd_step * xi.
    """
    _check_arguments(xi, L, m)
    if xi >= m.gamma:
        return ZERO_RESULT
    if quad.derivative_method == "finite_difference":
        h = min(quad.fd_step * xi, 0.25 * (m.gamma - xi))
        return _finite_difference_density(lambda x: mode_count(x, L, m, quad), xi, h)

    window = _cut_window(xi, L, m, quad)
    if window is None:
        return ZERO_RESULT
    k_max, t0 = window
    if k_max * L < SMALL_WINDOW:
        return _small_window_density(xi, k_max, L, m)
    omega = complex(0.0, -xi)

    def integrand(t: float) -> float:
        k = k_max * math.cos(t)
        kz = k_max * math.sin(t)
        try:
            derivative = log_dispersion_derivative(k, omega, L, m, BranchSide.RIGHT_HALF_PLANE)
        except BranchPointError:
            return 0.0
        return k * kz * derivative.real

    # -(-Re D'/D) folds the sign of rho_tilde = -dN/dxi into the integrand
    return adaptive_integrate(integrand, t0, _HALF_PI, quad, points=_window_breakpoints(k_max, L),
                              label="rho_tilde").scaled(_MEASURE)


def rho_tilde_scattering(xi: float, L: float, m: MaterialModel, quad: QuadratureSpec) -> QuadResult:
    """
    Branch-cut density from the diffusive scattering phase.

    With r_D^2 = exp(4 i theta) and z = r_D^2 exp(-2 kappa L), the per-k
    density is -(1/pi) d/dxi Im log(1 - z) = (1/pi) Im[z' / (1 - z)], evaluated
    in closed form from kappa' = xi / kappa and k_z k_z' = (s' - 2 xi) / 2,
    s(xi) = Omega^2 xi / (gamma - xi).
    """
    _check_arguments(xi, L, m)
    window = _cut_window(xi, L, m, quad)
    if window is None:
        return ZERO_RESULT
    k_max, t0 = window
    if k_max * L < SMALL_WINDOW:
        return _small_window_density(xi, k_max, L, m)
    omega_p2 = m.plasma_frequency ** 2
    s = omega_p2 * xi / (m.gamma - xi)
    ds = omega_p2 * m.gamma / (m.gamma - xi) ** 2
    sign = _cut_side_sign(xi, m)

    def integrand(t: float) -> float:
        k = k_max * math.cos(t)
        kz = k_max * math.sin(t)
        kv = math.hypot(k, xi)
        dkv = xi / kv
        theta = math.atan2(sign * kz, kv)
        kz_dtheta = sign * (0.5 * kv * (ds - 2.0 * xi) - kz * kz * dkv) / s
        z = math.exp(-2.0 * kv * L) * cmath.exp(4j * theta)
        kz_dz = z * complex(-2.0 * L * dkv * kz, 4.0 * kz_dtheta)
        return k * (kz_dz / (1.0 - z)).imag

    return adaptive_integrate(integrand, t0, _HALF_PI, quad, points=_window_breakpoints(k_max, L),
                              label="rho_tilde_scattering").scaled(_MEASURE)


# ------------------------------------------------------------------------------
# 4. Real-frequency eddy density
# ------------------------------------------------------------------------------

def xi_panel_edges(L: float, m: MaterialModel, quad: QuadratureSpec) -> List[float]:
    """Panels over (0, gamma): [0, xi_lo] then log-spaced up to gamma."""
    lower = quad.xi_floor * min(m.gamma, thouless_frequency(m, L))
    return log_panel_edges(lower, m.gamma, quad.panels_per_decade)


def integrate_over_cut(
    kernel: Callable[[float], float],
    L: float,
    m: MaterialModel,
    quad: QuadratureSpec,
    label: str = "cut integral",
) -> QuadResult:
    """int_0^gamma d xi rho_tilde(xi; L) kernel(xi), panelled over the decades of xi."""
    ledger = ConvergenceLedger()

    def integrand(xi: float) -> float:
        if xi <= 0.0 or xi >= m.gamma:
            return 0.0
        return ledger.value(rho_tilde(xi, L, m, quad)) * kernel(xi)

    outer = integrate_panels(integrand, xi_panel_edges(L, m, quad), quad, label=label)
    return ledger.seal(outer)


def rho_real(omega: float, L: float, m: MaterialModel, quad: QuadratureSpec) -> QuadResult:
    """
    Eddy-current part of the real-frequency DOS,
    rho(omega; L) = (1/pi) int_0^gamma d xi rho_tilde(xi; L) xi / (xi^2 + omega^2).
    """
    if omega < 0:
        raise DomainError(f"real frequency must be non-negative, got {omega}")
    if not m.is_drude:
        raise NotApplicableError("the plasma model has no eddy-current density")
    if omega == 0.0:
        kernel = lambda xi: 1.0 / (math.pi * xi)
    else:
        kernel = lambda xi: xi / (math.pi * (xi * xi + omega * omega))
    return integrate_over_cut(kernel, L, m, quad, label="rho_real")


def rho_zero_limit(L: float, m: MaterialModel) -> float:
    """Closed form rho(0; L) = -(2 ln 2 - 1) / (8 pi^2 D), independent of L."""
    if L <= 0:
        raise DomainError(f"plate separation must be positive, got {L}")
    return -(2.0 * math.log(2.0) - 1.0) / (8.0 * math.pi ** 2 * diffusion_coefficient(m))


# ------------------------------------------------------------------------------
# 5. Full Lifshitz TE density on the real axis
# ------------------------------------------------------------------------------

def _real_axis_integral(
    per_k: Callable[[float], float],
    omega: float,
    L: float,
    quad: QuadratureSpec,
    label: str,
) -> QuadResult:
    """
    int_0^inf k dk g(k) split at the light line:
    k = omega sin t on [0, omega] and k = sqrt(omega^2 + u^2) above, u = |kappa|.
    """
    propagating = adaptive_integrate(
        lambda t: omega * omega * math.sin(t) * math.cos(t) * per_k(omega * math.sin(t)),
        0.0, _HALF_PI, quad, label=f"{label} (propagating)",
    )
    evanescent = adaptive_integrate(
        lambda u: u * per_k(math.sqrt(omega * omega + u * u)),
        0.0, quad.k_cutoff / L, quad, label=f"{label} (evanescent)",
    )
    return propagating + evanescent


def lifshitz_mode_count(omega: float, L: float, m: MaterialModel, quad: QuadratureSpec) -> QuadResult:
    """Integrated phase (1/pi) int d^2k/(2pi)^2 Im log D_TE(k, omega + i0)."""
    lifted = complex(omega, quad.cut_offset * max(omega, m.plasma_frequency))

    def phase(k: float) -> float:
        return cmath.phase(dispersion_te(k, lifted, L, m, BranchSide.UPPER_HALF_PLANE))

    return _real_axis_integral(phase, omega, L, quad, "lifshitz_mode_count").scaled(_MEASURE)


def rho_lifshitz_real(omega: float, L: float, m: MaterialModel, quad: QuadratureSpec) -> QuadResult:
    """
    Full TE density of states rho(omega; L) = -(1/pi) d/domega Im int d^2k/(2pi)^2 log D_TE(k, omega + i0).

    Drude mirrors use the analytic omega-derivative of log D_TE; plasma mirrors
    (where |r| = 1 and cavity zeros sit on the real axis) and the
    ``finite_difference`` method differentiate :func:`lifshitz_mode_count`.
    """
    if omega <= 0:
        raise DomainError(f"real frequency must be positive, got {omega}")
    if L <= 0:
        raise DomainError(f"plate separation must be positive, got {L}")
    if not m.is_drude or quad.derivative_method == "finite_difference":
        h = quad.fd_step * omega
        return _finite_difference_density(lambda w: lifshitz_mode_count(w, L, m, quad), omega, h)

    def derivative(k: float) -> float:
        try:
            return log_dispersion_derivative(k, omega, L, m, BranchSide.UPPER_HALF_PLANE).imag
        except ZeroDivisionError:
            # k exactly on the light line
            return 0.0

    return _real_axis_integral(derivative, omega, L, quad, "rho_lifshitz_real").scaled(-_MEASURE)


# ------------------------------------------------------------------------------
# 6. Curves and the sum rule
# ------------------------------------------------------------------------------

_DENSITIES = {
    SpectralAxis.IMAGINARY_CUT: rho_tilde,
    SpectralAxis.REAL_FREQUENCY: rho_real,
}


def spectral_curve(
    axis: SpectralAxis,
    frequencies: Sequence[float],
    L: float,
    m: MaterialModel,
    quad: QuadratureSpec,
) -> SpectralCurve:
    """Sample rho_tilde (axis ``xi``) or the eddy rho (axis ``omega``) on a grid."""
    density = _DENSITIES[SpectralAxis(axis)]
    samples, flags = [], []
    for f in frequencies:
        result = density(float(f), L, m, quad)
        samples.append((float(f), result.value))
        flags.append(result.converged)
    logger.debug("spectral curve on {} axis: {} samples at L={}", axis, len(samples), L)
    return SpectralCurve(axis=axis, L=L, gamma=m.gamma, samples=samples, converged=flags)


def _smearing_kernel(xi: float, xi_prime: float) -> float:
    # (2/pi) int_0^inf d omega omega/(omega^2+xi^2) * xi'/(xi'^2+omega^2), divided by pi
    if abs(xi_prime - xi) <= 1e-9 * xi:
        return 1.0 / (math.pi ** 2 * xi)
    return 2.0 * xi_prime * math.log(xi_prime / xi) / (math.pi ** 2 * (xi_prime ** 2 - xi ** 2))


def rho_real_sum_rule(
    xi: float,
    L: float,
    m: MaterialModel,
    quad: QuadratureSpec,
    points_per_decade: int = 16,
) -> SumRuleCheck:
    """
    Check int_0^inf d omega rho(omega; L) (2/pi) omega / (omega^2 + xi^2)
    against the same smearing applied directly to rho_tilde.

    rho(omega) is tabulated on a log grid from xi_floor * xi_L to 100 gamma and
    interpolated in log omega; below the grid rho(0) is used, above it the
    1/omega^2 tail.
    """
    lower = quad.xi_floor * thouless_frequency(m, L)
    upper = 100.0 * m.gamma
    count = max(8, int(math.ceil(math.log10(upper / lower) * points_per_decade)))
    grid = np.logspace(math.log10(lower), math.log10(upper), count)
    curve = spectral_curve(SpectralAxis.REAL_FREQUENCY, grid, L, m, quad)
    log_grid, values = np.log(grid), curve.densities

    def smeared(log_omega: float) -> float:
        omega = math.exp(log_omega)
        weight = (2.0 / math.pi) * omega * omega / (omega * omega + xi * xi)
        return float(np.interp(log_omega, log_grid, values)) * weight

    body = adaptive_integrate(smeared, float(log_grid[0]), float(log_grid[-1]), quad, label="sum rule")
    head = values[0] / math.pi * math.log1p((lower / xi) ** 2)
    tail = values[-1] * upper ** 2 / (math.pi * xi * xi) * math.log1p((xi / upper) ** 2)
    from_real_axis = body.value + head + tail

    from_cut = integrate_over_cut(lambda x: _smearing_kernel(xi, x), L, m, quad, label="sum rule (cut)")
    return SumRuleCheck(xi=xi, from_real_axis=from_real_axis, from_cut=from_cut.value)
