# ==============================================================================
# 🪞 EM Response - decay constants, Fresnel coefficients, eddy branch cut
# ==============================================================================
"""
Reflection coefficients of a single metallic half-space and the bulk
dispersion roots that bound the eddy-current branch cut.

Square roots are continuous in the closed right half-plane with Re >= 0.
When the radicand lands exactly on the negative real axis (a cut), the side
of the cut is chosen as the delta -> 0+ limit of an approach along
``BranchSide.direction``; :func:`cut_side_limit` reproduces that limit
numerically.
"""
import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Sequence, Tuple

import numpy as np

from utils.errors import BranchPointError, ConvergenceError, DomainError, NotApplicableError
from utils.numerics import QuadratureSpec, cubic_roots, polynomial_residual, richardson_extrapolate
from utils.units_models import MaterialModel, omega2_epsilon, omega2_epsilon_derivative

_ON_AXIS = 1e-12
_ENDPOINT_TOL = 1e-10


class BranchSide(Enum):
    """Direction from which a point on a cut is approached."""
    RIGHT_HALF_PLANE = 1.0 + 0j   # omega = -i xi + 0
    UPPER_HALF_PLANE = 1j         # omega + i0 on the real axis

    @property
    def direction(self) -> complex:
        return self.value


@dataclass(frozen=True)
class DispersionRoots:
    """Roots of k^2 - eps(omega) omega^2 = 0; the eddy root is omega = -i eddy_root."""
    eddy_root: float
    other_roots: Tuple[complex, complex]
    residual: float


def _branch_sqrt(g: complex, dg: complex, side: BranchSide) -> complex:
    if g.real < 0 and abs(g.imag) <= _ON_AXIS * abs(g):
        drift = (side.direction * dg).imag
        if drift == 0:
            raise BranchPointError("cannot choose a cut side: radicand does not move off the axis")
        root = math.sqrt(-g.real)
        return complex(0.0, root if drift > 0 else -root)
    return cmath.sqrt(g)


# ------------------------------------------------------------------------------
# 1. Decay constants
# ------------------------------------------------------------------------------

def kappa(k: float, omega: complex, side: BranchSide = BranchSide.UPPER_HALF_PLANE) -> complex:
    """
    Vacuum decay constant sqrt(k^2 - omega^2) with Re >= 0.

    Propagating waves (real omega, k < |omega|) get Im kappa <= 0 so that
    exp(-kappa L) is an outgoing wave.
    """
    if k < 0:
        raise DomainError(f"wavevector must be non-negative, got {k}")
    omega = complex(omega)
    g = complex(k * k) - omega * omega
    if g == 0:
        return 0j
    return _branch_sqrt(g, -2.0 * omega, side)


def kappa_m(k: float, omega: complex, m: MaterialModel,
            side: BranchSide = BranchSide.RIGHT_HALF_PLANE) -> complex:
    """
    Decay constant in the medium, sqrt(k^2 - omega^2 eps(omega)).

    Raises:
        BranchPointError: Exactly at a branch point (radicand zero).
        PoleEvaluationError: At omega = -i gamma.
    """
    if k < 0:
        raise DomainError(f"wavevector must be non-negative, got {k}")
    omega = complex(omega)
    g = complex(k * k) - omega2_epsilon(omega, m)
    if g == 0:
        raise BranchPointError(f"kappa_m evaluated at its branch point k={k}, omega={omega}")
    return _branch_sqrt(g, -omega2_epsilon_derivative(omega, m), side)


# ------------------------------------------------------------------------------
# 2. Reflection coefficients
# ------------------------------------------------------------------------------

def r_te(k: float, omega: complex, m: MaterialModel,
         side: BranchSide = BranchSide.RIGHT_HALF_PLANE) -> complex:
    """TE Fresnel coefficient (kappa - kappa_m) / (kappa + kappa_m)."""
    kv = kappa(k, omega, side)
    km = kappa_m(k, omega, m, side)
    return (kv - km) / (kv + km)


def r_tm(k: float, omega: complex, m: MaterialModel,
         side: BranchSide = BranchSide.RIGHT_HALF_PLANE) -> complex:
    """TM Fresnel coefficient (eps kappa - kappa_m) / (eps kappa + kappa_m)."""
    omega = complex(omega)
    kv = kappa(k, omega, side)
    km = kappa_m(k, omega, m, side)
    eps_kappa = omega2_epsilon(omega, m) * kv / (omega * omega)
    return (eps_kappa - km) / (eps_kappa + km)


def cut_wavevector(xi: float, m: MaterialModel) -> float:
    """
    Largest k for which -i xi lies on the eddy cut: k_max^2 = Omega^2 xi / (gamma - xi) - xi^2.

    Zero when xi is outside (0, gamma).
    """
    if not m.is_drude:
        raise NotApplicableError("the plasma model has no eddy-current cut")
    if xi <= 0.0 or xi >= m.gamma:
        return 0.0
    square = m.plasma_frequency ** 2 * xi / (m.gamma - xi) - xi * xi
    return math.sqrt(square) if square > 0 else 0.0


def r_eddy(k: float, xi: float, m: MaterialModel) -> complex:
    """
    Total-internal-reflection coefficient of diffusive waves, -(kappa + i k_z)/(kappa - i k_z).

    Raises:
        DomainError: When -i xi is not on the branch cut for this k.
    """
    if not m.is_drude:
        raise NotApplicableError("the plasma model has no eddy-current modes")
    if xi >= m.gamma:
        raise DomainError(f"xi={xi} is at or above gamma={m.gamma}: no branch cut")
    xi_k = eddy_branch_frequency(k, m)
    if xi < xi_k * (1.0 - _ENDPOINT_TOL):
        raise DomainError(f"xi={xi} is below the branch point xi_k={xi_k} for k={k}")
    kz_square = m.plasma_frequency ** 2 * xi / (m.gamma - xi) - xi * xi - k * k
    kz = math.sqrt(max(kz_square, 0.0))
    kv = math.sqrt(k * k + xi * xi)
    return -complex(kv, kz) / complex(kv, -kz)


# ------------------------------------------------------------------------------
# 3. Bulk dispersion roots
# ------------------------------------------------------------------------------

def bulk_dispersion_roots(q: float, m: MaterialModel) -> DispersionRoots:
    """
    Solve the bulk cubic omega^3 + i gamma omega^2 - (q^2 + Omega^2) omega - i gamma q^2 = 0.

    The purely imaginary root omega = -i xi_q is the diffusive (eddy) mode;
    the other two sit near the plasma edge.

    Raises:
        ConvergenceError: If the polished roots leave a residual above 1e-10.
    """
    if not m.is_drude:
        raise NotApplicableError("the plasma model has no diffusive bulk mode")
    if q < 0:
        raise DomainError(f"wavevector must be non-negative, got {q}")
    gamma, omega_p2, q2 = m.gamma, m.plasma_frequency ** 2, q * q
    coefficients = [1.0, 1j * gamma, -(q2 + omega_p2), -1j * gamma * q2]
    roots = cubic_roots(coefficients)
    index = min(range(3), key=lambda i: abs(roots[i].real))
    others = tuple(roots[i] for i in range(3) if i != index)

    # the eddy root solves the real cubic xi^3 - gamma xi^2 + (q^2 + Omega^2) xi - gamma q^2 = 0
    xi = min(max(-roots[index].imag, 0.0), gamma)
    for _ in range(2):
        value = ((xi - gamma) * xi + q2 + omega_p2) * xi - gamma * q2
        slope = (3.0 * xi - 2.0 * gamma) * xi + q2 + omega_p2
        xi -= value / slope
    xi = min(max(xi, 0.0), gamma)

    residual = max(polynomial_residual(coefficients, complex(0.0, -xi)),
                   max(polynomial_residual(coefficients, r) for r in others))
    if residual > 1e-10:
        raise ConvergenceError(f"bulk dispersion roots for q={q} not converged", residual=residual)
    return DispersionRoots(eddy_root=xi, other_roots=others, residual=residual)


def eddy_branch_frequency(k: float, m: MaterialModel) -> float:
    """Branch point xi_k of the eddy cut: omega = -i xi_k, with xi_k ~ D k^2 for small k."""
    if k == 0:
        if not m.is_drude:
            raise NotApplicableError("the plasma model has no eddy-current cut")
        return 0.0
    return bulk_dispersion_roots(k, m).eddy_root


def branch_table(k_values: Sequence[float], m: MaterialModel) -> List[Tuple[float, float]]:
    """(k, xi_k) pairs for inspection."""
    return [(float(k), eddy_branch_frequency(float(k), m)) for k in k_values]


# ------------------------------------------------------------------------------
# 4. Dispersion function D_TE = 1 - r^2 exp(-2 kappa L)
# ------------------------------------------------------------------------------

def dispersion_te(k: float, omega: complex, L: float, m: MaterialModel,
                  side: BranchSide = BranchSide.RIGHT_HALF_PLANE) -> complex:
    r = r_te(k, omega, m, side)
    return 1.0 - r * r * cmath.exp(-2.0 * kappa(k, omega, side) * L)


def log_dispersion_derivative(k: float, omega: complex, L: float, m: MaterialModel,
                              side: BranchSide = BranchSide.RIGHT_HALF_PLANE) -> complex:
    """
    d log D_TE(k, omega) / d omega, from the analytic derivatives of kappa, kappa_m and r.
    """
    omega = complex(omega)
    kv = kappa(k, omega, side)
    km = kappa_m(k, omega, m, side)
    dkv = -omega / kv
    dkm = -omega2_epsilon_derivative(omega, m) / (2.0 * km)
    total = kv + km
    r = (kv - km) / total
    dr = 2.0 * (dkv * km - kv * dkm) / (total * total)
    decay = cmath.exp(-2.0 * kv * L)
    d_value = 1.0 - r * r * decay
    d_derivative = -decay * (2.0 * r * dr - 2.0 * L * dkv * r * r)
    return d_derivative / d_value


def cut_side_limit(fn: Callable[[complex], complex], omega: complex, m: MaterialModel,
                   side: BranchSide, spec: QuadratureSpec) -> complex:
    """
    Evaluate ``fn`` at omega + delta * side.direction for delta, delta/2, delta/4
    and Richardson-extrapolate to delta -> 0.
    """
    omega = complex(omega)
    delta = spec.cut_offset * max(abs(omega), m.gamma, 1e-300)
    samples = [complex(fn(omega + delta / 2 ** j * side.direction)) for j in range(3)]
    real = richardson_extrapolate([s.real for s in samples], ratio=2.0, order=1, order_step=1)
    imag = richardson_extrapolate([s.imag for s in samples], ratio=2.0, order=1, order_step=1)
    return complex(real.value, imag.value)


def count_upper_half_plane_zeros(k: float, L: float, m: MaterialModel,
                                 box: Tuple[float, float, float, float],
                                 points_per_side: int = 400) -> int:
    """
    Number of zeros of D_TE(k, omega) inside a rectangle of the upper half-plane
    (argument principle; the rectangle must not touch the real axis).

    Args:
        box: (re_min, re_max, im_min, im_max) with im_min > 0.
    """
    re_min, re_max, im_min, im_max = box
    if im_min <= 0:
        raise DomainError("the contour must lie strictly in the upper half-plane")
    t = np.linspace(0.0, 1.0, points_per_side, endpoint=False)
    corners = [complex(re_min, im_min), complex(re_max, im_min), complex(re_max, im_max), complex(re_min, im_max)]
    path = []
    for start, end in zip(corners, corners[1:] + corners[:1]):
        path.extend(start + (end - start) * t)
    path.append(corners[0])
    values = np.array([dispersion_te(k, w, L, m, BranchSide.UPPER_HALF_PLANE) for w in path])
    phase = np.unwrap(np.angle(values))
    return int(round((phase[-1] - phase[0]) / (2.0 * math.pi)))
