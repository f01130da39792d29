# ==============================================================================
# 🔢 Numerical Kernels - quadrature, extrapolation, differentiation, cubic roots
# ==============================================================================
"""
Shared numerical kernels with explicit error reporting.

Every integral in the package goes through :func:`adaptive_integrate` so that
tolerance accounting is uniform. The integrator is QUADPACK's adaptive
Gauss-Kronrod bisection (``scipy.integrate.quad``); semi-infinite ranges use
its built-in variable map.
"""
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy import integrate

from utils.errors import DomainError


# ------------------------------------------------------------------------------
# 1. Tolerance and result types
# ------------------------------------------------------------------------------

class QuadratureSpec(BaseModel):
    """
    Tolerances, grids and cutoffs governing every integral and derivative.

    The object is immutable and shared by all callers of a computation.
    """
    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(1e-8, gt=0.0, le=1e-3)
    abs_tol: float = Field(1e-14, ge=0.0)
    max_refinements: int = Field(200, ge=10)
    # relative steps of the L- and T-derivatives
    length_step: float = Field(1e-4, gt=0.0, lt=0.1)
    temperature_step: float = Field(1e-4, gt=0.0, lt=0.1)
    # upper cutoff of the k integrals in units of kappa * L
    k_cutoff: float = Field(40.0, gt=1.0)
    # log-spaced xi panels start at xi_floor * min(gamma, xi_L)
    xi_floor: float = Field(1e-6, gt=0.0, lt=1.0)
    panels_per_decade: int = Field(2, ge=1)
    # cut-side offset delta, relative to max(xi, gamma)
    cut_offset: float = Field(1e-8, gt=0.0, lt=1e-2)
    derivative_method: str = "analytic"
    # relative step of the five-point finite-difference fallback
    fd_step: float = Field(1e-4, gt=0.0, lt=0.1)
    matsubara_max_terms: int = Field(200000, ge=10)

    @field_validator("derivative_method")
    @classmethod
    def _known_method(cls, value: str) -> str:
        if value not in ("analytic", "finite_difference"):
            raise ValueError("derivative_method must be 'analytic' or 'finite_difference'")
        return value

    def relaxed(self, rel_tol: float) -> "QuadratureSpec":
        """Return a copy with a looser relative tolerance (figure-reproduction mode)."""
        return self.model_copy(update={"rel_tol": max(rel_tol, self.rel_tol)})


class QuadResult(BaseModel):
    """Value of one integral together with its error bookkeeping."""
    model_config = ConfigDict(frozen=True)

    value: float
    error_estimate: float
    evaluations: int
    converged: bool

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(
            value=self.value + other.value,
            error_estimate=self.error_estimate + other.error_estimate,
            evaluations=self.evaluations + other.evaluations,
            converged=self.converged and other.converged,
        )

    def scaled(self, factor: float) -> "QuadResult":
        return QuadResult(
            value=factor * self.value,
            error_estimate=abs(factor) * self.error_estimate,
            evaluations=self.evaluations,
            converged=self.converged,
        )


class RichardsonResult(BaseModel):
    """Extrapolated limit, error estimate and a reliability flag."""
    model_config = ConfigDict(frozen=True)

    value: float
    error_estimate: float
    reliable: bool


ZERO_RESULT = QuadResult(value=0.0, error_estimate=0.0, evaluations=0, converged=True)


# ------------------------------------------------------------------------------
# 2. Adaptive quadrature
# ------------------------------------------------------------------------------

def adaptive_integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    spec: QuadratureSpec,
    points: Optional[Sequence[float]] = None,
    label: str = "integral",
) -> QuadResult:
    """
    Integrate a real function with adaptive Gauss-Kronrod bisection.

    Args:
        f: Integrand, finite on (a, b) apart from integrable endpoint singularities.
        a: Lower limit.
        b: Upper limit, may be ``math.inf``.
        spec: Tolerances and subdivision limit.
        points: Optional interior breakpoints (finite ranges only).
        label: Name used in the non-convergence log message.

    Returns:
        QuadResult: Never raises on non-convergence; ``converged`` is False instead.
    """
    if not a < b:
        if a == b:
            return ZERO_RESULT
        raise DomainError(f"{label}: lower limit {a} is not below upper limit {b}")

    kwargs = dict(epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=spec.max_refinements, full_output=1)
    if points is not None and math.isfinite(b):
        inner = sorted(p for p in points if a < p < b)
        if inner:
            kwargs["points"] = inner

    out = integrate.quad(f, a, b, **kwargs)
    value, error, info = out[0], out[1], out[2]
    message = out[3] if len(out) > 3 else None
    target = max(spec.abs_tol, spec.rel_tol * abs(value))
    converged = message is None and math.isfinite(value) and error <= target
    if not converged:
        logger.warning(
            "{} did not converge on [{:.6g}, {:.6g}]: value={:.6g} error={:.3g}",
            label, a, b, value, error,
        )
    return QuadResult(value=value, error_estimate=error, evaluations=int(info["neval"]), converged=converged)


def integrate_panels(
    f: Callable[[float], float],
    edges: Sequence[float],
    spec: QuadratureSpec,
    label: str = "integral",
) -> QuadResult:
    """Sum :func:`adaptive_integrate` over consecutive panels, in order."""
    total = ZERO_RESULT
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            total = total + adaptive_integrate(f, lo, hi, spec, label=label)
    return total


class ConvergenceLedger:
    """
    Collects the convergence state of the inner integrals of a nested quadrature,
    so the outer result reports ``converged=False`` if any inner one failed.
    """

    def __init__(self):
        self.converged = True
        self.evaluations = 0

    def value(self, result: QuadResult) -> float:
        self.converged = self.converged and result.converged
        self.evaluations += result.evaluations
        return result.value

    def seal(self, outer: QuadResult) -> QuadResult:
        return QuadResult(
            value=outer.value,
            error_estimate=outer.error_estimate,
            evaluations=outer.evaluations + self.evaluations,
            converged=outer.converged and self.converged,
        )


def log_panel_edges(lower: float, upper: float, per_decade: int, start_at_zero: bool = True) -> List[float]:
    """
    Log-spaced panel edges between ``lower`` and ``upper``.

    With ``start_at_zero`` the first panel is [0, lower], so integrable
    behaviour at the origin is still captured.
    """
    if not 0.0 < lower < upper:
        raise DomainError(f"bad panel range [{lower}, {upper}]")
    decades = math.log10(upper / lower)
    count = max(1, int(math.ceil(decades * per_decade)))
    edges = list(np.logspace(math.log10(lower), math.log10(upper), count + 1))
    edges[-1] = upper
    return ([0.0] if start_at_zero else []) + edges


# ------------------------------------------------------------------------------
# 3. Richardson extrapolation and differentiation
# ------------------------------------------------------------------------------

def richardson_extrapolate(
    samples: Sequence[float],
    ratio: float = 2.0,
    order: int = 2,
    order_step: int = 2,
) -> RichardsonResult:
    """
    Extrapolate samples taken at steps h, h/r, h/r², ... to h -> 0.

    Args:
        samples: Values ordered from the largest step to the smallest (at least 3).
        ratio: Step ratio r between consecutive samples.
        order: Leading error order p of the samples.
        order_step: Increment of the error order between successive terms.

    Returns:
        RichardsonResult: ``reliable`` is False when the raw differences do not shrink.
    """
    values = [float(v) for v in samples]
    if len(values) < 3:
        raise DomainError("Richardson extrapolation needs at least three samples")

    diffs = [abs(b - a) for a, b in zip(values[:-1], values[1:])]
    reliable = all(later <= earlier or earlier == 0.0 for earlier, later in zip(diffs[:-1], diffs[1:]))

    table = values
    previous_best = table[-1]
    power = order
    while len(table) > 1:
        factor = ratio ** power
        previous_best = table[-1]
        table = [(factor * fine - coarse) / (factor - 1.0) for coarse, fine in zip(table[:-1], table[1:])]
        power += order_step

    limit = table[0]
    error = abs(limit - previous_best)
    if not reliable:
        logger.debug("Richardson residuals not monotone: {}", diffs)
    return RichardsonResult(value=limit, error_estimate=error, reliable=reliable)


def central_difference(f: Callable[[float], float], x: float, h: float) -> float:
    """Five-point central difference f'(x), truncation error O(h^4)."""
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


def richardson_derivative(f: Callable[[float], float], x: float, h: float, levels: int = 3) -> RichardsonResult:
    """Three-point central differences at h, h/2, h/4 ... extrapolated to h -> 0."""
    samples = []
    step = h
    for _ in range(levels):
        samples.append((f(x + step) - f(x - step)) / (2 * step))
        step /= 2.0
    return richardson_extrapolate(samples, ratio=2.0, order=2, order_step=2)


# ------------------------------------------------------------------------------
# 4. Cubic roots
# ------------------------------------------------------------------------------

_CUBE_UNITY = complex(-0.5, math.sqrt(3.0) / 2.0)


def polynomial_residual(coefficients: Sequence[complex], x: complex) -> float:
    """Relative residual |p(x)| / sum |a_i||x|^i, coefficients highest power first."""
    value = np.polyval(coefficients, x)
    scale = sum(abs(c) * abs(x) ** p for p, c in enumerate(reversed(list(coefficients))))
    return abs(value) / scale if scale > 0 else abs(value)


def _newton_polish(coefficients: Sequence[complex], x: complex) -> complex:
    derivative = np.polyder(np.asarray(coefficients, dtype=complex))
    slope = np.polyval(derivative, x)
    scale = sum(abs(c) * max(abs(x), 1.0) ** p for p, c in enumerate(reversed(list(coefficients))))
    if abs(slope) <= 1e-8 * scale:
        return x
    return x - np.polyval(coefficients, x) / slope


def _quadratic_roots(a: complex, b: complex, c: complex) -> Tuple[complex, complex]:
    disc = np.sqrt(complex(b * b - 4 * a * c))
    # choose the sign that avoids cancellation
    q = -0.5 * (b + disc) if abs(b + disc) >= abs(b - disc) else -0.5 * (b - disc)
    if q == 0:
        return 0j, 0j
    return q / a, c / q


def cubic_roots(coefficients: Sequence[complex]) -> List[complex]:
    """
    All three roots of a3 x^3 + a2 x^2 + a1 x + a0 (coefficients highest power first).

    Cardano's closed form followed by one Newton step per root. When two roots
    coincide (derivative vanishes) the pair is recovered by deflation from the
    isolated root, which keeps double roots accurate.
    """
    a3, a2, a1, a0 = (complex(c) for c in coefficients)
    if a3 == 0:
        raise DomainError("leading coefficient of a cubic must be nonzero")

    b, c, d = a2 / a3, a1 / a3, a0 / a3
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    disc = np.sqrt(complex((q / 2.0) ** 2 + (p / 3.0) ** 3))
    u3 = -q / 2.0 + disc if abs(-q / 2.0 + disc) >= abs(-q / 2.0 - disc) else -q / 2.0 - disc

    shift = -b / 3.0
    if u3 == 0:
        roots = [shift, shift, shift]
    else:
        u = u3 ** (1.0 / 3.0)
        roots = []
        for k in range(3):
            uk = u * _CUBE_UNITY ** k
            roots.append(uk - p / (3.0 * uk) + shift)

    roots = [_newton_polish(coefficients, r) for r in roots]

    # deflation for near-degenerate pairs
    spread = max(1.0, max(abs(r) for r in roots))
    for i in range(3):
        j, k = [n for n in range(3) if n != i]
        if abs(roots[j] - roots[k]) < 1e-6 * spread and abs(roots[i] - roots[j]) >= 1e-6 * spread:
            # divide the monic cubic by (x - r_i)
            r = roots[i]
            q2, q1 = 1.0, b + r
            q0 = c + r * q1
            roots[j], roots[k] = _quadratic_roots(q2, q1, q0)
            break
    return roots
