# ======================================================
# commands/sweeps.py
# Generic parameter sweeps over one axis, evaluated in
# parallel with deterministic output order.
# ======================================================

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger

from utils import em_response, lifshitz_ref, mode_density, thermo
from utils.errors import ConfigError
from utils.numerics import QuadratureSpec
from utils.units_models import MaterialModel, UnitSystem

AXES = ("xi", "omega", "L", "T", "k")


def parallel_map(fn: Callable[[Any], Any], items: Sequence[Any], workers: int = 1) -> List[Any]:
    """Ordered map; a process pool is used only when more than one worker is allowed."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as executor:
        return list(executor.map(fn, items))


@dataclass(frozen=True)
class AxisSpec:
    """One sweep axis parsed from 'NAME:min:max:N[:lin|log]'."""
    name: str
    start: float
    stop: float
    count: int
    spacing: str = "log"

    @classmethod
    def parse(cls, text: str) -> "AxisSpec":
        parts = text.split(":")
        if len(parts) not in (4, 5):
            raise ConfigError(f"axis must look like NAME:min:max:N, got {text!r}", key="axis")
        name = parts[0]
        if name not in AXES:
            raise ConfigError(f"unknown axis {name!r}; choose from {', '.join(AXES)}", key="axis")
        try:
            start, stop, count = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError as exc:
            raise ConfigError(f"bad axis numbers in {text!r}", key="axis") from exc
        spacing = parts[4] if len(parts) == 5 else ("log" if start > 0 else "lin")
        if count < 1 or stop < start or spacing not in ("lin", "log") or (spacing == "log" and start <= 0):
            raise ConfigError(f"invalid axis range {text!r}", key="axis")
        return cls(name=name, start=start, stop=stop, count=count, spacing=spacing)

    def values(self) -> List[float]:
        if self.count == 1:
            return [self.start]
        if self.spacing == "log":
            return [float(v) for v in np.logspace(math.log10(self.start), math.log10(self.stop), self.count)]
        return [float(v) for v in np.linspace(self.start, self.stop, self.count)]


# ------------------------------------------------------------------------------
# Quantity registry
# ------------------------------------------------------------------------------

@dataclass(frozen=True)
class Quantity:
    name: str
    parameters: Tuple[str, ...]
    kind: str                      # density, energy, pressure, entropy, frequency, ratio
    evaluate: Callable[..., Tuple[float, bool]]


def _from_quad(result) -> Tuple[float, bool]:
    return result.value, result.converged


def _rho_tilde(p, m, quad, cutoff):
    return _from_quad(mode_density.rho_tilde(p["xi"], p["L"], m, quad))


def _rho_tilde_scattering(p, m, quad, cutoff):
    return _from_quad(mode_density.rho_tilde_scattering(p["xi"], p["L"], m, quad))


def _mode_count(p, m, quad, cutoff):
    return _from_quad(mode_density.mode_count(p["xi"], p["L"], m, quad))


def _rho_real(p, m, quad, cutoff):
    return _from_quad(mode_density.rho_real(p["omega"], p["L"], m, quad))


def _rho_lifshitz(p, m, quad, cutoff):
    return _from_quad(mode_density.rho_lifshitz_real(p["omega"], p["L"], m, quad))


def _energy(p, m, quad, cutoff):
    return _from_quad(thermo.casimir_energy_T0(p["L"], m, cutoff, quad))


def _pressure(p, m, quad, cutoff):
    return _from_quad(thermo.casimir_pressure_T0(p["L"], m, cutoff, quad))


def _free_energy(p, m, quad, cutoff):
    return _from_quad(thermo.free_energy(p["T"], p["L"], m, quad, cutoff))


def _entropy(p, m, quad, cutoff):
    return _from_quad(thermo.entropy(p["T"], p["L"], m, quad))


def _s_infinity(p, m, quad, cutoff):
    return _from_quad(thermo.s_infinity(p["L"], m, quad))


def _plateau_factor(p, m, quad, cutoff):
    return thermo.plateau_factor(p["L"], m, quad), True


def _static_plateau_factor(p, m, quad, cutoff):
    return lifshitz_ref.static_plateau_factor(p["L"], m, quad), True


def _thermal_pressure(p, m, quad, cutoff):
    return _from_quad(thermo.thermal_pressure_eddy(p["T"], p["L"], m, quad))


def _lifshitz_pressure(p, m, quad, cutoff):
    return _from_quad(lifshitz_ref.lifshitz_pressure(p["T"], p["L"], lifshitz_ref.Mirror.from_material(m), quad))


def _lifshitz_free_energy(p, m, quad, cutoff):
    return _from_quad(lifshitz_ref.matsubara_free_energy(p["T"], p["L"], lifshitz_ref.Mirror.from_material(m), quad))


def _branch_point(p, m, quad, cutoff):
    return em_response.eddy_branch_frequency(p["k"], m), True


QUANTITIES: Dict[str, Quantity] = {
    q.name: q
    for q in (
        Quantity("rho_tilde", ("xi", "L"), "density", _rho_tilde),
        Quantity("rho_tilde_scattering", ("xi", "L"), "density", _rho_tilde_scattering),
        Quantity("mode_count", ("xi", "L"), "density", _mode_count),
        Quantity("rho_real", ("omega", "L"), "density", _rho_real),
        Quantity("rho_lifshitz", ("omega", "L"), "density", _rho_lifshitz),
        Quantity("energy", ("L",), "energy", _energy),
        Quantity("pressure", ("L",), "pressure", _pressure),
        Quantity("free_energy", ("T", "L"), "energy", _free_energy),
        Quantity("entropy", ("T", "L"), "entropy", _entropy),
        Quantity("s_infinity", ("L",), "entropy", _s_infinity),
        Quantity("plateau_factor", ("L",), "ratio", _plateau_factor),
        Quantity("static_plateau_factor", ("L",), "ratio", _static_plateau_factor),
        Quantity("thermal_pressure", ("T", "L"), "pressure", _thermal_pressure),
        Quantity("lifshitz_pressure", ("T", "L"), "pressure", _lifshitz_pressure),
        Quantity("lifshitz_free_energy", ("T", "L"), "energy", _lifshitz_free_energy),
        Quantity("branch_point", ("k",), "frequency", _branch_point),
    )
}


def get_quantity(name: str) -> Quantity:
    if name not in QUANTITIES:
        raise ConfigError(f"unknown quantity {name!r}; choose from {', '.join(sorted(QUANTITIES))}", key="quantity")
    return QUANTITIES[name]


def _evaluate_point(x: float, quantity: str, axis: str, fixed: Dict[str, float],
                    m: MaterialModel, quad: QuadratureSpec, cutoff: float) -> Tuple[float, bool]:
    params = dict(fixed)
    params[axis] = x
    return QUANTITIES[quantity].evaluate(params, m, quad, cutoff)


def _si_columns(df: pd.DataFrame, axis: str, kind: str, units: UnitSystem) -> pd.DataFrame:
    axis_converters = {
        "L": units.length_to_nm,
        "T": units.frequency_to_kelvin,
        "xi": units.frequency_to_kelvin,
        "omega": units.frequency_to_kelvin,
    }
    value_converters = {
        "energy": units.energy_to_si,
        "pressure": units.pressure_to_pascal,
        "entropy": units.entropy_to_si,
        "frequency": units.frequency_to_kelvin,
    }
    if axis in axis_converters:
        df[f"{axis}_si"] = [axis_converters[axis](v) for v in df[axis]]
    if kind in value_converters:
        df["value_si"] = [value_converters[kind](v) for v in df["value"]]
    return df


def run_sweep(
    quantity: str,
    axis: AxisSpec,
    fixed: Dict[str, float],
    m: MaterialModel,
    quad: QuadratureSpec,
    cutoff: float,
    workers: int = 1,
    units: Optional[UnitSystem] = None,
) -> pd.DataFrame:
    """
    Evaluate one registered quantity along an axis.

    Returns:
        pd.DataFrame: Columns ``<axis>``, ``value``, ``converged`` (plus SI columns with ``units``).
    """
    spec = get_quantity(quantity)
    if axis.name not in spec.parameters:
        raise ConfigError(f"{quantity} does not depend on {axis.name}", key="axis")
    missing = [p for p in spec.parameters if p != axis.name and p not in fixed]
    if missing:
        raise ConfigError(f"{quantity} needs fixed values for {', '.join(missing)}", key="param")

    xs = axis.values()
    logger.info("sweeping {} over {} ({} points, {} workers)", quantity, axis.name, len(xs), workers)
    worker = partial(_evaluate_point, quantity=quantity, axis=axis.name, fixed=dict(fixed), m=m, quad=quad, cutoff=cutoff)
    results = parallel_map(worker, xs, workers)
    df = pd.DataFrame({
        axis.name: xs,
        "value": [v for v, _ in results],
        "converged": [c for _, c in results],
    })
    if units is not None:
        df = _si_columns(df, axis.name, spec.kind, units)
    return df


def parse_fixed(pairs: Iterable[str]) -> Dict[str, float]:
    """Parse repeated --param NAME=VALUE options."""
    fixed = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        if not sep or key not in AXES:
            raise ConfigError(f"parameters look like NAME=VALUE with NAME in {', '.join(AXES)}, got {pair!r}", key="param")
        try:
            fixed[key] = float(raw)
        except ValueError as exc:
            raise ConfigError(f"not a number: {raw!r}", key=f"param.{key}") from exc
    return fixed
