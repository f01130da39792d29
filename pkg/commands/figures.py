# ======================================================
# commands/figures.py
# Dataset builders behind `eddy-casimir fig N`. Every
# column is normalized the way the figure captions state.
# ======================================================

import math
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Dict, List

import numpy as np
import pandas as pd
from loguru import logger

from commands.sweeps import parallel_map
from config import RunConfig
from utils.export_utils import frame_to_csv
from utils.lifshitz_ref import Mirror, lifshitz_pressure, thermal_pressure
from utils.mode_density import rho_lifshitz_real, rho_real, rho_zero_limit
from utils.numerics import QuadratureSpec
from utils.thermo import (
    AsymptoticRegime,
    EnergyAsymptote,
    casimir_pressure_T0,
    entropy,
    entropy_asymptotes,
    entropy_scale,
    perfect_reflector_pressure_T0,
    perfect_reflector_thermal_pressure,
    s_infinity,
    thermal_pressure_eddy,
)
from utils.units_models import MaterialModel, diffusion_coefficient, thouless_frequency

FIGURES = ("fig1", "fig2", "fig3", "fig4")


@dataclass
class FigureDataset:
    """Columns of one figure plus the full parameter set used to produce them."""
    figure: str
    frame: pd.DataFrame
    parameters: Dict[str, Any] = field(default_factory=dict)

    def to_csv(self) -> str:
        return frame_to_csv(self.frame, {"figure": self.figure, **self.parameters})


def _grid(start: float, stop: float, points: int) -> List[float]:
    return [float(v) for v in np.logspace(math.log10(start), math.log10(stop), int(points))]


def _material_parameters(m: MaterialModel) -> Dict[str, Any]:
    parameters = {"material.kind": m.kind, "material.gamma": m.gamma, "material.plasma_frequency": m.plasma_frequency}
    if m.rate_exponent is not None:
        parameters.update({"material.rate_exponent": m.rate_exponent, "material.T_ref": m.T_ref})
    return parameters


def _quadrature_parameters(quad: QuadratureSpec) -> Dict[str, Any]:
    return {f"quadrature.{k}": v for k, v in quad.model_dump().items()}


# ------------------------------------------------------------------------------
# Figure 1: T = 0 pressure of the eddy currents vs the Drude TE pressure
# ------------------------------------------------------------------------------

def _fig1_row(L: float, m: MaterialModel, cutoff: float, quad: QuadratureSpec,
              short: EnergyAsymptote, long: EnergyAsymptote) -> Dict[str, Any]:
    scale = perfect_reflector_pressure_T0(L)
    eddy = casimir_pressure_T0(L, m, cutoff, quad)
    drude = lifshitz_pressure(0.0, L, Mirror.from_material(m), quad)
    return {
        "L_over_lambda_p": L / (2.0 * math.pi),
        "eddy_pressure_norm": eddy.value / scale,
        "drude_TE_pressure_norm": drude.value / scale,
        "asymptote_short": short.pressure(L) / scale,
        "asymptote_long": long.pressure(L) / scale,
        "converged": eddy.converged and drude.converged,
    }


def build_fig1(config: RunConfig, workers: int = 1) -> FigureDataset:
    settings = config.figure("fig1")
    m = config.material_for("fig1")
    cutoff, quad = config.cutoff(m), config.quadrature
    short = EnergyAsymptote.calibrate(m, AsymptoticRegime.SHORT, cutoff, quad)
    long = EnergyAsymptote.calibrate(m, AsymptoticRegime.LONG, cutoff, quad)
    lengths = _grid(settings["L_min"], settings["L_max"], settings["points"])
    rows = parallel_map(partial(_fig1_row, m=m, cutoff=cutoff, quad=quad, short=short, long=long), lengths, workers)
    parameters = {
        **_material_parameters(m), "Lambda": cutoff, "normalization": "pi^2/(480 L^4)",
        "short_coefficients": " ".join(f"{c:.17g}" for c in short.coefficients),
        "long_coefficients": " ".join(f"{c:.17g}" for c in long.coefficients),
        **_quadrature_parameters(quad),
    }
    return FigureDataset("fig1", pd.DataFrame(rows), parameters)


# ------------------------------------------------------------------------------
# Figure 2: real-frequency density, eddy part vs full Drude TE
# ------------------------------------------------------------------------------

def _fig2_row(x: float, L: float, m: MaterialModel, quad: QuadratureSpec, xi_L: float, scale: float) -> Dict[str, Any]:
    omega = x * xi_L
    eddy = rho_real(omega, L, m, quad)
    full = rho_lifshitz_real(omega, L, m, quad)
    return {
        "omega_over_xi_L": x,
        "eddy_dos_norm": eddy.value / scale,
        "drude_TE_dos_norm": full.value / scale,
        "converged": eddy.converged and full.converged,
    }


def build_fig2(config: RunConfig, workers: int = 1) -> FigureDataset:
    settings = config.figure("fig2")
    m = config.material_for("fig2")
    L, quad = settings["L"], config.quadrature
    xi_L = thouless_frequency(m, L)
    scale = abs(rho_zero_limit(L, m))
    xs = _grid(settings["x_min"], settings["x_max"], settings["points"])
    rows = parallel_map(partial(_fig2_row, L=L, m=m, quad=quad, xi_L=xi_L, scale=scale), xs, workers)
    parameters = {**_material_parameters(m), "L": L, "xi_L": xi_L, "normalization": "|rho(0;L)|",
                  **_quadrature_parameters(quad)}
    return FigureDataset("fig2", pd.DataFrame(rows), parameters)


# ------------------------------------------------------------------------------
# Figure 3: entropy vs temperature
# ------------------------------------------------------------------------------

def _fig3_row(x: float, L: float, m: MaterialModel, quad: QuadratureSpec, xi_L: float, plateau: float) -> Dict[str, Any]:
    T = x * xi_L
    scale = entropy_scale(L)
    s = entropy(T, L, m, quad)
    return {
        "T_over_xi_L": x,
        "entropy_norm": s.value / scale,
        "low_T_asymptote_norm": math.pi ** 2 / 3.0 * T * rho_zero_limit(L, m.at_temperature(T)) / scale,
        "high_T_asymptote_norm": plateau / scale,
        "converged": s.converged,
    }


def build_fig3(config: RunConfig, workers: int = 1) -> FigureDataset:
    settings = config.figure("fig3")
    m = config.material_for("fig3")
    L, quad = settings["L"], config.quadrature
    xi_L = thouless_frequency(m, L)
    plateau = s_infinity(L, m, quad).value
    xs = _grid(settings["x_min"], settings["x_max"], settings["points"])
    rows = parallel_map(partial(_fig3_row, L=L, m=m, quad=quad, xi_L=xi_L, plateau=plateau), xs, workers)
    parameters = {**_material_parameters(m), "L": L, "crossover_T": xi_L,
                  "normalization": "zeta(3)/(16 pi L^2)", "closed_form_plateau": entropy_asymptotes(10.0 * xi_L, L, m),
                  **_quadrature_parameters(quad)}
    return FigureDataset("fig3", pd.DataFrame(rows), parameters)


# ------------------------------------------------------------------------------
# Figure 4: thermal pressures
# ------------------------------------------------------------------------------

def _fig4_row(L: float, T: float, m: MaterialModel, quad: QuadratureSpec) -> Dict[str, Any]:
    scale = perfect_reflector_thermal_pressure(T, L)
    eddy = thermal_pressure_eddy(T, L, m, quad)
    drude = thermal_pressure(T, L, Mirror.from_material(m), quad)
    plasma = thermal_pressure(T, L, Mirror.from_material(MaterialModel.plasma(m.plasma_frequency)), quad)
    return {
        "L": L,
        "eddy_thermal_norm": eddy.value / scale,
        "drude_TE_thermal_norm": drude.value / scale,
        "plasma_TE_thermal_norm": plasma.value / scale,
        "drude_minus_eddy_norm": (drude.value - eddy.value) / scale,
        "converged": eddy.converged and drude.converged and plasma.converged,
    }


def build_fig4(config: RunConfig, workers: int = 1) -> FigureDataset:
    settings = config.figure("fig4")
    m = config.material_for("fig4")
    T, quad = settings["T"], config.quadrature
    lengths = _grid(settings["L_min"], settings["L_max"], settings["points"])
    rows = parallel_map(partial(_fig4_row, T=T, m=m, quad=quad), lengths, workers)
    diffusion_length = math.sqrt(diffusion_coefficient(m.at_temperature(T)) / T)
    parameters = {**_material_parameters(m), "T": T, "diffusion_length": diffusion_length,
                  "normalization": "zeta(3) T/(8 pi L^3)", **_quadrature_parameters(quad)}
    return FigureDataset("fig4", pd.DataFrame(rows), parameters)


BUILDERS: Dict[str, Callable[[RunConfig, int], FigureDataset]] = {
    "fig1": build_fig1,
    "fig2": build_fig2,
    "fig3": build_fig3,
    "fig4": build_fig4,
}


def build_figure(name: str, config: RunConfig, workers: int = 1) -> FigureDataset:
    logger.info("building {} with {} worker(s)", name, workers)
    return BUILDERS[name](config, workers)
