# ==============================================================================
# ⚙️ Configuration Management - settings, run configs, figure defaults
# ==============================================================================
import os
import sys
import warnings
from typing import Any, Dict, Mapping, Optional

from dotenv import dotenv_values
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from utils.errors import ConfigError
from utils.numerics import QuadratureSpec
from utils.units_models import MaterialModel, material_from_mapping


def get_setting(key: str, fallback: Optional[str] = None) -> Optional[str]:
    """
    Retrieve a value from environment variables, the local .env file, or fallback.

    Args:
        key (str): The key to look for
        fallback (str, optional): Fallback value if key is not found

    Returns:
        Optional[str]: The found value or the fallback
    """
    env_value = os.getenv(key)
    if env_value and env_value.strip():
        return env_value.strip()

    try:
        file_value = dotenv_values(".env").get(key)
        if file_value and str(file_value).strip():
            return str(file_value).strip()
    except OSError:
        pass

    return fallback


# ------------------------------------------------------------------------------
# Process Settings
# ------------------------------------------------------------------------------

EDDY_CASIMIR_THREADS = max(1, int(get_setting("EDDY_CASIMIR_THREADS", "1")))
LOG_LEVEL = get_setting("LOG_LEVEL", "INFO").upper()
DEBUG_MODE = get_setting("DEBUG_MODE", "false").lower() == "true"
FIGURE_REL_TOL = float(get_setting("EDDY_CASIMIR_REL_TOL", "1e-6"))

# Figure defaults: lengths in lambda, frequencies and temperatures in Omega.
# fig2 and fig3 ranges are in units of the Thouless frequency xi_L.
FIGURE_DEFAULTS: Dict[str, Dict[str, float]] = {
    "fig1": {"gamma": 0.08, "L_min": 0.01, "L_max": 100.0, "points": 25},
    "fig2": {"gamma": 1e-3, "L": 20.0 * 3.141592653589793, "x_min": 1e-2, "x_max": 1e4, "points": 25},
    "fig3": {"gamma": 0.08, "L": 30.0, "x_min": 1e-3, "x_max": 1e3, "points": 25},
    "fig4": {"gamma": 0.08, "T": 1e-3, "L_min": 0.5, "L_max": 200.0, "points": 20},
}
DEFAULT_CUTOFF_RATIO = 5.0

_SECTIONS = ("material", "quadrature", "thermo") + tuple(FIGURE_DEFAULTS)
_BARE_MATERIAL_KEYS = ("kind", "gamma", "rate_exponent", "gamma_ref", "T_ref", "plasma_frequency")


class RunConfig(BaseModel):
    """Parsed run configuration: material, quadrature, cutoff and figure ranges."""
    model_config = ConfigDict(frozen=True)

    material: Optional[MaterialModel] = None
    quadrature: QuadratureSpec = Field(default_factory=lambda: QuadratureSpec().relaxed(FIGURE_REL_TOL))
    cutoff_ratio: float = Field(DEFAULT_CUTOFF_RATIO, ge=1.0)
    figures: Dict[str, Dict[str, float]] = Field(default_factory=lambda: {k: dict(v) for k, v in FIGURE_DEFAULTS.items()})

    def figure(self, name: str) -> Dict[str, float]:
        if name not in self.figures:
            raise ConfigError(f"unknown figure {name!r}", key=name)
        return self.figures[name]

    def material_for(self, name: str) -> MaterialModel:
        """The configured material, or the figure's default Drude metal."""
        if self.material is not None:
            return self.material
        return MaterialModel.drude(self.figure(name)["gamma"])

    def cutoff(self, m: MaterialModel) -> float:
        return self.cutoff_ratio * m.gamma


# ------------------------------------------------------------------------------
# Parsing and validation
# ------------------------------------------------------------------------------

def validate_config(values: Mapping[str, Optional[str]]) -> dict:
    """
    Validate raw key/value pairs of a run configuration.

    Returns:
        dict: Configuration validation status with 'warnings' and 'errors' lists
    """
    validation_results = {
        'material_section': any(k.startswith("material.") or k in _BARE_MATERIAL_KEYS for k in values),
        'warnings': [],
        'errors': []
    }

    for key, value in values.items():
        section = key.split(".", 1)[0] if "." in key else None
        if section is None and key not in _BARE_MATERIAL_KEYS:
            validation_results['warnings'].append(f"Unknown key ignored: {key}")
        elif section is not None and section not in _SECTIONS:
            validation_results['warnings'].append(f"Unknown section ignored: {key}")
        if value is None or not str(value).strip():
            validation_results['errors'].append(f"{key}: empty value")

    for name, defaults in FIGURE_DEFAULTS.items():
        for key in values:
            if key.startswith(f"{name}.") and key.split(".", 1)[1] not in defaults:
                validation_results['warnings'].append(f"Unknown figure setting ignored: {key}")

    return validation_results


def _section(values: Mapping[str, Optional[str]], prefix: str) -> Dict[str, str]:
    return {k[len(prefix) + 1:]: v for k, v in values.items() if k.startswith(f"{prefix}.") and v is not None}


def parse_run_config(values: Mapping[str, Optional[str]]) -> RunConfig:
    """
    Build a RunConfig from key/value pairs (dotted sections, bare material aliases).

    Raises:
        ConfigError: On validation failure, naming the offending key.
    """
    status = validate_config(values)
    for warning in status['warnings']:
        warnings.warn(f"eddy-casimir config warning: {warning}")
    if status['errors']:
        raise ConfigError("; ".join(status['errors']))

    material = material_from_mapping(values) if status['material_section'] else None

    quadrature_fields = _section(values, "quadrature")
    try:
        quadrature = QuadratureSpec(**{"rel_tol": FIGURE_REL_TOL, **quadrature_fields})
    except ValidationError as exc:
        first = exc.errors()[0]
        key = ".".join(str(part) for part in first.get("loc", ()))
        raise ConfigError(first.get("msg", str(exc)), key=f"quadrature.{key}") from exc

    figures = {}
    for name, defaults in FIGURE_DEFAULTS.items():
        merged = dict(defaults)
        for key, raw in _section(values, name).items():
            if key in defaults:
                try:
                    merged[key] = int(raw) if key == "points" else float(raw)
                except ValueError as exc:
                    raise ConfigError(f"not a number: {raw!r}", key=f"{name}.{key}") from exc
        figures[name] = merged

    cutoff_ratio = values.get("thermo.cutoff_ratio")
    try:
        return RunConfig(
            material=material,
            quadrature=quadrature,
            cutoff_ratio=float(cutoff_ratio) if cutoff_ratio else DEFAULT_CUTOFF_RATIO,
            figures=figures,
        )
    except (ValidationError, ValueError) as exc:
        raise ConfigError(str(exc), key="thermo.cutoff_ratio") from exc


def load_run_config(path: Optional[str] = None) -> RunConfig:
    """Read a key/value run configuration file; no path gives the figure-caption defaults."""
    if path is None:
        return RunConfig()
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    logger.debug("loading run config from {}", path)
    return parse_run_config(dotenv_values(path))


# ------------------------------------------------------------------------------
# Logging
# ------------------------------------------------------------------------------

def configure_logging(level: Optional[str] = None) -> None:
    """Single stderr sink at LOG_LEVEL (DEBUG when DEBUG_MODE is on)."""
    logger.remove()
    chosen = level or ("DEBUG" if DEBUG_MODE else LOG_LEVEL)
    logger.add(sys.stderr, level=chosen, format="<level>{level: <8}</level> {name}:{function} - {message}")


def get_config_summary() -> dict:
    """Get a summary of current process settings."""
    return {
        'threads': EDDY_CASIMIR_THREADS,
        'log_level': LOG_LEVEL,
        'debug_mode': DEBUG_MODE,
        'figure_rel_tol': FIGURE_REL_TOL,
    }
