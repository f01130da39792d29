import io
import os
from typing import Any, Iterable, Mapping, Optional

import pandas as pd
from loguru import logger

from utils.formatters import format_header, format_inline_header, parse_header
from utils.mode_density import SpectralCurve
from utils.thermo import ThermoResult

FLOAT_FORMAT = "%.17g"
THERMO_COLUMNS = ["L", "T", "gamma", "Lambda", "quantity", "value", "normalization", "converged"]


def frame_to_csv(df: pd.DataFrame, parameters: Optional[Mapping[str, Any]] = None) -> str:
    """
    Serialises a table as CSV text with a "# key=value" parameter header.

    Args:
        df (pd.DataFrame): Data columns, written without the index.
        parameters (Mapping[str, Any], optional): Values for the header block.

    Returns:
        str: Deterministic CSV text (17 significant digits, no timestamps).
    """
    output = io.StringIO()
    output.write(format_header(parameters or {}))
    df.to_csv(output, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return output.getvalue()


def csv_to_frame(text: str) -> pd.DataFrame:
    """Reads CSV text written by frame_to_csv, skipping the header block."""
    return pd.read_csv(io.StringIO(text), comment="#")


def read_parameters(text: str) -> dict:
    return parse_header(text)


def spectral_curve_to_csv(curve: SpectralCurve) -> str:
    """A single `# axis=<xi|omega> L=<val> gamma=<val>` line, then frequency,density rows."""
    df = pd.DataFrame(curve.samples, columns=["frequency", "density"])
    header = format_inline_header({"axis": curve.axis, "L": curve.L, "gamma": curve.gamma})
    return header + frame_to_csv(df)


def thermo_results_to_frame(results: Iterable[ThermoResult]) -> pd.DataFrame:
    rows = [
        {
            "L": r.L,
            "T": r.T,
            "gamma": r.gamma,
            "Lambda": r.cutoff,
            "quantity": r.quantity.value,
            "value": r.value,
            "normalization": r.normalization,
            "converged": r.converged,
        }
        for r in results
    ]
    return pd.DataFrame(rows, columns=THERMO_COLUMNS)


def thermo_results_to_csv(results: Iterable[ThermoResult], parameters: Optional[Mapping[str, Any]] = None) -> str:
    return frame_to_csv(thermo_results_to_frame(results), parameters)


def write_text(text: str, out_path: Optional[str]) -> None:
    """Writes text to ``out_path``, creating parent folders; nothing is written when the path is None."""
    if out_path is None:
        return
    folder = os.path.dirname(out_path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(out_path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    logger.info("wrote {}", out_path)
