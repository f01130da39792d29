# ==============================================================================
# 🧲 Eddy-Casimir – Command-line entry point
# ==============================================================================
from functools import partial

import click
from loguru import logger

from commands.acceptance import run_acceptance
from commands.figures import FIGURES, build_figure
from commands.sweeps import AxisSpec, QUANTITIES, parallel_map, parse_fixed, run_sweep
from config import EDDY_CASIMIR_THREADS, configure_logging, get_config_summary, load_run_config
from utils.em_response import branch_table
from utils.errors import EddyCasimirError
from utils.export_utils import frame_to_csv, spectral_curve_to_csv, thermo_results_to_csv, write_text
from utils.formatters import format_acceptance_report
from utils.lifshitz_ref import static_plateau_factor
from utils.mode_density import SpectralAxis, spectral_curve
from utils.thermo import entropy, s_infinity
from utils.units_models import UnitSystem, thouless_frequency

import numpy as np
import pandas as pd

# gold: lambda_p = 136 nm, lambda = lambda_p / 2 pi
DEFAULT_PENETRATION_DEPTH_NM = 21.7


def _workers(requested):
    """Requested worker count, capped by EDDY_CASIMIR_THREADS."""
    if requested is None:
        return EDDY_CASIMIR_THREADS
    return max(1, min(requested, EDDY_CASIMIR_THREADS))


def _emit(text, out):
    if out:
        write_text(text, out)
        click.secho(f"Wrote {out}", fg='green', bold=True, err=True)
    else:
        click.echo(text, nl=False)


# ------------------------------------------------------------------------------
# 1. Command group
# ------------------------------------------------------------------------------
@click.group()
@click.option('--log-level', default=None, help='Override LOG_LEVEL for this run.')
def main(log_level):
    """Eddy-current Casimir calculations: figure data, sweeps and acceptance checks."""
    configure_logging(log_level)
    logger.debug("settings: {}", get_config_summary())


# ------------------------------------------------------------------------------
# 2. Figures
# ------------------------------------------------------------------------------
@main.command()
@click.argument('number', type=click.Choice(['1', '2', '3', '4']))
@click.option('-c', '--config', 'config_path', type=click.Path(exists=True), default=None, help='Run configuration file.')
@click.option('-o', '--out', type=click.Path(), default=None, help='CSV output file (stdout when omitted).')
@click.option('-w', '--workers', type=int, default=None, help='Worker processes (capped by EDDY_CASIMIR_THREADS).')
def fig(number, config_path, out, workers):
    """Reproduce the data behind figure NUMBER as CSV."""
    name = FIGURES[int(number) - 1]
    try:
        config = load_run_config(config_path)
        dataset = build_figure(name, config, _workers(workers))
    except EddyCasimirError as exc:
        raise click.ClickException(str(exc))
    if not dataset.frame.empty and not dataset.frame["converged"].all():
        logger.warning("{} contains non-converged points", name)
    _emit(dataset.to_csv(), out)


# ------------------------------------------------------------------------------
# 3. Sweeps
# ------------------------------------------------------------------------------
@main.command()
@click.option('-q', '--quantity', type=click.Choice(sorted(QUANTITIES)), required=True, help='Quantity to evaluate.')
@click.option('-a', '--axis', 'axis_text', required=True, help='Sweep axis as NAME:min:max:N[:lin|log].')
@click.option('-p', '--param', 'params', multiple=True, help='Fixed parameter NAME=VALUE (repeatable).')
@click.option('-c', '--config', 'config_path', type=click.Path(exists=True), default=None, help='Run configuration file.')
@click.option('-o', '--out', type=click.Path(), default=None, help='CSV output file (stdout when omitted).')
@click.option('--si', is_flag=True, help='Add SI columns next to the dimensionless ones.')
@click.option('--penetration-depth-nm', type=float, default=DEFAULT_PENETRATION_DEPTH_NM, show_default=True,
              help='Penetration depth lambda used by --si.')
@click.option('-w', '--workers', type=int, default=None, help='Worker processes (capped by EDDY_CASIMIR_THREADS).')
def sweep(quantity, axis_text, params, config_path, out, si, penetration_depth_nm, workers):
    """Evaluate one quantity along one axis."""
    try:
        config = load_run_config(config_path)
        axis = AxisSpec.parse(axis_text)
        fixed = parse_fixed(params)
        m = config.material_for("fig1")
        units = UnitSystem(penetration_depth_nm * 1e-9) if si else None
        df = run_sweep(quantity, axis, fixed, m, config.quadrature, config.cutoff(m), _workers(workers), units)
    except (EddyCasimirError, ValueError) as exc:
        raise click.ClickException(str(exc))

    parameters = {"quantity": quantity, "axis": axis_text, "material.kind": m.kind, "material.gamma": m.gamma,
                  "material.plasma_frequency": m.plasma_frequency, "Lambda": config.cutoff(m), **fixed}
    if si:
        parameters["penetration_depth_nm"] = penetration_depth_nm
    parameters.update({f"quadrature.{k}": v for k, v in config.quadrature.model_dump().items()})
    _emit(frame_to_csv(df, parameters), out)


# ------------------------------------------------------------------------------
# 4. Spectral curves
# ------------------------------------------------------------------------------
@main.command()
@click.option('-a', '--axis', type=click.Choice([a.value for a in SpectralAxis]), default='xi', show_default=True,
              help='xi: branch-cut density rho_tilde; omega: real-frequency eddy density.')
@click.option('-L', '--separation', 'L', type=float, required=True, help='Plate separation in units of lambda.')
@click.option('--f-min', type=float, default=None, help='Lowest frequency (default 1e-2 xi_L).')
@click.option('--f-max', type=float, default=None, help='Highest frequency (default 0.9 gamma).')
@click.option('-n', '--points', type=click.IntRange(min=1), default=30, show_default=True)
@click.option('-c', '--config', 'config_path', type=click.Path(exists=True), default=None, help='Run configuration file.')
@click.option('-o', '--out', type=click.Path(), default=None, help='CSV output file (stdout when omitted).')
def curve(axis, L, f_min, f_max, points, config_path, out):
    """Sample a density of states on a log grid as a spectral curve."""
    try:
        config = load_run_config(config_path)
        m = config.material_for("fig1")
        low = f_min if f_min is not None else 1e-2 * thouless_frequency(m, L)
        high = f_max if f_max is not None else 0.9 * m.gamma
        if not 0 < low < high:
            raise click.BadParameter(f"need 0 < f-min < f-max, got {low:g} and {high:g}")
        frequencies = np.logspace(np.log10(low), np.log10(high), points)
        result = spectral_curve(SpectralAxis(axis), frequencies, L, m, config.quadrature)
    except (EddyCasimirError, ValueError) as exc:
        raise click.ClickException(str(exc))
    if not all(result.converged):
        logger.warning("spectral curve contains non-converged points")
    _emit(spectral_curve_to_csv(result), out)


# ------------------------------------------------------------------------------
# 5. Entropy plateau
# ------------------------------------------------------------------------------
@main.command()
@click.option('-L', '--separation', 'L', type=float, required=True, help='Plate separation in units of lambda.')
@click.option('--t-min', type=float, default=1e-2, show_default=True, help='Lowest temperature in units of xi_L.')
@click.option('--t-max', type=float, default=1e2, show_default=True, help='Highest temperature in units of xi_L.')
@click.option('-n', '--points', type=click.IntRange(min=1), default=9, show_default=True)
@click.option('-c', '--config', 'config_path', type=click.Path(exists=True), default=None, help='Run configuration file.')
@click.option('-o', '--out', type=click.Path(), default=None, help='CSV output file (stdout when omitted).')
@click.option('-w', '--workers', type=int, default=None, help='Worker processes (capped by EDDY_CASIMIR_THREADS).')
def plateau(L, t_min, t_max, points, config_path, out, workers):
    """Entropy S(T, L) up to its high-temperature plateau S_inf(L)."""
    if not 0 < t_min < t_max:
        raise click.BadParameter("need 0 < t-min < t-max")
    try:
        config = load_run_config(config_path)
        m = config.material_for("fig3")
        quad = config.quadrature
        xi_L = thouless_frequency(m, L)
        temperatures = [float(T) for T in np.logspace(np.log10(t_min * xi_L), np.log10(t_max * xi_L), points)]
        results = parallel_map(partial(entropy, L=L, m=m, quad=quad), temperatures, _workers(workers))
        results.append(s_infinity(L, m, quad))
        reference = static_plateau_factor(L, m, quad)
    except EddyCasimirError as exc:
        raise click.ClickException(str(exc))
    if not all(r.converged for r in results):
        logger.warning("entropy table contains non-converged rows")
    parameters = {"material.gamma": m.gamma, "material.plasma_frequency": m.plasma_frequency,
                  "L": L, "xi_L": xi_L, "static_plateau_factor": reference}
    _emit(thermo_results_to_csv(results, parameters), out)


# ------------------------------------------------------------------------------
# 6. Acceptance suite
# ------------------------------------------------------------------------------
@main.command()
@click.option('-c', '--config', 'config_path', type=click.Path(exists=True), default=None, help='Run configuration file.')
@click.option('--only', type=int, multiple=True, help='Run only these criterion numbers (repeatable).')
@click.option('-w', '--workers', type=int, default=None, help='Worker processes (capped by EDDY_CASIMIR_THREADS).')
def check(config_path, only, workers):
    """Run the acceptance criteria; exits non-zero if any fails."""
    try:
        config = load_run_config(config_path) if config_path else None
        quad = config.quadrature if config is not None else None
        criteria = run_acceptance(quad, only or None, _workers(workers))
    except EddyCasimirError as exc:
        raise click.ClickException(str(exc))
    click.echo(format_acceptance_report(criteria), nl=False)
    if not all(c.passed for c in criteria):
        click.secho("Acceptance suite failed", fg='red', bold=True, err=True)
        raise SystemExit(1)
    click.secho("Acceptance suite passed", fg='green', bold=True, err=True)


# ------------------------------------------------------------------------------
# 7. Debug: branch points of the eddy cut
# ------------------------------------------------------------------------------
@main.command('branch-table')
@click.option('-c', '--config', 'config_path', type=click.Path(exists=True), default=None, help='Run configuration file.')
@click.option('--k-min', type=float, default=1e-3, show_default=True)
@click.option('--k-max', type=float, default=10.0, show_default=True)
@click.option('-n', '--points', type=int, default=20, show_default=True)
def branch_table_command(config_path, k_min, k_max, points):
    """Tabulate the branch points xi_k of the eddy cut."""
    if not 0 < k_min < k_max or points < 1:
        raise click.BadParameter("need 0 < k-min < k-max and at least one point")
    try:
        m = load_run_config(config_path).material_for("fig1")
        rows = branch_table(np.logspace(np.log10(k_min), np.log10(k_max), points), m)
    except EddyCasimirError as exc:
        raise click.ClickException(str(exc))
    df = pd.DataFrame(rows, columns=["k", "xi_k"])
    click.echo(frame_to_csv(df, {"material.gamma": m.gamma, "material.plasma_frequency": m.plasma_frequency}), nl=False)


if __name__ == "__main__":
    main()
