"""Command-line entry points: sweep, limits, compare.

Exit codes: 0 success, 2 configuration error, 3 numeric-domain error,
4 I/O error.
"""

from __future__ import annotations

import sys

import click

from .ee import ee_bandwidth_limit, knee_point
from .errors import ConfigError, NumericDomainError
from .runner import SweepSpec, grid_values, run_compare, run_sweep
from .scenario import default_setups, load_scenario, load_setups
from .throughput import chi_scaling

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _run(action):
    try:
        action()
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except NumericDomainError as exc:
        click.echo(f"numeric-domain error: {exc}", err=True)
        sys.exit(EXIT_NUMERIC)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(EXIT_IO)


@click.group()
def main():
    """Near-field XL-MIMO energy-efficiency sweeps."""


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=str, help="scenario file")
@click.option("--axis", required=True, type=click.Choice(["bandwidth", "antennas", "users", "tx_power"]))
@click.option("--values", required=True, type=str,
              help="grid: 'lin:a:b:n', 'log:a:b:n' or comma list")
@click.option("--mode", default="closed_form", type=click.Choice(["closed_form", "monte_carlo", "both"]))
@click.option("--trials", default=2000, type=int, help="Monte Carlo trials per point")
@click.option("--seed", default=0, type=int, help="64-bit master seed")
@click.option("--out", "out_path", required=True, type=str, help="output CSV path")
@click.option("--workers", default=1, type=int, help="parallel worker processes")
@click.option("--users-series", default="", type=str,
              help="optional comma list of K values, one row series each")
def sweep(scenario_path, axis, values, mode, trials, seed, out_path, workers, users_series):
    """Run one parameter sweep and write CSV plus a run manifest."""

    def action():
        scenario = load_scenario(scenario_path)
        series = tuple(int(tok) for tok in users_series.split(",") if tok.strip())
        spec = SweepSpec(
            axis=axis,
            values=grid_values(values),
            mode=mode,
            trials=trials,
            master_seed=seed,
            users_series=series,
        )
        manifest = run_sweep(scenario, spec, out_path, workers=workers)
        click.echo(f"wrote {out_path} (config {manifest.config_hash[:12]})")

    _run(action)


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=str)
def limits(scenario_path):
    """Print the bandwidth EE limit, knee point, and array-gain scaling constants."""

    def action():
        scenario = load_scenario(scenario_path)
        scaling = chi_scaling(scenario.spacing, scenario.cell)
        click.echo(f"ee_bandwidth_limit_bits_per_joule = {ee_bandwidth_limit(scenario):.6e}")
        click.echo(f"knee_point_antennas = {knee_point(scenario):.6g}")
        click.echo(f"chi_linear_coefficient_per_m2_per_element = {scaling.linear_coefficient:.6e}")
        click.echo(f"chi_saturation_limit_per_m2 = {scaling.saturation_limit:.6e}")

    _run(action)


@main.command()
@click.option("--setups", "setups_path", default="", type=str,
              help="sectioned setups file; built-in trio when omitted")
@click.option("--pgrid", default="log:1e-18:1e-14:9", type=str, help="transmit-power grid, W/Hz")
@click.option("--out", "out_path", required=True, type=str)
def compare(setups_path, pgrid, out_path):
    """Evaluate EE for each setup over a transmit-power grid, to CSV."""

    def action():
        setups = load_setups(setups_path) if setups_path else default_setups()
        run_compare(setups, grid_values(pgrid), out_path)
        click.echo(f"wrote {out_path}")

    _run(action)


if __name__ == "__main__":
    main()
