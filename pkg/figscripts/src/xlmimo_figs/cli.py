"""CLI: render one figure from a sweep CSV.

Exit codes: 0 success, 2 recipe/CSV error, 4 I/O error.
"""

from __future__ import annotations

import sys

import click

from .recipes import FIGURE_IDS, FigureError, FigureRecipe, render


@click.command()
@click.option("--figure", "figure_id", required=True, type=click.Choice(list(FIGURE_IDS)))
@click.option("--csv", "csv_path", required=True, type=str, help="sweep CSV input")
@click.option("--out", "out_path", required=True, type=str, help="output PNG path")
def main(figure_id, csv_path, out_path):
    """Render FIGURE from CSV to OUT."""
    try:
        render(FigureRecipe(input_csv=csv_path, figure_id=figure_id, output_image=out_path))
    except FigureError as exc:
        click.echo(f"figure error: {exc}", err=True)
        sys.exit(2)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(4)
    click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
