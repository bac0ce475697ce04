"""Command-line entry: plot <kind> --csv PATH --out PATH [--bins N]."""

from pathlib import Path

import click

from .figures import KINDS, FigureSpec, MissingColumnsError, render


@click.command()
@click.argument("kind", type=click.Choice(KINDS))
@click.option("--csv", "csv_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--bins", type=int, default=30, show_default=True)
def main(kind, csv_path, out_path, bins):
    """Render one benchmark figure from a samples.csv file."""
    spec = FigureSpec(
        csv_path=Path(csv_path), kind=kind, out_path=Path(out_path), bins=bins
    )
    try:
        data = render(spec)
    except MissingColumnsError as exc:
        raise click.ClickException(str(exc))
    if not data:
        click.echo(f"warning: {csv_path} has no samples; wrote empty axes", err=True)
    click.echo(out_path)


if __name__ == "__main__":
    main()
