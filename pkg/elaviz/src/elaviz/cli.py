"""``elaviz render``: turn experiment CSV exports into figures."""

import click

from elaviz.figures import RENDERERS
from elaviz.schemas import SchemaError


@click.group()
def main():
    """Figure rendering for function-evolution experiment exports."""


@main.command("render")
@click.option("--figure", "kind", required=True,
              type=click.Choice(sorted(RENDERERS) + ["all"]),
              help="Figure kind, or 'all' to render every kind that has inputs.")
@click.option("--in", "indir", type=click.Path(exists=True, file_okay=False),
              required=True, help="Directory with the exported CSVs.")
@click.option("--out", "outdir", type=click.Path(file_okay=False), required=True)
def render(kind, indir, outdir):
    """Render one figure kind (or all applicable ones) from CSV exports."""
    kinds = sorted(RENDERERS) if kind == "all" else [kind]
    rendered = []
    for k in kinds:
        try:
            rendered.append(RENDERERS[k](indir, outdir))
        except SchemaError as exc:
            if kind != "all":
                raise click.ClickException(str(exc))
    if kind == "all" and not rendered:
        raise click.ClickException(f"no renderable inputs found in {indir}")
    for path in rendered:
        click.echo(str(path))


if __name__ == "__main__":
    main()
