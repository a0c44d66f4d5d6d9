"""Command-line entry points: serve, check, configs, eval."""

from __future__ import annotations

import json
import sys

import click

from .analysis import enumerate_configurations, is_consistent
from .errors import FmgcError
from .evaluation import eval_loo
from .model import parse_model
from .preferences import ItemKind, load_interactions


@click.group()
def main() -> None:
    """Group-based feature-model configuration toolkit."""


@main.command()
@click.option("--port", type=click.IntRange(1, 65535), default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--data-dir",
    type=click.Path(file_okay=False),
    default="./fmgc-data",
    show_default=True,
    help="Directory for persisted models, matrices and sessions.",
)
@click.option(
    "--ui-dir",
    type=click.Path(exists=True, file_okay=False),
    default=None,
    help="Serve the web board from this directory at /ui.",
)
def serve(port: int, host: str, data_dir: str, ui_dir: str | None) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .api import create_app

    uvicorn.run(create_app(data_dir, ui_dir), host=host, port=port, log_level="info")


@main.command()
@click.argument("model_file", type=click.File("r", encoding="utf-8"))
def check(model_file) -> None:
    """Parse a model file and report whether it has any valid configuration."""
    try:
        model = parse_model(model_file.read())
        consistent = is_consistent(model, ())
    except FmgcError as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(1)
    click.echo(
        json.dumps(
            {
                "name": model.name,
                "features": len(model.features),
                "constraints": len(model.constraints),
                "consistent": consistent,
            }
        )
    )
    sys.exit(0 if consistent else 2)


@main.command()
@click.argument("model_file", type=click.File("r", encoding="utf-8"))
@click.option("--limit", type=click.IntRange(min=1), default=None, help="Stop after N configurations.")
def configs(model_file, limit: int | None) -> None:
    """List valid configurations, one per line, features space-separated."""
    try:
        model = parse_model(model_file.read())
        found = enumerate_configurations(model, limit)
    except FmgcError as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(1)
    for config in found:
        click.echo(" ".join(sorted(config)))


@main.command("eval")
@click.option("--interactions", "csv_file", required=True, type=click.File("r", encoding="utf-8"))
@click.option("--kind", type=click.Choice(["order", "choice"]), required=True)
@click.option("--k", type=click.IntRange(min=1), default=3, show_default=True)
def eval_command(csv_file, kind: str, k: int) -> None:
    """Leave-one-out evaluation of the rating predictor; prints JSON metrics."""
    try:
        matrix = load_interactions(csv_file.read(), ItemKind(kind))
        result = eval_loo(matrix, k)
    except FmgcError as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(1)
    click.echo(json.dumps(result.as_dict()))


if __name__ == "__main__":
    main()
