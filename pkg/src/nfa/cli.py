"""Command line front end: estimate, train, evaluate, serve.

Exit codes: 0 success, 1 usage or I/O problems, 2 validation failures,
3 numeric failures during training.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import replace
from typing import Sequence

import click

from .defaults import default_document, nominal_ratings
from .errors import NfaError, ParseError, TrainingDivergedError
from .evaluation import compare_report, holdout_evaluate, loocv_evaluate
from .figures import render_evaluation_figures, render_training_figures
from .models import ModelInputs, full_pipeline_estimate
from .storage import (
    attach_coefficients,
    read_dataset,
    read_parameter_document,
    write_parameter_document,
    write_text_atomic,
)
from .training import TrainingConfig, train

DEFAULT_LISTEN = "127.0.0.1:8000"


@click.group()
def cli():
    """Neuro-fuzzy algorithmic effort estimation."""


@cli.command("init")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option(
    "--model",
    "model_id",
    default="cocomo81_organic",
    show_default=True,
    help="Back-end cost model to bind the document to.",
)
def cmd_init(out_path: str, model_id: str):
    """Write a factory-fresh parameter document."""
    write_parameter_document(out_path, default_document(model_id))
    click.echo(f"wrote: {out_path}")


def _load_project_inputs(doc, project_path, size, model_id, rating_flags):
    """Resolve the project to estimate from a file or inline flags."""
    if project_path is not None:
        try:
            with open(project_path, encoding="utf-8") as handle:
                payload = json.load(handle)
        except json.JSONDecodeError as e:
            raise ParseError(f"project file is not valid JSON: {e}") from None
        if not isinstance(payload, dict):
            raise ParseError("project file must hold a JSON object")
        unknown = sorted(set(payload) - {"size", "model_id", "ratings"})
        if unknown:
            raise ParseError(f"project file has unknown keys {unknown}")
        if "size" not in payload:
            raise ParseError("project file is missing 'size'")
        size = payload["size"]
        model_id = payload.get("model_id", doc.schema.model_binding)
        given = payload.get("ratings", {})
        if not isinstance(given, dict):
            raise ParseError("project 'ratings' must be an object")
    else:
        if size is None:
            raise click.UsageError("provide --project or --size")
        model_id = model_id or doc.schema.model_binding
        given = {}
        for flag in rating_flags:
            key, sep, value = flag.partition("=")
            if not sep or not key:
                raise click.UsageError(
                    f"--rating takes FACTOR=VALUE, got {flag!r}"
                )
            given[key] = value
    # Unset factors sit at their nominal level; unknown ids still fail
    # schema validation downstream.
    ratings = dict(nominal_ratings(doc.schema))
    ratings.update(given)
    coefficients = (
        doc.coefficients if model_id == doc.schema.model_binding else None
    )
    inputs = ModelInputs(size=float(size), model_id=model_id, coefficients=coefficients)
    return ratings, inputs


@cli.command("estimate")
@click.option(
    "--params",
    "params_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
)
@click.option(
    "--project",
    "project_path",
    type=click.Path(exists=True, dir_okay=False),
    help="JSON file with size, model_id, ratings.",
)
@click.option("--size", type=float, help="Project size (inline alternative to --project).")
@click.option("--model", "model_id", help="Back-end model id (defaults to the document binding).")
@click.option(
    "--rating",
    "rating_flags",
    multiple=True,
    metavar="FACTOR=VALUE",
    help="Factor rating as a level label or number; repeatable.",
)
@click.option("--json", "as_json", is_flag=True, help="Emit the result as JSON.")
def cmd_estimate(params_path, project_path, size, model_id, rating_flags, as_json):
    """Estimate effort for one project."""
    doc = read_parameter_document(params_path)
    ratings, inputs = _load_project_inputs(
        doc, project_path, size, model_id, rating_flags
    )
    result = full_pipeline_estimate(ratings, inputs, doc.rules, doc.params, doc.schema)
    if as_json:
        click.echo(json.dumps(result.to_dict(), indent=2))
        return
    click.echo(f"effort_pm: {result.effort_pm:.2f}")
    click.echo(f"product_em: {result.product_em:.6f}")
    click.echo("factor multipliers:")
    for fid, fm in result.multipliers.items():
        click.echo(f"  {fid}: {fm:.4f}")
    validated = doc.schema.validate_ratings(ratings)
    fired = [
        (fid, validated[fid], arf)
        for fid, arf in result.arf.items()
        if abs(arf - validated[fid]) > 1e-12
    ]
    if fired:
        click.echo("arf adjustments:")
        for fid, raw, arf in fired:
            click.echo(f"  {fid}: {raw:.2f} -> {arf:.2f}")


@cli.command("train")
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--params", "params_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--epochs", default=500, show_default=True, type=int)
@click.option("--lr", default=0.05, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--progress", is_flag=True, help="Print the loss after every epoch.")
@click.option(
    "--figures",
    "figures_dir",
    type=click.Path(file_okay=False),
    help="Also render a loss-curve figure into this directory.",
)
def cmd_train(data_path, params_path, out_path, epochs, lr, seed, progress, figures_dir):
    """Calibrate multiplier values against a project dataset."""
    doc = read_parameter_document(params_path)
    records = attach_coefficients(read_dataset(data_path, doc.schema), doc)
    config = TrainingConfig(learning_rate=lr, epochs=epochs, seed=seed)

    def on_epoch(epoch, loss, _params):
        if progress:
            click.echo(f"epoch {epoch}: loss {loss:.6f}")

    report = train(records, doc.params, config, doc.rules, doc.schema, on_epoch=on_epoch)
    provenance = (
        f"trained on {os.path.basename(data_path)} (n={len(records)}): "
        f"epochs={epochs}, lr={lr}, seed={seed}, best_epoch={report.best_epoch}, "
        f"loss {report.initial_loss:.6f} -> {report.final_loss:.6f}"
    )
    write_parameter_document(
        out_path, replace(doc, params=report.final_params, provenance=provenance)
    )
    click.echo(f"initial_loss: {report.initial_loss:.6f}")
    click.echo(f"final_loss: {report.final_loss:.6f}")
    click.echo(f"best_epoch: {report.best_epoch}")
    click.echo(f"wrote: {out_path}")
    if figures_dir:
        for path in render_training_figures(report.loss_history, figures_dir):
            click.echo(f"wrote: {path}")


@cli.command("evaluate")
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--params", "params_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--protocol",
    default="loocv",
    show_default=True,
    type=click.Choice(["loocv", "holdout"]),
)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--test-fraction", default=0.3, show_default=True, type=float)
@click.option("--epochs", default=500, show_default=True, type=int)
@click.option("--lr", default=0.05, show_default=True, type=float)
@click.option(
    "--csv",
    "csv_path",
    type=click.Path(dir_okay=False),
    help="Also write the machine-readable report here.",
)
@click.option(
    "--figures",
    "figures_dir",
    type=click.Path(file_okay=False),
    help="Also render comparison figures into this directory.",
)
def cmd_evaluate(
    data_path, params_path, protocol, seed, test_fraction, epochs, lr, csv_path, figures_dir
):
    """Compare calibrated accuracy against the uncalibrated baseline."""
    doc = read_parameter_document(params_path)
    records = attach_coefficients(read_dataset(data_path, doc.schema), doc)
    config = TrainingConfig(learning_rate=lr, epochs=epochs, seed=seed)
    if protocol == "loocv":
        nfa_report, baseline_report = loocv_evaluate(
            records, doc.schema, doc.rules, doc.params, config
        )
    else:
        nfa_report, baseline_report = holdout_evaluate(
            records, doc.schema, doc.rules, doc.params, config, test_fraction
        )
    comparison = compare_report(nfa_report, baseline_report)
    click.echo(comparison.to_text(), nl=False)
    if csv_path:
        write_text_atomic(csv_path, comparison.to_csv())
        click.echo(f"wrote: {csv_path}")
    if figures_dir:
        for path in render_evaluation_figures(
            comparison, nfa_report, baseline_report, figures_dir
        ):
            click.echo(f"wrote: {path}")


@cli.command("serve")
@click.option("--params", "params_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--data",
    "data_path",
    required=True,
    type=click.Path(dir_okay=False),
    help="Dataset file; created on the first appended project if absent.",
)
@click.option(
    "--listen",
    envvar="NFA_LISTEN",
    default=DEFAULT_LISTEN,
    show_default=True,
    metavar="HOST:PORT",
)
@click.option(
    "--assets",
    "assets_dir",
    type=click.Path(file_okay=False, exists=True),
    help="Directory of built web-ui assets to serve at /.",
)
def cmd_serve(params_path, data_path, listen, assets_dir):
    """Serve the HTTP API and the web UI."""
    host, _, port_text = listen.rpartition(":")
    if not host or not port_text.isdigit():
        raise click.UsageError(f"--listen takes HOST:PORT, got {listen!r}")
    import uvicorn

    from .service import create_app

    app = create_app(params_path=params_path, data_path=data_path, assets_dir=assets_dir)
    uvicorn.run(app, host=host, port=int(port_text), log_level="info")


def main(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and translate every outcome into the exit-code scheme."""
    args = list(argv) if argv is not None else sys.argv[1:]
    try:
        cli.main(args=args, prog_name="nfa", standalone_mode=False)
    except click.exceptions.Exit as e:
        return int(e.exit_code)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as e:
        e.show()
        return 1
    except TrainingDivergedError as e:
        click.echo(f"error: {e}", err=True)
        return 3
    except NfaError as e:
        click.echo(f"error: {e}", err=True)
        return 2
    except OSError as e:
        click.echo(f"error: {e}", err=True)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())
