#!/usr/bin/env python3
"""
Access Throughput Model CLI - Command-line interface for the per-user rate model

Predicts the average per-user transfer rate of a shared access channel,
checks the prediction against a flow-level simulator, infers the channel
load from speed-test samples and classifies planning areas against
capacity thresholds.

Available Commands:
    predict     - Closed-form prediction for a class mix
    simulate    - Flow-level simulation with confidence intervals
    validate    - Load sweep comparing model and simulated speed tests
    plan        - Classify planning areas against capacity thresholds
    infer-rho   - Estimate channel load from speed-test samples
    replay      - Re-run a command from its manifest and verify outputs

Every command writes its results and a manifest.json into --out
(default: $ACCESS_MODEL_OUTPUT_DIR/<command>).

Exit codes:
    0: Success
    2: Input error (bad document, table or option)
    3: Unstable load (rho >= 1)
    4: Simulation failure, or a replay whose outputs differ

Usage:
    python scripts/access_model.py [COMMAND] [OPTIONS]
    python scripts/access_model.py [COMMAND] --help

Examples:
    python scripts/access_model.py predict configs/two_class_pf.yaml
    python scripts/access_model.py simulate configs/fair_05.yaml --seed 7
    python scripts/access_model.py plan areas.csv --threshold italia_1_giga --growth 0.12 --horizon 5
    python scripts/access_model.py replay output/simulate/manifest.json --out /tmp/replay
"""
from dataclasses import replace
import functools
from pathlib import Path
from typing import Dict, List, Optional
import logging
import sys

import click
import pandas as pd
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

# Add src to path before other project imports
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.config.documents import (
    ModelDocument, RateTableDoc, SimulationDocument, SweepDocument, load_document, to_domain,
)
from src.config.settings import settings
from src.constants import (
    DEFAULT_PARETO_CAP_FACTOR, DEFAULT_PARETO_SHAPE, EXIT_SIMULATION_FAILURE,
    MAX_MALFORMED_FRACTION, THRESHOLD_PRESETS,
)
from src.harness.formats import (
    TABLE_FORMATS, inference_rows, malformed_rows, occupancy_rows, prediction_rows,
    read_samples, read_table, sim_class_rows, table_path, verdict_rows, write_json, write_table,
)
from src.harness.sweep import run_sweep, sweep_spec_from_document
from src.model.finite_population import (
    busy_fraction, finite_population_throughput, infinite_population_gap,
)
from src.planning.batch import evaluate_batch
from src.planning.records import REQUIRED_COLUMNS, GrowthModel, TargetThreshold, parse_area_table
from src.probes.inference import infer_load_from_samples
from src.probes.mcs import lint_rate_table
from src.simulation.checks import inflation_check, insensitivity_check
from src.simulation.config import DistributionKind, ServiceDistribution
from src.simulation.engine import run_simulation
from src.utils.logger import setup_logging
from src.utils.manifest import ManifestManager, build_manifest, compare_outputs, file_digest
from src.utils.units import format_rate, parse_rate
from src.utils.validation import (
    ConfigError, MalformedRecordError, SimulationError, UnstableLoadError, exit_code_for,
)

console = Console()
logger = logging.getLogger("access_model")


class CommandRun:
    """Collects a command's output files and writes its manifest last."""

    def __init__(self, command: str, out: Optional[Path], fmt: str = "csv"):
        self.command = command
        self.fmt = fmt
        self.out_dir = Path(out) if out else settings.command_output_dir(command)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.outputs: Dict[str, Path] = {}

    def table(self, df: pd.DataFrame, name: str) -> Path:
        path = write_table(df, table_path(self.out_dir, name, self.fmt), self.fmt)
        self.outputs[path.name] = path
        return path

    def json(self, obj, name: str) -> Path:
        path = write_json(obj, self.out_dir / f"{name}.json")
        self.outputs[path.name] = path
        return path

    def finish(self, config: dict, seeds=(), inputs: Optional[Dict[str, Path]] = None) -> Path:
        manifest = build_manifest(
            command=self.command,
            config=config,
            seeds=seeds,
            inputs=inputs,
            outputs=self.outputs,
            arguments=_replay_arguments(click.get_current_context()),
        )
        path = ManifestManager(self.out_dir).save(manifest)
        console.print(f"[dim]Results written to {self.out_dir}[/dim]")
        return path


def _replay_arguments(ctx: click.Context) -> List[str]:
    """Arguments reproducing the current command, without --out."""
    positional, options = [], []
    for param in ctx.command.params:
        value = ctx.params.get(param.name)
        if param.name == "out" or value is None:
            continue
        if isinstance(param, click.Argument):
            positional.append(str(value))
        elif getattr(param, "is_flag", False):
            if value:
                options.append(param.opts[0])
        elif getattr(param, "multiple", False):
            for item in value:
                options.extend([param.opts[0], str(item)])
        else:
            options.extend([param.opts[0], str(value)])
    return [ctx.command.name] + positional + options


def handle_errors(func):
    """Map domain errors onto the exit-code contract."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except UnstableLoadError as e:
            logger.error(f"{func.__name__}: {e}", exc_info=True)
            console.print(f"[bold red]✗ Unstable load: rho = {e.rho:.6g} (must be < 1)[/bold red]")
            sys.exit(exit_code_for(e))
        except Exception as e:
            logger.error(f"{func.__name__} failed: {e}", exc_info=True)
            console.print(f"[bold red]✗ {type(e).__name__}: {e}[/bold red]")
            sys.exit(exit_code_for(e))
    return wrapper


def output_options(func):
    func = click.option(
        '--format', 'fmt', type=click.Choice(TABLE_FORMATS), default='csv',
        help='Format of tabular outputs.'
    )(func)
    func = click.option(
        '--out', type=click.Path(file_okay=False, path_type=Path), default=None,
        help='Output directory (default: <output_dir>/<command>).'
    )(func)
    return func


def _table(title: str, df: pd.DataFrame, columns: List[str], formats: Optional[dict] = None):
    formats = formats or {}
    table = Table(title=title, show_header=True, header_style="bold magenta")
    for column in columns:
        table.add_column(column, style="cyan" if column == columns[0] else None)
    for row in df.to_dict(orient="records"):
        cells = []
        for column in columns:
            value = row.get(column)
            if value is None or (isinstance(value, float) and value != value):
                cells.append("-")
            elif column in formats:
                cells.append(formats[column](value))
            elif isinstance(value, float):
                cells.append(f"{value:.6g}")
            else:
                cells.append(str(value))
        table.add_row(*cells)
    console.print(table)


@click.group()
@click.option('--log-level', default=None, help='Override the configured log level.')
def cli(log_level):
    """Per-user throughput model for shared access channels"""
    setup_logging(level=log_level)


@cli.command()
@click.argument('config', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@output_options
@handle_errors
def predict(config, out, fmt):
    """
    Closed-form per-class prediction for a class mix.

    Reports rho, the per-class rho_i, mean transfer times D and D_i and the
    per-user rate v_i = (1 - rho) * C_i. An optional finite_population
    section adds the finite-population transfer time and its gap to the
    infinite-population formula.

    Example:
        python scripts/access_model.py predict configs/two_class_pf.yaml
    """
    document = load_document(config, ModelDocument)
    mix = to_domain(document)
    rows = prediction_rows(mix)

    run = CommandRun("predict", out, fmt)
    run.table(rows, "prediction")
    console.print(Panel.fit(
        f"[bold cyan]{mix.channel.discipline.value}[/bold cyan] channel at "
        f"{format_rate(mix.channel.capacity)}: rho = {rows['rho'].iloc[0]:.6g}",
        border_style="cyan"
    ))
    _table("Per-class prediction", rows,
           ["label", "class_rho", "channel_rate", "mean_transfer_time", "per_user_throughput"],
           {"channel_rate": format_rate, "per_user_throughput": format_rate})

    if document.finite_population is not None:
        spec = to_domain(document.finite_population)
        prediction = finite_population_throughput(spec)
        finite = {
            **infinite_population_gap(spec),
            "busy_fraction": busy_fraction(spec),
            "per_user_throughput": prediction.per_user_throughput,
        }
        run.json(finite, "finite_population")
        console.print(
            f"Finite population N={spec.population}: D = {finite['finite_transfer_time']:.6g}s, "
            f"gap to infinite-population formula {finite['relative_gap']:.2%}"
        )

    run.finish(document.model_dump(mode="json"), inputs={"config": config})


def _comparison_distribution(kind: str, shape: float, cap_factor: float) -> ServiceDistribution:
    if kind == DistributionKind.BOUNDED_PARETO.value:
        return ServiceDistribution(kind, shape, cap_factor)
    return ServiceDistribution(kind)


@cli.command()
@click.argument('config', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--seed', type=click.IntRange(min=0), default=None, help='Override the document seed.')
@click.option('--compare-distribution', type=click.Choice([k.value for k in DistributionKind]),
              default=None, help='Also run with this size distribution and compare.')
@click.option('--pareto-shape', type=float, default=DEFAULT_PARETO_SHAPE,
              help='Shape of the bounded Pareto comparison.')
@click.option('--pareto-cap', type=float, default=DEFAULT_PARETO_CAP_FACTOR,
              help='Cap of the bounded Pareto comparison, as a multiple of the mean.')
@click.option('--inflation-check', 'run_inflation_check', is_flag=True,
              help='Compare a proportional-fair run with its inflated fair-sharing twin.')
@output_options
@handle_errors
def simulate(config, seed, compare_distribution, pareto_shape, pareto_cap, run_inflation_check,
             out, fmt):
    """
    Flow-level simulation of a class mix with finite populations.

    Writes per-class transfer times and throughputs with 95% batch-means
    half-widths, the occupancy distribution and the closed-form values for
    comparison. The same document and seed always give the same results.

    Example:
        python scripts/access_model.py simulate configs/fair_05.yaml --seed 7
    """
    document = load_document(config, SimulationDocument)
    sim = to_domain(document)
    if seed is not None:
        sim = sim.with_seed(seed)

    analytic = None
    try:
        analytic = prediction_rows(sim.mix)
    except UnstableLoadError as e:
        logger.warning(f"No closed-form reference: {e}")

    console.print(Panel.fit(
        f"[bold cyan]Simulating {sim.total_population} users for {sim.horizon:g}s "
        f"(seed {sim.seed})[/bold cyan]",
        border_style="cyan"
    ))
    stats = run_simulation(sim)

    run = CommandRun("simulate", out, fmt)
    classes = sim_class_rows(stats, analytic)
    run.table(classes, "classes")
    run.table(occupancy_rows(stats), "occupancy")
    run.json(stats.to_dict(), "stats")
    _table("Simulated classes", classes,
           ["label", "completed", "mean_transfer_time", "transfer_time_half_width",
            "analytic_transfer_time", "throughput_ratio"],
           {"throughput_ratio": format_rate})

    seeds = [sim.seed]
    if compare_distribution is not None:
        candidate = sim.with_distribution(
            _comparison_distribution(compare_distribution, pareto_shape, pareto_cap)
        )
        report = insensitivity_check(sim, candidate)
        run.json(report.to_dict(), "insensitivity_check")
        console.print(f"Insensitivity vs {compare_distribution}: max gap {report.max_gap:.2%}")
    if run_inflation_check:
        report = inflation_check(sim)
        run.json(report.to_dict(), "inflation_check")
        console.print(f"Inflated fair-sharing twin: max gap {report.max_gap:.2%}")

    run.finish(sim.to_dict(), seeds=seeds, inputs={"config": config})


@cli.command()
@click.argument('sweep', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--seed', type=click.IntRange(min=0), default=None, help='Override the document seed.')
@click.option('--workers', type=click.IntRange(min=1), default=None,
              help='Worker threads (default: settings.sweep_workers).')
@output_options
@handle_errors
def validate(sweep, seed, workers, out, fmt):
    """
    Sweep a load grid and compare model and simulated speed tests.

    Writes a curve dataset (analytic and simulated per-user rate for every
    load and probe profile) and a scatter dataset (predicted and measured
    speed per probe), plus the least-squares fit of measured on predicted.
    A failing grid point is reported in its row; the sweep continues.

    Example:
        python scripts/access_model.py validate configs/sweep.yaml --workers 4
    """
    spec = sweep_spec_from_document(load_document(sweep, SweepDocument))
    if seed is not None:
        spec = replace(spec, seed=seed)

    console.print(Panel.fit(
        f"[bold cyan]Validation sweep over {len(spec.rho_grid)} loads, "
        f"{len(spec.profiles)} probe profile(s)[/bold cyan]",
        border_style="cyan"
    ))
    result = run_sweep(spec, workers=workers)

    run = CommandRun("validate", out, fmt)
    run.table(result.curve, "curve")
    run.table(result.scatter, "scatter")
    run.json({"regression": result.regression, "failures": result.failures}, "regression")
    _table("Per-user rate versus load", result.curve,
           ["rho", "analytic_speed", "simulated_speed", "half_width", "relative_gap", "status"],
           {"analytic_speed": format_rate, "simulated_speed": format_rate,
            "half_width": format_rate, "relative_gap": lambda v: f"{v:.2%}"})
    if result.regression:
        console.print(
            f"Regression measured = {result.regression['slope']:.4f} x predicted "
            f"+ {result.regression['intercept']:.6g}"
        )
    run.finish(spec.to_dict(), seeds=[spec.seed], inputs={"sweep": sweep})

    if result.failures and len(result.failures) == len(result.curve):
        console.print("[bold red]✗ Every grid point failed[/bold red]")
        sys.exit(EXIT_SIMULATION_FAILURE)


def _custom_threshold(text: str) -> TargetThreshold:
    parts = text.split(":")
    if len(parts) != 3 or not parts[0].strip():
        raise ConfigError(f"--floor expects NAME:DOWN:UP, got '{text}'")
    return TargetThreshold(parts[0].strip(), parse_rate(parts[1]), parse_rate(parts[2]))


@cli.command()
@click.argument('records', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--threshold', 'presets', multiple=True, type=click.Choice(sorted(THRESHOLD_PRESETS)),
              help='Threshold preset (repeatable; default: every preset).')
@click.option('--floor', 'floors', multiple=True,
              help='Custom threshold NAME:DOWN:UP, e.g. fast:300Mb/s:50Mb/s (repeatable).')
@click.option('--growth', type=float, default=0.0, help='Compound annual growth of rho.')
@click.option('--horizon', type=int, default=0, help='Plan years after the base year.')
@click.option('--workers', type=click.IntRange(min=1), default=None,
              help='Worker threads (default: settings.sweep_workers).')
@output_options
@handle_errors
def plan(records, presets, floors, growth, horizon, workers, out, fmt):
    """
    Classify planning areas against capacity thresholds.

    For every area, plan year and threshold the predicted per-user rate in
    both directions is compared with the threshold floors: "meets",
    "fails" or "saturated" (rho >= 1). Malformed rows are reported and
    skipped.

    Examples:
        python scripts/access_model.py plan areas.csv
        python scripts/access_model.py plan areas.csv --threshold italia_5g --growth 0.12 --horizon 5
    """
    thresholds = [TargetThreshold.preset(name) for name in presets]
    thresholds += [_custom_threshold(text) for text in floors]
    if not thresholds:
        thresholds = [TargetThreshold.preset(name) for name in sorted(THRESHOLD_PRESETS)]
    if len({t.name for t in thresholds}) != len(thresholds):
        raise ConfigError("Threshold names must be unique")
    growth_model = GrowthModel(growth, horizon)

    df = read_table(records, REQUIRED_COLUMNS)
    result = evaluate_batch(
        parse_area_table(df), thresholds, growth_model, workers=workers or settings.sweep_workers
    )
    for line, message in result.malformed:
        console.print(f"[yellow]⚠ line {line}: skipped ({message})[/yellow]")

    run = CommandRun("plan", out, fmt)
    run.table(verdict_rows(result.verdicts, thresholds), "verdicts")
    summary = pd.DataFrame(result.summary_rows(),
                           columns=["threshold", "year_offset", "meets", "fails", "saturated"])
    run.table(summary, "summary")
    run.json({
        "areas": len(result.verdicts),
        "malformed": malformed_rows(result.malformed),
        "duplicates": result.duplicates,
    }, "report")
    _table("Classification counts", summary, list(summary.columns))

    run.finish({
        "thresholds": [
            {"name": t.name, "download_floor": t.download_floor, "upload_floor": t.upload_floor}
            for t in thresholds
        ],
        "growth_rate": growth_model.growth_rate,
        "horizon_years": growth_model.horizon_years,
    }, inputs={"records": records})


@cli.command(name="infer-rho")
@click.argument('samples', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--rate-table', type=click.Path(exists=True, dir_okay=False, path_type=Path),
              default=None, help='YAML rate table resolving the mcs column.')
@click.option('--max-malformed', type=click.FloatRange(0.0, 1.0), default=MAX_MALFORMED_FRACTION,
              help='Largest tolerated fraction of malformed rows.')
@output_options
@handle_errors
def infer_rho(samples, rate_table, max_malformed, out, fmt):
    """
    Estimate channel load from speed-test samples.

    Each sample gives rho_i = 1 - v_i / C_i, with C_i from the channel_rate
    column or the MCS index through --rate-table. Samples faster than their
    channel rate are flagged and left out of the aggregate.

    Example:
        python scripts/access_model.py infer-rho output/validate/scatter.csv
    """
    table = None
    inputs = {"samples": samples}
    if rate_table is not None:
        table = to_domain(load_document(rate_table, RateTableDoc))
        for warning in lint_rate_table(table):
            console.print(f"[yellow]⚠ {warning}[/yellow]")
        inputs["rate_table"] = rate_table

    entries = read_samples(read_table(samples), table)
    malformed = [(line, str(item)) for line, item in entries if isinstance(item, MalformedRecordError)]
    parsed = [item for _, item in entries if not isinstance(item, MalformedRecordError)]
    if entries and len(malformed) / len(entries) > max_malformed:
        raise MalformedRecordError(
            f"{len(malformed)} of {len(entries)} rows are malformed "
            f"(more than {max_malformed:.0%}); first: {malformed[0][1]}"
        )
    for line, message in malformed:
        console.print(f"[yellow]⚠ line {line}: skipped ({message})[/yellow]")

    report = infer_load_from_samples(parsed)

    run = CommandRun("infer-rho", out, fmt)
    run.table(inference_rows(parsed, report), "samples")
    run.json({
        **report.to_dict(),
        "inconsistent_lines": [parsed[i].line for i in report.inconsistent],
        "malformed": malformed_rows(malformed),
    }, "inference")
    console.print(Panel.fit(
        f"[bold green]rho = {report.rho:.4f}[/bold green] from {report.used} samples "
        f"({report.inconsistent_count} inconsistent, {len(malformed)} malformed)",
        border_style="green"
    ))
    run.finish({
        "max_malformed": max_malformed,
        "rate_table": table.as_dict() if table is not None else None,
    }, inputs=inputs)


@cli.command()
@click.argument('manifest', type=click.Path(exists=True, path_type=Path))
@click.option('--out', type=click.Path(file_okay=False, path_type=Path), default=None,
              help='Directory for the replayed outputs (default: <output_dir>/replay).')
@handle_errors
def replay(manifest, out):
    """
    Re-run a command from its manifest and verify the outputs byte for byte.

    Inputs must be unchanged (their digests are checked first). Exits 4 if
    any replayed output differs from the digest in the manifest.

    Example:
        python scripts/access_model.py replay output/simulate/manifest.json --out /tmp/replay
    """
    recorded = ManifestManager.from_path(manifest).load()
    arguments = recorded.get("arguments") or []
    if not arguments:
        raise ConfigError(f"{manifest} records no command arguments")

    for name, entry in sorted(recorded.get("inputs", {}).items()):
        path = Path(entry["path"])
        if not path.exists():
            raise ConfigError(f"Input '{name}' is missing: {path}")
        if file_digest(path) != entry["sha256"]:
            raise ConfigError(f"Input '{name}' changed since the run: {path}")

    out_dir = Path(out) if out else settings.command_output_dir("replay")
    console.print(Panel.fit(
        f"[bold cyan]Replaying {recorded['command']} into {out_dir}[/bold cyan]",
        border_style="cyan"
    ))
    try:
        cli.main(args=arguments + ["--out", str(out_dir)], standalone_mode=False)
    except SystemExit as e:
        if e.code:
            raise SimulationError(f"Replayed command exited with code {e.code}")

    mismatches = compare_outputs(recorded.get("outputs", {}), out_dir)
    if mismatches:
        console.print(f"[bold red]✗ Outputs differ: {', '.join(mismatches)}[/bold red]")
        sys.exit(EXIT_SIMULATION_FAILURE)
    console.print(Panel.fit(
        f"[bold green]All {len(recorded.get('outputs', {}))} outputs reproduced ✓[/bold green]",
        border_style="green"
    ))


if __name__ == '__main__':
    cli()
