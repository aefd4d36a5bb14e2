#!/usr/bin/env python3
"""
Configuration Validation Script
Run before a long simulation or sweep to check settings, documents and rate tables.

Usage:
    python scripts/validate_config.py [DOCUMENT ...] [--kind model|simulation|sweep|rate_table]
"""

import sys
from pathlib import Path

# Add the project root to the Python path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

import click
from rich.console import Console
from rich.table import Table
from rich.panel import Panel
from src.config.documents import (
    ModelDocument, RateTableDoc, SimulationDocument, SweepDocument, load_yaml, parse_document,
    to_domain,
)
from src.config.settings import settings
from src.probes.mcs import lint_rate_table
from src.utils.units import format_rate

console = Console()

DOCUMENT_KINDS = {
    "model": ModelDocument,
    "simulation": SimulationDocument,
    "sweep": SweepDocument,
    "rate_table": RateTableDoc,
}


def guess_kind(data) -> str:
    """Document kind from its top-level keys."""
    if not isinstance(data, dict):
        return "model"
    if "rho_grid" in data:
        return "sweep"
    if "rates" in data and "channel" not in data:
        return "rate_table"
    if "horizon" in data:
        return "simulation"
    return "model"


def validate_settings():
    """Show the environment-driven settings."""
    console.print("\n[cyan]Validating settings...[/cyan]")

    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("Parameter", style="cyan")
    table.add_column("Value", style="green")
    table.add_column("Status", justify="center")

    table.add_row("Output Directory", str(settings.output_dir), "✓")
    table.add_row("Log Level", settings.log_level, "✓")
    table.add_row("Log Directory", str(settings.log_dir), "✓")
    table.add_row("Sweep Workers", str(settings.sweep_workers), "✓")

    console.print(table)
    return True


def validate_document(path: Path, kind: str = None):
    """Parse a YAML document, convert it to domain types and lint its rate table."""
    data = load_yaml(path)
    kind = kind or guess_kind(data)
    console.print(f"\n[cyan]Validating {path} as a {kind} document...[/cyan]")
    document = parse_document(data, DOCUMENT_KINDS[kind], path)

    rate_table = document if kind == "rate_table" else getattr(document, "rate_table", None)
    if kind == "sweep":
        channel = to_domain(document.channel)
        console.print(
            f"  Grid: {len(document.rho_grid)} loads from {document.rho_grid[0]:g} "
            f"to {document.rho_grid[-1]:g} on {format_rate(channel.capacity)} [green]✓[/green]"
        )
    elif kind != "rate_table":
        domain = to_domain(document)
        mix = domain.mix if kind == "simulation" else domain
        table = Table(show_header=True, header_style="bold magenta")
        table.add_column("Class", style="cyan")
        table.add_column("Arrival Rate", style="green")
        table.add_column("Mean Size", style="green")
        table.add_column("Channel Rate", style="green")
        for user_class in mix.classes:
            table.add_row(
                user_class.label,
                f"{user_class.arrival_rate:g}/s",
                f"{user_class.mean_size:g} bit",
                format_rate(user_class.channel_rate),
            )
        console.print(table)

    if rate_table is not None:
        warnings = lint_rate_table(to_domain(rate_table))
        for warning in warnings:
            console.print(f"  [yellow]⚠ {warning}[/yellow]")
        if not warnings:
            console.print("  Rate table is monotone [green]✓[/green]")
    return True


@click.command()
@click.argument('documents', nargs=-1, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--kind', type=click.Choice(sorted(DOCUMENT_KINDS)), default=None,
              help='Document kind (default: guessed from the top-level keys).')
def main(documents, kind):
    """Run all validation checks."""
    console.print(Panel.fit(
        "[bold yellow]Access Model Configuration Validator[/bold yellow]",
        border_style="yellow"
    ))

    checks = [("Settings", validate_settings)]
    for path in documents:
        checks.append((str(path), lambda path=path: validate_document(path, kind)))

    results = []
    for check_name, check_func in checks:
        try:
            result = check_func()
            results.append((check_name, result))
        except Exception as e:
            console.print(f"\n[red]✗ {check_name} failed: {e}[/red]")
            results.append((check_name, False))

    # Summary
    console.print("\n" + "="*50)
    passed = sum(1 for _, result in results if result)
    total = len(results)

    if passed == total:
        console.print(Panel.fit(
            f"[bold green]All {total} checks passed! ✓[/bold green]",
            border_style="green"
        ))
        sys.exit(0)
    else:
        console.print(Panel.fit(
            f"[bold red]{passed}/{total} checks passed. Fix errors before running.[/bold red]",
            border_style="red"
        ))
        sys.exit(1)


if __name__ == "__main__":
    main()
