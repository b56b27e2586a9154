"""Console output helpers for simulation commands."""

from __future__ import annotations

from rich.console import Console
from rich.table import Table

from sflsim.case.assembly import Case
from sflsim.scheduler.runner import RunReport


def print_case_summary(case: Case, console: Console) -> None:
    """Print symbols, domain and equations of an assembled case."""
    ws = case.workspace
    console.print(f"[bold]Case[/bold] {case.name}: {case.system.count} particles, {case.domain.describe()}")
    console.print(f"constants: {', '.join(ws.constants) or '-'}")
    console.print(f"variables: {', '.join(ws.variables) or '-'}")
    console.print(f"fields: {', '.join(ws.fields) or '-'}")
    for equation in case.equations:
        console.print(f"  {equation.name}: {equation.target} = {equation.rhs.to_sfl()}", markup=False)


def print_run_report(report: RunReport, console: Console) -> None:
    """Print a run report as a two-column table."""
    table = Table(title=f"Run report: {report.case}", show_header=False)
    table.add_column("item", style="bold")
    table.add_column("value")
    table.add_row("particles", str(report.particles))
    table.add_row("threads", str(report.threads))
    table.add_row("steps", str(report.steps))
    table.add_row("frames", str(report.frames))
    table.add_row("cell rebuilds", str(report.cell_rebuilds))
    table.add_row("final time", f"{report.final_time:.6g}")
    table.add_row("wall time", f"{report.wall_time_s:.2f} s")
    for category, count in report.warnings.items():
        table.add_row(f"[yellow]warning[/yellow] {category}", str(count))
    if report.output_dir:
        table.add_row("output", report.output_dir)
    console.print(table)
