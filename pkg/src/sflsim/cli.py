"""CLI entrypoint for sflsim."""

from __future__ import annotations

import logging
import os
from pathlib import Path

import typer
from rich.console import Console
from rich.logging import RichHandler

from sflsim.case.assembly import assemble_case
from sflsim.config import AppConfig
from sflsim.core.io import read_case_file
from sflsim.core.printing import print_case_summary, print_run_report
from sflsim.errors import ResultFileError, SflError
from sflsim.scheduler.hot_start import hot_start
from sflsim.scheduler.runner import run
from sflsim.scheduler.vtk import FORMATS

app = typer.Typer(
    add_completion=False,
    help="Run a particle simulation described by an SFL case file.",
)
console = Console()
err_console = Console(stderr=True)

CASE_OPTION = typer.Option(
    ...,
    "-yamlname",
    "--case",
    help="YAML case file describing symbols, particle system, equations and run parameters.",
)
THREADS_OPTION = typer.Option(
    None,
    "--threads",
    min=1,
    help="Worker threads (default: SFLSIM_THREADS, NAUTICLE_THREADS or the CPU count).",
)
SEED_OPTION = typer.Option(None, "--seed", help="Seed for rand() streams (default 0).")
OUTDIR_OPTION = typer.Option(
    None,
    "--outdir",
    help="Directory receiving <case-name>/frame_*.vtk and run_report.txt (default: results).",
)
FORMAT_OPTION = typer.Option(None, "--format", help="Result file format: ascii or binary.")
HOTSTART_OPTION = typer.Option(
    None,
    "--hotstart",
    help="Result file to resume from; equations still come from the case file.",
)
VALIDATE_OPTION = typer.Option(
    False,
    "--validate",
    help="Parse and assemble the case, then exit without running.",
)
VERBOSE_OPTION = typer.Option(False, "--verbose", help="Log debug messages.")


def _status(message: str) -> None:
    console.print(f"[dim]{message}[/dim]")


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False, markup=False)],
        force=True,
    )


def resolve_threads(requested: int | None, particles: int) -> int:
    """Thread count, never more than the number of particles."""
    threads = requested or os.cpu_count() or 1
    return max(1, min(threads, max(particles, 1)))


def _report_error(exc: SflError) -> None:
    err_console.print(f"error[{exc.category}]: {exc}", markup=False, highlight=False, soft_wrap=True)


@app.command()
def simulate(
    case_file: Path = CASE_OPTION,
    threads: int | None = THREADS_OPTION,
    seed: int | None = SEED_OPTION,
    outdir: Path | None = OUTDIR_OPTION,
    output_format: str | None = FORMAT_OPTION,
    hotstart: Path | None = HOTSTART_OPTION,
    validate: bool = VALIDATE_OPTION,
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """Assemble the case file and run it to simulated_time."""
    _configure_logging(verbose)
    cfg = AppConfig()
    fmt = (output_format or cfg.output_format).lower()
    if fmt not in FORMATS:
        raise typer.BadParameter(f"expected one of: {', '.join(FORMATS)}", param_hint="--format")
    name = case_file.stem

    try:
        if not case_file.exists():
            raise ResultFileError(f"case file does not exist: {case_file}")
        document = read_case_file(case_file)
        if hotstart is not None:
            case = hot_start(hotstart, document, base_dir=case_file.parent, seed=seed, name=name)
        else:
            case = assemble_case(
                document, base_dir=case_file.parent, seed=cfg.seed if seed is None else seed, name=name
            )
        if validate:
            print_case_summary(case, console)
            console.print(f"[bold green]{case_file} is valid[/bold green]")
            return
        workers = resolve_threads(threads or cfg.threads, case.system.active_count)
        output_dir = Path(outdir or cfg.outdir) / name
        _status(f"Running {name} with {workers} thread(s), writing {fmt} frames to {output_dir}")
        report = run(case, threads=workers, output_dir=output_dir, output_format=fmt, on_status=_status)
    except SflError as exc:
        _report_error(exc)
        raise typer.Exit(code=1) from exc

    print_run_report(report, console)


def main() -> None:
    app()


if __name__ == "__main__":
    main()
