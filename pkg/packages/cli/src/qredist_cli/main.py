"""Main CLI entry point for qredist."""

import logging
import sys
from pathlib import Path
from typing import Any, NoReturn

import click
from qredist_sdk import (
    ConfigInvalidError,
    ExperimentRunner,
    Method,
    SummaryInvalidError,
    load_run_config,
)
from qredist_sdk.config import RunConfig, SuiteScale, get_numeric_config
from qredist_sdk.permopt import disentangle, exhaustive_search, matched_objectives
from qredist_sdk.reports import SUMMARY_FILE, emit_dat, emit_standard_dat, load_summary, write_run
from qredist_sdk.states import mutual_info_report, random_pure_state, reduced_ab
from qredist_sdk.verification import SUITES, run_suites
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from qredist_cli import __version__

console = Console()
err_console = Console(stderr=True)

EXIT_CONFIG = 1
EXIT_VERIFY = 2


def _fail_config(message: str) -> NoReturn:
    err_console.print(f"[red]Configuration error:[/red] {message}")
    sys.exit(EXIT_CONFIG)


def _load(config_file: Path | None, **overrides: Any) -> RunConfig:
    try:
        return load_run_config(config_file, **overrides)
    except ConfigInvalidError as e:
        _fail_config(str(e))


def _fmt(value: float | None, spec: str = ".6f") -> str:
    return "[dim]n/a[/dim]" if value is None else format(value, spec)


def config_option(f: Any) -> Any:
    return click.option(
        "--config",
        "config_file",
        type=click.Path(path_type=Path),
        default=None,
        help="key = value run configuration file",
    )(f)


def dims_options(f: Any) -> Any:
    options = [
        click.option("--d", "d", type=int, default=None, help="Sets both d_A and d_B"),
        click.option("--da", "d_a", type=int, default=None, help="Dimension of A"),
        click.option("--db", "d_b", type=int, default=None, help="Dimension of B"),
        click.option("--dc", "d_c", type=int, default=None, help="Dimension of C, default d_A*d_B"),
        click.option("--rank-c", type=int, default=None, help="Restrict C to its first levels"),
        click.option("--seed", type=int, default=None, help="Base seed"),
    ]
    for option in reversed(options):
        f = option(f)
    return f


@click.group()
@click.version_option(version=__version__, prog_name="qredist")
@click.option("--verbose", "-v", is_flag=True, help="Log debug details")
def cli(verbose: bool) -> None:
    """qredist - Redistribute correlations of tripartite quantum states.

    Maximize the entropy difference S(A) - S(B) over unitaries on A x B with
    permutation layouts, greedy number partitioning and Adam, and compare them
    on seeded random ensembles.
    """
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


@cli.command()
@config_option
@dims_options
@click.option("--n", "n_states", type=int, default=None, help="Number of random states")
@click.option("--methods", default=None, help="Comma-separated, e.g. rgnp,adam")
@click.option("--out-dir", type=click.Path(path_type=Path), default=None, help="Output directory")
@click.option("--adam-lr", type=float, default=None, help="Adam learning rate")
@click.option("--adam-max-iters", type=int, default=None, help="Adam iteration cap per restart")
@click.option("--adam-restarts", type=int, default=None, help="Adam restarts per state")
@click.option(
    "--adam-stop-rule",
    type=click.Choice(["patience", "threshold"]),
    default=None,
    help="patience: decaying lr, several sub-tol steps; threshold: first sub-tol step",
)
@click.option(
    "--rgnp-refine/--no-rgnp-refine",
    default=None,
    help="Polish rgnp layouts with cell moves (default on)",
)
@click.option("--workers", type=int, default=None, help="Parallel worker processes")
def run(config_file: Path | None, **overrides: Any) -> None:
    """Compare methods on a seeded ensemble and write the run outputs.

    Example:
        qredist run --d 2 --n 100 --methods closed_form_d2,adam --out-dir runs/d2
    """
    cfg = _load(config_file, **overrides)
    runner = ExperimentRunner(cfg)
    with console.status(f"[bold green]Running {cfg.n_states} states..."):
        summary = runner.run()
    written = write_run(summary, cfg.out_dir)

    table = Table(title=f"delta_s by method ({'x'.join(map(str, summary.dims))})")
    table.add_column("Method", style="cyan", no_wrap=True)
    table.add_column("min", style="magenta")
    table.add_column("max", style="magenta")
    table.add_column("mean rel. error", style="green")
    table.add_column("flagged", style="yellow")
    for method in summary.methods:
        low, high = summary.delta_s_range.get(method, (None, None))
        stats = summary.relative_error.get(method)
        table.add_row(
            method.value,
            _fmt(low),
            _fmt(high),
            _fmt(stats.mean if stats else None, ".4e"),
            str(stats.flagged) if stats else "",
        )
    console.print(table)

    if summary.failures:
        console.print(f"\n[yellow]{summary.failures} method failure(s) recorded[/yellow]")
    console.print(
        Panel.fit(
            "\n".join(str(p) for p in written),
            title=f"Wrote {len(written)} files",
            border_style="green",
        )
    )


@cli.command()
@click.option("--suite", "suites", multiple=True, help="Run only this suite (repeatable)")
@click.option("--quick", is_flag=True, help="Reduced sample counts for a smoke run")
@click.option(
    "--fixtures-dir",
    type=click.Path(path_type=Path, file_okay=False),
    default=None,
    help="Directory with replacement fixture files",
)
def verify(suites: tuple[str, ...], quick: bool, fixtures_dir: Path | None) -> None:
    """Run the verification suites and report per-suite status.

    Exits with status 2 when any suite fails.

    Example:
        qredist verify --suite rgnp_trace
    """
    try:
        with console.status("[bold green]Running verification suites..."):
            results = run_suites(
                suites or None, fixtures_dir, SuiteScale.quick() if quick else SuiteScale()
            )
    except ConfigInvalidError as e:
        _fail_config(str(e))

    table = Table(title="Verification")
    table.add_column("Suite", style="cyan", no_wrap=True)
    table.add_column("Status")
    table.add_column("Detail")
    for result in results:
        status = "[green]PASS[/green]" if result.passed else "[red]FAIL[/red]"
        table.add_row(result.name, status, result.detail)
    console.print(table)

    failed = [r for r in results if not r.passed]
    for result in failed:
        if result.diff:
            console.print(Panel(result.diff, title=f"{result.name} diff", border_style="red"))
    if failed:
        console.print(f"\n[red]{len(failed)} of {len(results)} suites failed[/red]")
        sys.exit(EXIT_VERIFY)
    console.print(f"\n[green]All {len(results)} suites passed[/green]")


@cli.command()
@click.argument("summary_path", type=click.Path(path_type=Path))
@click.option("--x", "x_field", default=None, help="Field of the first column")
@click.option("--y", "y_field", default=None, help="Field of the second column")
@click.option(
    "--out", "out_path", type=click.Path(path_type=Path), default=None, help="Output file"
)
def emit(
    summary_path: Path, x_field: str | None, y_field: str | None, out_path: Path | None
) -> None:
    """Re-emit two-column .dat files from a stored summary.json.

    Without --x/--y the standard plot files are written next to the summary
    (or into --out when given as a directory).

    Example:
        qredist emit runs/d2/summary.json --x delta_s.rgnp --y delta_s.adam --out pairs.dat
    """
    if summary_path.is_dir():
        summary_path = summary_path / SUMMARY_FILE
    if not summary_path.is_file():
        _fail_config(f"Summary not found: {summary_path}")
    try:
        summary = load_summary(summary_path)
    except SummaryInvalidError as e:
        _fail_config(str(e))

    if (x_field is None) != (y_field is None):
        _fail_config("--x and --y must be given together")
    if x_field is not None and y_field is not None:
        path = out_path or summary_path.with_name(f"{x_field}_vs_{y_field}.dat")
        try:
            count = emit_dat(summary.records, x_field, y_field, path)
        except KeyError as e:
            _fail_config(f"Unknown field {e}")
        console.print(f"Wrote {count} lines to [cyan]{path}[/cyan]")
        return

    written = emit_standard_dat(summary, out_path or summary_path.parent)
    if not written:
        console.print("[yellow]No standard plot files for this run (adam not requested)[/yellow]")
    for path in written:
        console.print(f"Wrote [cyan]{path}[/cyan]")


def _applicable_methods(d_a: int, d_b: int) -> list[Method]:
    methods = [Method.THEOREM1]
    if d_a * d_b <= 9:
        methods.append(Method.EXHAUSTIVE)
    if (d_a, d_b) == (2, 2):
        methods.append(Method.CLOSED_FORM_D2)
    return methods + [Method.RGNP, Method.ADAM]


@cli.command()
@config_option
@dims_options
@click.option("--adam-max-iters", type=int, default=None, help="Adam iteration cap per restart")
@click.option("--adam-restarts", type=int, default=None, help="Adam restarts per state")
def inspect(config_file: Path | None, **overrides: Any) -> None:
    """Run every applicable method on one seeded state.

    Example:
        qredist inspect --d 3 --seed 7
    """
    base = _load(config_file, **overrides)
    cfg = _load(
        config_file, **overrides, n_states=1, methods=_applicable_methods(base.d_a, base.d_b)
    )
    psi = random_pure_state(cfg.dims, cfg.seed, cfg.rank_c)
    report = mutual_info_report(psi)
    with console.status("[bold green]Optimizing..."):
        record = ExperimentRunner(cfg).run_state(0)

    entropies = Table(title=f"State seed {cfg.seed} ({'x'.join(map(str, cfg.dims))})")
    entropies.add_column("Quantity", style="cyan", no_wrap=True)
    entropies.add_column("Value (bits)", style="magenta")
    for name in ("s_a", "s_b", "s_c", "i_ac", "i_bc", "delta_s"):
        entropies.add_row(name, f"{getattr(report, name):.6f}")
    entropies.add_row("rank_c", str(report.rank_c))
    console.print(entropies)

    methods = Table(title="Best delta_s by method")
    methods.add_column("Method", style="cyan", no_wrap=True)
    methods.add_column("delta_s", style="magenta")
    methods.add_column("S_C - delta_s", style="green")
    methods.add_column("seconds")
    for method in cfg.methods:
        value = record.delta_s.get(method)
        gap = None if value is None else record.s_c - value
        note = record.errors.get(method)
        methods.add_row(
            method.value,
            _fmt(value) if note is None else f"[red]{note}[/red]",
            _fmt(gap, ".2e"),
            f"{record.wall_times.get(method, 0.0):.3f}",
        )
    console.print(methods)

    if Method.EXHAUSTIVE in cfg.methods:
        _, spectrum = disentangle(reduced_ab(psi), cfg.d_a, cfg.d_b)
        matched = matched_objectives(spectrum, exhaustive_search(spectrum).assignment)
        names = ", ".join(o.value for o in matched) or "none"
        console.print(f"\nExhaustive rows optimal for partition objectives: [cyan]{names}[/cyan]")


@cli.command()
@config_option
def config(config_file: Path | None) -> None:
    """Show the effective numeric and run configuration."""
    cfg = _load(config_file)

    numeric = Table(title="Numeric Tolerances")
    numeric.add_column("Setting", style="cyan")
    numeric.add_column("Value", style="magenta")
    for key, value in get_numeric_config().model_dump().items():
        numeric.add_row(key, f"{value:g}")
    console.print(numeric)

    run_table = Table(title="Run Configuration")
    run_table.add_column("Setting", style="cyan")
    run_table.add_column("Value", style="magenta")
    for key, value in cfg.model_dump().items():
        if key == "methods":
            value = ",".join(m.value for m in value)
        run_table.add_row(key, str(value))
    console.print(run_table)
    console.print(f"\nVerification suites: {', '.join(SUITES)}")


if __name__ == "__main__":
    cli()
