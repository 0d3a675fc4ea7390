"""Persistence of experiment runs.

A run directory holds ``records.csv``, ``summary.json``, ``timings.csv`` and
two-column ``.dat`` files ready for plotting. Everything except
``timings.csv`` is byte-for-byte reproducible from the run configuration.
"""

import csv
import logging
from collections.abc import Iterable
from pathlib import Path

from pydantic import ValidationError

from qredist_sdk.exceptions import SummaryInvalidError
from qredist_sdk.models import ComparisonRecord, Method, RunSummary

logger = logging.getLogger(__name__)

RECORDS_FILE = "records.csv"
SUMMARY_FILE = "summary.json"
TIMINGS_FILE = "timings.csv"

_INTEGER_FIELDS = {"state_index", "seed", "rank_c"}


def _cell(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def record_field(record: ComparisonRecord, name: str) -> float | int | None:
    """Look up a record value by name.

    Plain names are record attributes (``s_c``, ``relative_error``, ...);
    ``delta_s.<method>`` and ``relative_error.<method>`` address per-method values.

    Raises:
        KeyError: If the name is unknown
    """
    base, _, method = name.partition(".")
    if method:
        table = {"delta_s": record.delta_s, "relative_error": record.relative_errors}.get(base)
        if table is None:
            raise KeyError(name)
        try:
            return table.get(Method(method))
        except ValueError:
            raise KeyError(name) from None
    if base not in {"state_index", "seed", "s_c", "rank_c", "relative_error"}:
        raise KeyError(name)
    value: float | int | None = getattr(record, base)
    return value


def _format(name: str, value: float | int) -> str:
    if name.partition(".")[0] in _INTEGER_FIELDS:
        return f"{int(value):d}"
    if name.startswith("relative_error"):
        return f"{value:.6e}"
    return f"{value:.6f}"


def emit_dat(records: Iterable[ComparisonRecord], x_field: str, y_field: str, path: Path) -> int:
    """Write a headerless two-column file, one record per line.

    Records lacking either value are skipped. Delta-S columns use six decimals,
    relative errors six significant digits in exponent form.

    Returns:
        Number of lines written

    Raises:
        KeyError: If a field name is unknown
        OSError: If the file cannot be written
    """
    lines = []
    for record in records:
        x, y = record_field(record, x_field), record_field(record, y_field)
        if x is None or y is None:
            continue
        lines.append(f"{_format(x_field, x)} {_format(y_field, y)}\n")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(lines), encoding="utf-8")
    return len(lines)


def standard_dat_files(summary: RunSummary) -> dict[str, tuple[str, str]]:
    """File name -> (x_field, y_field) of the plots a run produces."""
    files: dict[str, tuple[str, str]] = {}
    if Method.ADAM not in summary.methods:
        return files
    for method in summary.methods:
        if method.is_permutation:
            files[f"{method.value}_vs_adam.dat"] = (f"delta_s.{method.value}", "delta_s.adam")
            files[f"{method.value}_relative_error.dat"] = (
                "state_index",
                f"relative_error.{method.value}",
            )
    return files


def write_records_csv(summary: RunSummary, path: Path) -> None:
    """records.csv: one row per state, per-method delta_s and relative errors."""
    perm = [m for m in summary.methods if m.is_permutation and Method.ADAM in summary.methods]
    header = ["state_index", "seed", "s_c", "rank_c"]
    header += [f"delta_s_{m.value}" for m in summary.methods]
    header += [f"relative_error_{m.value}" for m in perm]
    header += ["relative_error", "relative_error_flagged", "errors"]
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for r in summary.records:
            row = [_cell(r.state_index), _cell(r.seed), _cell(r.s_c), _cell(r.rank_c)]
            row += [_cell(r.delta_s.get(m)) for m in summary.methods]
            row += [_cell(r.relative_errors.get(m)) for m in perm]
            row += [
                _cell(r.relative_error),
                str(r.relative_error_flagged).lower(),
                "; ".join(f"{m.value}: {msg}" for m, msg in r.errors.items()),
            ]
            writer.writerow(row)


def write_timings_csv(
    records: Iterable[ComparisonRecord], methods: list[Method], path: Path
) -> None:
    """timings.csv: wall seconds per state and method."""
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["state_index", *(m.value for m in methods)])
        for r in records:
            writer.writerow([r.state_index, *(_cell(r.wall_times.get(m)) for m in methods)])


def write_summary_json(summary: RunSummary, path: Path) -> None:
    path.write_text(summary.model_dump_json(indent=2) + "\n", encoding="utf-8")


def load_summary(path: Path) -> RunSummary:
    """Read a summary.json written by :func:`write_summary_json`.

    Raises:
        SummaryInvalidError: If the file is not a valid run summary
    """
    try:
        return RunSummary.model_validate_json(path.read_text(encoding="utf-8"))
    except (ValidationError, UnicodeDecodeError) as e:
        raise SummaryInvalidError(f"{path} is not a valid run summary: {e}") from e


def emit_standard_dat(summary: RunSummary, out_dir: Path) -> list[Path]:
    """Write every standard plot file of a run into ``out_dir``."""
    written = []
    for name, (x_field, y_field) in standard_dat_files(summary).items():
        path = out_dir / name
        count = emit_dat(summary.records, x_field, y_field, path)
        logger.debug("Wrote %d lines to %s", count, path)
        written.append(path)
    return written


def write_run(summary: RunSummary, out_dir: Path) -> list[Path]:
    """Write all outputs of a run.

    Returns:
        Paths written, in a stable order
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    records, summary_path, timings = (
        out_dir / RECORDS_FILE,
        out_dir / SUMMARY_FILE,
        out_dir / TIMINGS_FILE,
    )
    write_records_csv(summary, records)
    write_summary_json(summary, summary_path)
    write_timings_csv(summary.records, summary.methods, timings)
    logger.info("Wrote run outputs to %s", out_dir)
    return [records, summary_path, timings, *emit_standard_dat(summary, out_dir)]
