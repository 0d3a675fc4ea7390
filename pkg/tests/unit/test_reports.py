"""Unit tests for run persistence."""

from pathlib import Path

import pytest
from qredist_sdk.exceptions import SummaryInvalidError
from qredist_sdk.models import ComparisonRecord, Method, RunSummary
from qredist_sdk.reports import (
    RECORDS_FILE,
    SUMMARY_FILE,
    TIMINGS_FILE,
    emit_dat,
    load_summary,
    record_field,
    standard_dat_files,
    write_run,
)


def _record(index: int, perm: float, adam: float | None, rel: float | None) -> ComparisonRecord:
    delta_s = {Method.RGNP: perm, Method.ADAM: adam}
    return ComparisonRecord(
        state_index=index,
        seed=index,
        s_c=1.5,
        rank_c=4,
        delta_s=delta_s,
        relative_errors={Method.RGNP: rel},
        relative_error=rel,
        relative_error_flagged=rel is None,
        errors={} if adam is not None else {Method.ADAM: "failed"},
        wall_times={Method.RGNP: 0.01, Method.ADAM: 0.5},
    )


@pytest.fixture
def summary() -> RunSummary:
    """Summary of a two-state rgnp/adam run."""
    return RunSummary(
        version="0.1.0",
        dims=(2, 2, 4),
        n_states=2,
        seed=0,
        methods=[Method.RGNP, Method.ADAM],
        ensemble="test ensemble",
        records=[_record(0, 0.1187, 0.1187, 1.2345e-7), _record(1, 0.25, None, None)],
    )


class TestEmitDat:
    """Test suite for two-column plot files."""

    def test_pairs(self, tmp_path: Path, summary: RunSummary) -> None:
        """Test delta_s pairs use six decimals and skip missing values."""
        path = tmp_path / "pairs.dat"

        count = emit_dat(summary.records, "delta_s.rgnp", "delta_s.adam", path)
        assert count == 1
        assert path.read_text() == "0.118700 0.118700\n"

    def test_relative_error_series(self, tmp_path: Path, summary: RunSummary) -> None:
        """Test index vs relative error uses integers and exponent form."""
        path = tmp_path / "rel.dat"

        emit_dat(summary.records, "state_index", "relative_error.rgnp", path)
        assert path.read_text() == "0 1.234500e-07\n"

    def test_empty(self, tmp_path: Path) -> None:
        """Test an empty record set writes an empty file."""
        path = tmp_path / "nested" / "empty.dat"

        assert emit_dat([], "delta_s.rgnp", "delta_s.adam", path) == 0
        assert path.read_text() == ""

    def test_unknown_field(self, tmp_path: Path, summary: RunSummary) -> None:
        """Test unknown field names raise KeyError."""
        with pytest.raises(KeyError):
            emit_dat(summary.records, "delta_s.simplex", "s_c", tmp_path / "x.dat")
        with pytest.raises(KeyError):
            record_field(summary.records[0], "wall_times")


class TestRunFiles:
    """Test suite for run output files."""

    def test_standard_files(self, summary: RunSummary) -> None:
        """Test rgnp/adam runs produce the pair and relative-error plots."""
        assert standard_dat_files(summary) == {
            "rgnp_vs_adam.dat": ("delta_s.rgnp", "delta_s.adam"),
            "rgnp_relative_error.dat": ("state_index", "relative_error.rgnp"),
        }

    def test_write_run(self, tmp_path: Path, summary: RunSummary) -> None:
        """Test all outputs are written and timings stay out of records and summary."""
        written = write_run(summary, tmp_path)

        names = [p.name for p in written]
        assert names[:3] == [RECORDS_FILE, SUMMARY_FILE, TIMINGS_FILE]
        header = (tmp_path / RECORDS_FILE).read_text().splitlines()[0]
        assert header == (
            "state_index,seed,s_c,rank_c,delta_s_rgnp,delta_s_adam,relative_error_rgnp,"
            "relative_error,relative_error_flagged,errors"
        )
        assert "wall_times" not in (tmp_path / SUMMARY_FILE).read_text()
        assert (tmp_path / TIMINGS_FILE).read_text().splitlines()[1] == "0,0.01,0.5"

    def test_summary_reload(self, tmp_path: Path, summary: RunSummary) -> None:
        """Test a stored summary loads back with the same records."""
        write_run(summary, tmp_path)

        loaded = load_summary(tmp_path / SUMMARY_FILE)
        assert loaded.methods == summary.methods
        assert [r.delta_s for r in loaded.records] == [r.delta_s for r in summary.records]

    @pytest.mark.parametrize("content", ["{not json", '{"version": "0.1.0"}', "[]"])
    def test_invalid_summary(self, tmp_path: Path, content: str) -> None:
        """Test malformed or incomplete summaries raise SummaryInvalidError."""
        path = tmp_path / SUMMARY_FILE
        path.write_text(content)

        with pytest.raises(SummaryInvalidError, match="not a valid run summary"):
            load_summary(path)


    def test_byte_identical(self, tmp_path: Path, summary: RunSummary) -> None:
        """Test writing the same summary twice gives identical bytes."""
        first, second = tmp_path / "a", tmp_path / "b"
        write_run(summary, first)
        write_run(summary, second)

        for name in [RECORDS_FILE, SUMMARY_FILE, "rgnp_vs_adam.dat", "rgnp_relative_error.dat"]:
            assert (first / name).read_bytes() == (second / name).read_bytes()
