"""Integration tests for the qredist command line."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner
from pytest_mock import MockerFixture
from qredist_cli.main import cli
from qredist_sdk import SuiteScale
from qredist_sdk.models import SuiteResult

pytestmark = pytest.mark.integration


@pytest.fixture
def runner() -> CliRunner:
    """Click test runner."""
    return CliRunner()


class TestRunCommand:
    """Integration tests for `qredist run`."""

    def test_run_writes_outputs(self, runner: CliRunner, tmp_path: Path) -> None:
        """Test a small run writes records, summary, timings and plot files."""
        out = tmp_path / "run"
        result = runner.invoke(
            cli,
            [
                "run",
                "--d", "2",
                "--n", "2",
                "--methods", "closed_form_d2,adam",
                "--adam-max-iters", "100",
                "--adam-restarts", "1",
                "--out-dir", str(out),
            ],
        )  # fmt: skip

        assert result.exit_code == 0, result.output
        for name in [
            "records.csv",
            "summary.json",
            "timings.csv",
            "closed_form_d2_vs_adam.dat",
            "closed_form_d2_relative_error.dat",
        ]:
            assert (out / name).is_file()
        assert len((out / "closed_form_d2_vs_adam.dat").read_text().splitlines()) == 2

    def test_config_file_and_flags(self, runner: CliRunner, tmp_path: Path) -> None:
        """Test flags override the config file."""
        conf = tmp_path / "run.conf"
        conf.write_text(f"d = 3\nn_states = 5\nmethods = rgnp\nout_dir = {tmp_path / 'a'}\n")

        result = runner.invoke(cli, ["run", "--config", str(conf), "--n", "1"])
        assert result.exit_code == 0, result.output
        records = (tmp_path / "a" / "records.csv").read_text().splitlines()
        assert len(records) == 2

    def test_literal_rgnp_flag(self, runner: CliRunner, tmp_path: Path) -> None:
        """Test --no-rgnp-refine and --adam-stop-rule reach the stored summary."""
        out = tmp_path / "run"
        result = runner.invoke(
            cli,
            [
                "run",
                "--d", "3",
                "--n", "1",
                "--methods", "rgnp",
                "--no-rgnp-refine",
                "--adam-stop-rule", "threshold",
                "--out-dir", str(out),
            ],
        )  # fmt: skip

        assert result.exit_code == 0, result.output
        summary = json.loads((out / "summary.json").read_text())
        assert summary["rgnp_refine"] is False

    @pytest.mark.parametrize(

        "args",
        [
            ["run", "--d", "4", "--methods", "exhaustive"],
            ["run", "--d", "3", "--methods", "closed_form_d2"],
            ["run", "--n", "0"],
            ["run", "--config", "does-not-exist.conf"],
        ],
    )
    def test_config_errors_exit_1(self, runner: CliRunner, args: list[str]) -> None:
        """Test invalid configurations exit with status 1."""
        result = runner.invoke(cli, args)

        assert result.exit_code == 1


class TestVerifyCommand:
    """Integration tests for `qredist verify`."""

    def test_single_suite(self, runner: CliRunner) -> None:
        """Test --suite runs only the named suite."""
        result = runner.invoke(cli, ["verify", "--suite", "rgnp_trace"])

        assert result.exit_code == 0, result.output
        assert "rgnp_trace" in result.output
        assert "ghz" not in result.output

    def test_failures_exit_2(self, runner: CliRunner, mocker: MockerFixture) -> None:
        """Test a failing suite prints its diff and exits with status 2."""
        mocker.patch(
            "qredist_cli.main.run_suites",
            return_value=[
                SuiteResult(name="ghz", passed=True, detail="9 checks passed"),
                SuiteResult(
                    name="layout_d2", passed=False, detail="1/4 checks failed", diff="-a\n+b"
                ),
            ],
        )

        result = runner.invoke(cli, ["verify"])
        assert result.exit_code == 2
        assert "FAIL" in result.output
        assert "+b" in result.output

    def test_alias(self, runner: CliRunner) -> None:
        """Test the appendix_c alias runs the rgnp trace suite."""
        result = runner.invoke(cli, ["verify", "--suite", "appendix_c"])

        assert result.exit_code == 0, result.output
        assert "rgnp_trace" in result.output

    @pytest.mark.parametrize("quick", [False, True])
    def test_quick_scale(self, runner: CliRunner, mocker: MockerFixture, quick: bool) -> None:
        """Test --quick passes the reduced sample counts to the suites."""
        run = mocker.patch(
            "qredist_cli.main.run_suites",
            return_value=[SuiteResult(name="ghz", passed=True, detail="9 checks passed")],
        )

        result = runner.invoke(cli, ["verify", "--quick"] if quick else ["verify"])
        assert result.exit_code == 0, result.output
        assert run.call_args.args[2] == (SuiteScale.quick() if quick else SuiteScale())

    def test_unknown_suite_exit_1(self, runner: CliRunner) -> None:
        """Test an unknown suite name is a configuration error."""
        result = runner.invoke(cli, ["verify", "--suite", "appendix_z"])

        assert result.exit_code == 1


class TestEmitCommand:
    """Integration tests for `qredist emit`."""

    @pytest.fixture
    def run_dir(self, runner: CliRunner, tmp_path: Path) -> Path:
        """Directory of a finished rgnp/adam run."""
        out = tmp_path / "run"
        result = runner.invoke(
            cli,
            [
                "run",
                "--d", "2",
                "--n", "3",
                "--methods", "rgnp,adam",
                "--adam-max-iters", "50",
                "--adam-restarts", "1",
                "--out-dir", str(out),
            ],
        )  # fmt: skip
        assert result.exit_code == 0, result.output
        return out

    def test_reemit_standard_files(self, runner: CliRunner, run_dir: Path, tmp_path: Path) -> None:
        """Test re-emitting reproduces the plot files of the run byte for byte."""
        target = tmp_path / "again"
        target.mkdir()

        result = runner.invoke(cli, ["emit", str(run_dir / "summary.json"), "--out", str(target)])
        assert result.exit_code == 0, result.output
        for name in ["rgnp_vs_adam.dat", "rgnp_relative_error.dat"]:
            assert (target / name).read_bytes() == (run_dir / name).read_bytes()

    def test_custom_columns(self, runner: CliRunner, run_dir: Path, tmp_path: Path) -> None:
        """Test --x/--y select the columns."""
        path = tmp_path / "sc.dat"

        result = runner.invoke(
            cli, ["emit", str(run_dir), "--x", "s_c", "--y", "delta_s.rgnp", "--out", str(path)]
        )
        assert result.exit_code == 0, result.output
        assert len(path.read_text().splitlines()) == 3

    def test_unknown_field_exit_1(self, runner: CliRunner, run_dir: Path) -> None:
        """Test an unknown field is a configuration error."""
        result = runner.invoke(cli, ["emit", str(run_dir), "--x", "nope", "--y", "s_c"])

        assert result.exit_code == 1


    @pytest.mark.parametrize("content", ["{not json", '{"version": "0.1.0"}'])
    def test_corrupt_summary_exit_1(self, runner: CliRunner, tmp_path: Path, content: str) -> None:
        """Test a summary that fails validation is a configuration error, not a crash."""
        path = tmp_path / "summary.json"
        path.write_text(content)

        result = runner.invoke(cli, ["emit", str(path), "--x", "s_c", "--y", "s_c"])
        assert result.exit_code == 1
        assert isinstance(result.exception, SystemExit)


class TestOtherCommands:

    """Integration tests for `qredist inspect` and `qredist config`."""

    def test_inspect(self, runner: CliRunner) -> None:
        """Test inspect lists every applicable method."""
        result = runner.invoke(
            cli, ["inspect", "--d", "2", "--seed", "3", "--adam-max-iters", "50"]
        )

        assert result.exit_code == 0, result.output
        for method in ["theorem1", "exhaustive", "closed_form_d2", "rgnp", "adam"]:
            assert method in result.output
        assert "Exhaustive rows optimal" in result.output

    def test_config(self, runner: CliRunner) -> None:
        """Test config shows tolerances and run settings."""
        result = runner.invoke(cli, ["config"])

        assert result.exit_code == 0, result.output
        assert "hermitian_tol" in result.output
        assert "n_states" in result.output

    def test_version(self, runner: CliRunner) -> None:
        """Test --version prints the package version."""
        result = runner.invoke(cli, ["--version"])

        assert "qredist, version 0.1.0" in result.output
