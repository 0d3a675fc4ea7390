"""Named verification suites run by ``qredist verify``.

Each suite checks reference values (bundled JSON fixtures) or invariants on
seeded random inputs and reports a :class:`~qredist_sdk.models.SuiteResult`.
A suite never raises; failures, including unreadable fixtures, are part of
the result. Sample counts of the randomized suites come from
:class:`~qredist_sdk.config.SuiteScale`.
"""

import difflib
import itertools
import json
import logging
from collections.abc import Callable, Iterable
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from qredist_sdk.config import SuiteScale
from qredist_sdk.exceptions import ConfigInvalidError, RankTooLargeError
from qredist_sdk.gdopt import (
    QutritForm,
    second_derivative_closed_form_d2,
    second_derivative_closed_form_d3,
    verify_local_max,
)
from qredist_sdk.generators import GeneratorBasis
from qredist_sdk.models import (
    LatticeAssignment,
    PartitionInput,
    PartitionObjective,
    Spectrum,
    Subsystem,
    SuiteResult,
)
from qredist_sdk.npp import exhaustive_multiway, gnp, rgnp
from qredist_sdk.permopt import (
    apply_assignment,
    closed_form_d2,
    disentangle,
    exhaustive_search,
    rgnp_refined,
    rgnp_two_step,
)
from qredist_sdk.qlinalg import partial_trace, random_unitaries
from qredist_sdk.states import (
    density_from_pure,
    ghz_state,
    max_delta_s_over_unitaries,
    mutual_info_report,
    random_pure_state,
    reduced_ab,
    reduced_states,
    theorem1_optimal_unitary,
)

logger = logging.getLogger(__name__)


class FixtureSource:
    """Loads reference fixtures from the package or an override directory."""

    def __init__(self, directory: Path | None = None) -> None:
        self.directory = directory

    def load(self, name: str) -> dict[str, Any]:
        if self.directory is not None:
            text = (self.directory / name).read_text(encoding="utf-8")
        else:
            text = resources.files("qredist_sdk").joinpath("fixtures", name).read_text("utf-8")
        data: dict[str, Any] = json.loads(text)
        return data


class _Checks:
    def __init__(self, name: str) -> None:
        self.name = name
        self.total = 0
        self.failures: list[str] = []
        self.diff_lines: list[str] = []

    def check(self, label: str, condition: bool, detail: str = "") -> None:
        self.total += 1
        if not condition:
            self.failures.append(f"{label}: {detail}" if detail else label)

    def compare_lines(self, label: str, expected: list[str], got: list[str]) -> None:
        self.check(label, expected == got, "output differs from fixture")
        if expected != got:
            self.diff_lines += difflib.unified_diff(
                expected, got, fromfile="expected", tofile="actual", lineterm=""
            )

    def result(self) -> SuiteResult:
        if self.failures:
            detail = f"{len(self.failures)}/{self.total} checks failed: " + "; ".join(
                self.failures[:5]
            )
        else:
            detail = f"{self.total} checks passed"
        return SuiteResult(
            name=self.name,
            passed=not self.failures,
            detail=detail,
            diff="\n".join(self.diff_lines),
        )


def _random_spectrum(rng: np.random.Generator, d_a: int, d_b: int) -> Spectrum:
    return Spectrum.from_probs(rng.dirichlet(np.ones(d_a * d_b)), d_a, d_b)


def _fmt_set(values: Iterable[float]) -> str:
    return " ".join(f"{x:.6f}" for x in values)


def suite_rgnp_trace(fixtures: FixtureSource, _scale: SuiteScale) -> SuiteResult:
    """rgnp on the bundled d=6 spectrum reproduces the reference rows."""
    checks = _Checks("rgnp_trace")
    data = fixtures.load("rgnp_d6.json")
    partition = rgnp(PartitionInput(numbers=data["numbers"], k=data["k_a"], per_set=data["k_b"]))
    checks.compare_lines(
        "rows",
        [_fmt_set(s) for s in data["expected_sets"]],
        [_fmt_set(s) for s in partition.sets],
    )
    checks.check("balanced", all(len(s) == data["k_b"] for s in partition.sets))
    return checks.result()


def suite_layout_d2(fixtures: FixtureSource, scale: SuiteScale) -> SuiteResult:
    """The closed-form two-qubit layout matches the reference and the coset scan."""
    checks = _Checks("layout_d2")
    data = fixtures.load("layout_d2.json")
    spectrum = Spectrum.from_probs(data["probs"], 2, 2)
    result = closed_form_d2(spectrum)
    rows = result.assignment.occupation(spectrum.probs)
    checks.compare_lines(
        "rows",
        [_fmt_set(r) for r in data["expected_rows"]],
        [_fmt_set(r) for r in rows.tolist()],
    )
    checks.compare_lines(
        "columns",
        [_fmt_set(c) for c in data["expected_cols"]],
        [_fmt_set(c) for c in rows.T.tolist()],
    )
    checks.check("s_a", abs(result.s_a - data["s_a"]) <= 1e-9, f"{result.s_a!r}")
    checks.check("s_b", abs(result.s_b - data["s_b"]) <= 1e-9, f"{result.s_b!r}")
    checks.check("delta_s", abs(result.delta_s - data["delta_s"]) <= 1e-9, f"{result.delta_s!r}")

    rng = np.random.default_rng(2)
    for trial in range(scale.layout_spectra):
        s = _random_spectrum(rng, 2, 2)
        closed, best = closed_form_d2(s).delta_s, exhaustive_search(s).delta_s
        checks.check(f"coset scan #{trial}", abs(closed - best) <= 1e-12, f"{closed} vs {best}")
        greedy = rgnp_two_step(s).delta_s
        checks.check(f"rgnp #{trial}", abs(closed - greedy) <= 1e-12, f"{closed} vs {greedy}")
    return checks.result()


def suite_ghz(fixtures: FixtureSource, _scale: SuiteScale) -> SuiteResult:
    """Entropies of the GHZ state match the reference values."""
    checks = _Checks("ghz")
    expected = fixtures.load("ghz.json")["expected"]
    report = mutual_info_report(ghz_state()).model_dump()
    keys = sorted(expected)
    checks.compare_lines(
        "report",
        [f"{k}: {float(expected[k]):.9f}" for k in keys],
        [f"{k}: {float(report[k]):.9f}" for k in keys],
    )
    return checks.result()


def suite_rank_limited_unitary(_fixtures: FixtureSource, scale: SuiteScale) -> SuiteResult:
    """delta_s reaches S_C exactly when rank(rho_C) <= d_A and never otherwise."""
    checks = _Checks("rank_limited_unitary")
    for dims in [(2, 2, 2), (4, 4, 3), (3, 5, 2)]:
        for seed in range(scale.rank_limited_states):
            psi = random_pure_state(dims, seed, rank_c=min(dims[0], dims[2]))
            _, report = theorem1_optimal_unitary(psi)
            checks.check(
                f"{dims} seed {seed} delta_s",
                abs(report.delta_s - report.s_c) <= 1e-8,
                f"{report.delta_s} vs {report.s_c}",
            )
            checks.check(f"{dims} seed {seed} I(B:C)", report.i_bc <= 1e-8, f"{report.i_bc}")

    for seed in range(scale.unreachable_states):
        psi = random_pure_state((2, 2, 4), seed)
        try:
            theorem1_optimal_unitary(psi)
            checks.check(f"rank 4 seed {seed} rejected", False, "no error raised")
        except RankTooLargeError:
            checks.check(f"rank 4 seed {seed} rejected", True)
        s_c = mutual_info_report(psi).s_c
        _, spectrum = disentangle(reduced_ab(psi), 2, 2)
        layouts = {
            "exhaustive": exhaustive_search(spectrum).delta_s,
            "rgnp": rgnp_refined(spectrum).delta_s,
        }
        for method, value in layouts.items():
            checks.check(
                f"rank 4 seed {seed} {method}", value <= s_c - 1e-6, f"{value} vs {s_c}"
            )
        unitaries = random_unitaries(4, scale.unreachable_unitaries, seed)
        best = max_delta_s_over_unitaries(psi, unitaries)
        checks.check(f"rank 4 seed {seed} ceiling", best <= s_c - 1e-6, f"{best} vs {s_c}")
    return checks.result()


def suite_coset_invariance(_fixtures: FixtureSource, scale: SuiteScale) -> SuiteResult:
    """Relabeling rows and columns of a layout leaves delta_s unchanged."""
    checks = _Checks("coset_invariance")
    rng = np.random.default_rng(3)
    for trial in range(scale.coset_trials):
        spectrum = _random_spectrum(rng, 3, 3)
        order = rng.permutation(9).reshape(3, 3)
        r, t = rng.permutation(3), rng.permutation(3)
        base = LatticeAssignment.from_cell_order(order.ravel(), 3, 3)
        moved = LatticeAssignment.from_cell_order(order[r][:, t].ravel(), 3, 3)
        a, b = apply_assignment(spectrum, base).delta_s, apply_assignment(spectrum, moved).delta_s
        checks.check(f"trial {trial}", abs(a - b) <= 1e-12, f"{a} vs {b}")
    return checks.result()


def suite_curvature_d2(_fixtures: FixtureSource, scale: SuiteScale) -> SuiteResult:
    """The optimal two-qubit layout is a local maximum with the closed-form curvatures."""
    checks = _Checks("curvature_d2")
    rng = np.random.default_rng(4)
    basis = GeneratorBasis.pauli()
    for trial in range(scale.curvature_d2_spectra):
        spectrum = _random_spectrum(rng, 2, 2)
        result = closed_form_d2(spectrum)
        report = verify_local_max(np.diag(spectrum.probs), 2, 2, basis, result.unitary)
        checks.check(f"#{trial} local max", report.is_local_max, f"{report.hessian_max_eigenvalue}")
        checks.check(f"#{trial} gradient", report.grad_norm <= 1e-4, f"{report.grad_norm}")
        checks.check(f"#{trial} diagonal", max(report.hessian_diag) <= 1e-6)
        for label in [(1, 1), (1, 3), (3, 1), (3, 3), (0, 2)]:
            closed = second_derivative_closed_form_d2(spectrum.probs, label)
            numeric = report.hessian_diag[basis.index_of(label)]
            checks.check(
                f"#{trial} {label}", abs(closed - numeric) <= 1e-3, f"{closed} vs {numeric}"
            )
    return checks.result()


def suite_curvature_d3(_fixtures: FixtureSource, scale: SuiteScale) -> SuiteResult:
    """Exhaustive two-qutrit optima are local maxima with the closed-form curvatures."""
    checks = _Checks("curvature_d3")
    rng = np.random.default_rng(5)
    basis = GeneratorBasis(3)
    for trial in range(scale.curvature_d3_spectra):
        spectrum = _random_spectrum(rng, 3, 3)
        result = exhaustive_search(spectrum)
        report = verify_local_max(np.diag(spectrum.probs), 3, 3, basis, result.unitary)
        checks.check(f"#{trial} local max", report.is_local_max, f"{report.hessian_max_eigenvalue}")
        for form in QutritForm:
            closed = second_derivative_closed_form_d3(spectrum.probs, form, result.assignment)
            numeric = report.hessian_diag[basis.index_of(form.label)]
            checks.check(
                f"#{trial} {form.value}", abs(closed - numeric) <= 1e-3, f"{closed} vs {numeric}"
            )
        form3 = second_derivative_closed_form_d3(
            spectrum.probs, QutritForm.FORM3, result.assignment
        )
        checks.check(f"#{trial} form3 sign", form3 <= 1e-12, f"{form3}")
    return checks.result()


def suite_npp_ratios(_fixtures: FixtureSource, scale: SuiteScale) -> SuiteResult:
    """Greedy partitioning respects its worst-case ratios against brute force."""
    checks = _Checks("npp_ratios")
    rng = np.random.default_rng(6)
    for trial in range(scale.npp_instances):
        n, k = int(rng.integers(4, 10)), int(rng.integers(2, 5))
        numbers = rng.random(n).tolist()
        greedy = gnp(PartitionInput(numbers=numbers, k=k))
        best_max = exhaustive_multiway(numbers, k, PartitionObjective.MIN_MAX_SUM).max_sum
        best_min = exhaustive_multiway(numbers, k, PartitionObjective.MAX_MIN_SUM).min_sum
        checks.check(
            f"#{trial} largest sum",
            greedy.max_sum <= (4 * k - 1) / (3 * k) * best_max + 1e-12,
            f"{greedy.max_sum} vs {best_max}",
        )
        checks.check(
            f"#{trial} smallest sum",
            greedy.min_sum >= (3 * k - 1) / (4 * k - 2) * best_min - 1e-12,
            f"{greedy.min_sum} vs {best_min}",
        )
    return checks.result()


def suite_partial_trace(_fixtures: FixtureSource, _scale: SuiteScale) -> SuiteResult:
    """Partial traces agree with explicit index sums."""
    checks = _Checks("partial_trace")
    rng = np.random.default_rng(7)
    for d1, d2 in [(2, 2), (2, 3), (3, 2)]:
        x = rng.standard_normal((d1 * d2, d1 * d2)) + 1j * rng.standard_normal((d1 * d2, d1 * d2))
        rho = x @ x.conj().T
        rho /= np.trace(rho)
        first = np.zeros((d1, d1), dtype=complex)
        second = np.zeros((d2, d2), dtype=complex)
        for i, k, j in itertools.product(range(d1), range(d1), range(d2)):
            first[i, k] += rho[i * d2 + j, k * d2 + j]
        for j, ll, i in itertools.product(range(d2), range(d2), range(d1)):
            second[j, ll] += rho[i * d2 + j, i * d2 + ll]
        got_first = partial_trace(rho, (d1, d2), Subsystem.FIRST)
        got_second = partial_trace(rho, (d1, d2), Subsystem.SECOND)
        checks.check(f"{d1}x{d2} first", np.allclose(got_first, first, rtol=0, atol=1e-12))
        checks.check(f"{d1}x{d2} second", np.allclose(got_second, second, rtol=0, atol=1e-12))

    psi = random_pure_state((2, 3, 2), 7)
    full = density_from_pure(psi).mat
    rho_a, rho_b, rho_c, _ = reduced_states(psi)
    rho_bc = partial_trace(full, (2, 6), Subsystem.SECOND)
    rho_ab = partial_trace(full, (6, 2), Subsystem.FIRST)
    checks.check("rho_A", np.allclose(partial_trace(full, (2, 6), Subsystem.FIRST), rho_a.mat))
    checks.check("rho_B", np.allclose(partial_trace(rho_ab, (2, 3), Subsystem.SECOND), rho_b.mat))
    checks.check("rho_C", np.allclose(partial_trace(rho_bc, (3, 2), Subsystem.SECOND), rho_c.mat))
    return checks.result()


def suite_entropy_identities(_fixtures: FixtureSource, scale: SuiteScale) -> SuiteResult:
    """I(A:C) + I(B:C) = 2 S_C and the entropy-difference ceiling hold on random states."""
    checks = _Checks("entropy_identities")
    for seed in range(scale.identity_states):
        report = mutual_info_report(random_pure_state((2, 3, 4), seed))
        checks.check(
            f"seed {seed} sum", abs(report.i_ac + report.i_bc - 2 * report.s_c) <= 1e-9
        )
        checks.check(f"seed {seed} purity", abs(report.s_ab - report.s_c) <= 1e-9)
        checks.check(f"seed {seed} ceiling", abs(report.delta_s) <= report.s_ab + 1e-9)
    return checks.result()


SUITES: dict[str, Callable[[FixtureSource, SuiteScale], SuiteResult]] = {
    "rgnp_trace": suite_rgnp_trace,
    "layout_d2": suite_layout_d2,
    "ghz": suite_ghz,
    "rank_limited_unitary": suite_rank_limited_unitary,
    "coset_invariance": suite_coset_invariance,
    "curvature_d2": suite_curvature_d2,
    "curvature_d3": suite_curvature_d3,
    "npp_ratios": suite_npp_ratios,
    "partial_trace": suite_partial_trace,
    "entropy_identities": suite_entropy_identities,
}

# Alternative names accepted on the command line
SUITE_ALIASES = {"appendix_c": "rgnp_trace"}


def resolve_suite(name: str) -> str:
    """Registered suite name for ``name`` or one of its aliases.

    Raises:
        ConfigInvalidError: If the name is unknown
    """
    resolved = SUITE_ALIASES.get(name, name)
    if resolved not in SUITES:
        raise ConfigInvalidError(f"Unknown suite: {name}; choose from {', '.join(SUITES)}")
    return resolved


def run_suites(
    names: Iterable[str] | None = None,
    fixtures_dir: Path | None = None,
    scale: SuiteScale | None = None,
) -> list[SuiteResult]:
    """Run the named suites (all when ``names`` is empty or None).

    Args:
        names: Suite names or aliases
        fixtures_dir: Directory with replacement fixture files
        scale: Sample counts of the randomized suites, defaults to ``SuiteScale()``

    Raises:
        ConfigInvalidError: If a suite name is unknown
    """
    selected = [resolve_suite(n) for n in names or SUITES]
    scale = scale or SuiteScale()
    fixtures = FixtureSource(fixtures_dir)
    results = []
    for name in selected:
        logger.info("Running suite %s", name)
        try:
            results.append(SUITES[name](fixtures, scale))
        except Exception as e:  # noqa: BLE001
            logger.warning("Suite %s errored: %s", name, e)
            results.append(SuiteResult(name=name, passed=False, detail=f"{type(e).__name__}: {e}"))
    return results

