"""Unit tests for gradient ascent and curvature checks."""

import math

import numpy as np
import pytest
from qredist_sdk.config import AdamConfig
from qredist_sdk.exceptions import InvalidSpectrumError, LengthMismatchError
from qredist_sdk.gdopt import (
    QutritForm,
    adam_maximize,
    analytic_gradient,
    build_unitary,
    delta_s_objective,
    numeric_gradient,
    second_derivative_closed_form_d2,
    second_derivative_closed_form_d3,
    value_and_gradient,
    verify_local_max,
)
from qredist_sdk.generators import GeneratorBasis
from qredist_sdk.models import Spectrum
from qredist_sdk.permopt import (
    apply_assignment,
    closed_form_d2,
    coset_representatives_d2,
    exhaustive_search,
    gf2_assignment,
)
from qredist_sdk.qlinalg import is_unitary
from qredist_sdk.states import mutual_info_report, random_pure_state, reduced_ab


def _spectrum(rng: np.random.Generator, d_a: int, d_b: int) -> Spectrum:
    return Spectrum.from_probs(rng.dirichlet(np.ones(d_a * d_b)), d_a, d_b)


class TestObjective:
    """Test suite for the entropy-difference objective and its gradient."""

    def test_identity_matches_report(self) -> None:
        """Test delta_s at the identity equals S_A - S_B of the state."""
        psi = random_pure_state((2, 3, 4), 8)

        value = delta_s_objective(reduced_ab(psi), 2, 3, np.eye(6))
        assert value == pytest.approx(mutual_info_report(psi).delta_s, abs=1e-10)

    def test_build_unitary(self, rng: np.random.Generator) -> None:
        """Test exp(i sum h_a G_a) is unitary and equals I at h = 0."""
        basis = GeneratorBasis(2, 3)

        assert is_unitary(build_unitary(basis, rng.standard_normal(len(basis))))
        np.testing.assert_allclose(build_unitary(basis, np.zeros(len(basis))), np.eye(6))

    @pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3)])
    def test_analytic_matches_numeric(
        self, dims: tuple[int, int], rng: np.random.Generator
    ) -> None:
        """Test the exact gradient agrees with central differences."""
        d_a, d_b = dims
        rho = reduced_ab(random_pure_state((d_a, d_b, d_a * d_b), 3))
        basis = GeneratorBasis(d_a, d_b)
        h = rng.normal(0.0, 0.3, len(basis))

        value, exact = value_and_gradient(rho, d_a, d_b, basis, h)
        approx = numeric_gradient(rho, d_a, d_b, basis, h, step=1e-5)
        assert value == pytest.approx(
            delta_s_objective(rho, d_a, d_b, build_unitary(basis, h)), abs=1e-12
        )
        np.testing.assert_allclose(exact, approx, atol=1e-6)

    def test_gradient_at_degenerate_generator(self) -> None:
        """Test the gradient is finite at h = 0 where all eigenvalues coincide."""
        rho = reduced_ab(random_pure_state((2, 2, 4), 6))
        basis = GeneratorBasis.pauli()

        exact = analytic_gradient(rho, 2, 2, basis, np.zeros(15))
        approx = numeric_gradient(rho, 2, 2, basis, np.zeros(15))
        np.testing.assert_allclose(exact, approx, atol=1e-6)

    def test_wrong_parameter_count(self) -> None:
        """Test a mismatched parameter vector raises LengthMismatchError."""
        with pytest.raises(LengthMismatchError):
            build_unitary(GeneratorBasis.pauli(), np.zeros(3))

    def test_invalid_step(self) -> None:
        """Test a non-positive finite-difference step is rejected."""
        with pytest.raises(ValueError):
            numeric_gradient(np.eye(4) / 4, 2, 2, GeneratorBasis.pauli(), np.zeros(15), step=0)


class TestAdam:
    """Test suite for the Adam maximizer."""

    def test_deterministic(self) -> None:
        """Test identical seeds give identical runs."""
        rho = reduced_ab(random_pure_state((2, 2, 4), 2))
        config = AdamConfig(max_iters=200, restarts=2, seed=7)

        first = adam_maximize(rho, 2, 2, config)
        second = adam_maximize(rho, 2, 2, config)
        assert first.best_delta_s == second.best_delta_s
        np.testing.assert_array_equal(first.final_params.h, second.final_params.h)

    def test_run_fields(self) -> None:
        """Test the trajectory, best unitary and winning restart are consistent."""
        rho = reduced_ab(random_pure_state((2, 2, 4), 2))
        run = adam_maximize(rho, 2, 2, AdamConfig(max_iters=100, restarts=3, seed=4))

        assert run.trajectory[0][0] == 0
        assert max(v for _, v in run.trajectory) <= run.best_delta_s + 1e-12
        assert run.seed == 4 + run.restart
        assert run.best_delta_s == pytest.approx(
            delta_s_objective(rho, 2, 2, run.best_unitary), abs=1e-10
        )

    def test_converges_on_pure_state(self) -> None:
        """Test a pure rho_AB converges immediately with delta_s = 0."""
        rho = np.zeros((4, 4))
        rho[0, 0] = 1.0
        run = adam_maximize(rho, 2, 2, AdamConfig(max_iters=500, restarts=1, patience=5))

        assert run.converged
        assert run.best_delta_s == pytest.approx(0.0, abs=1e-9)

    @pytest.mark.parametrize(("stop_rule", "iterations"), [("patience", 6), ("threshold", 2)])
    def test_stop_rules(self, stop_rule: str, iterations: int) -> None:
        """Test a flat objective stops after `patience` flat steps or after the first one."""
        rho = np.zeros((4, 4))
        rho[0, 0] = 1.0
        config = AdamConfig(max_iters=500, restarts=1, patience=5, stop_rule=stop_rule)

        run = adam_maximize(rho, 2, 2, config)
        assert run.converged
        assert run.iterations == iterations

    def test_threshold_rule_on_mixed_state(self) -> None:
        """Test the single-threshold rule improves on the start with a consistent trajectory."""
        rho = reduced_ab(random_pure_state((2, 2, 4), 3))
        threshold = adam_maximize(
            rho, 2, 2, AdamConfig(max_iters=400, restarts=1, stop_rule="threshold")
        )

        assert threshold.best_delta_s >= delta_s_objective(rho, 2, 2, np.eye(4)) - 1e-12
        assert len(threshold.trajectory) == threshold.iterations

    @pytest.mark.slow
    def test_reaches_permutation_optimum_d2(self) -> None:
        """Test Adam agrees with the two-qubit closed form on random states."""
        for seed in range(5):
            psi = random_pure_state((2, 2, 4), seed)
            rho = reduced_ab(psi)
            perm = closed_form_d2(Spectrum.from_probs(np.linalg.eigvalsh(rho.mat), 2, 2))
            run = adam_maximize(rho, 2, 2, AdamConfig(max_iters=3000, restarts=3, seed=seed))

            assert abs(run.best_delta_s - perm.delta_s) <= 1e-3 * abs(run.best_delta_s)
            assert run.best_delta_s <= mutual_info_report(psi).s_c + 1e-9

    def test_numeric_gradient_option(self) -> None:
        """Test the numeric-gradient variant runs and improves on the start."""
        rho = reduced_ab(random_pure_state((2, 2, 4), 1))
        config = AdamConfig(max_iters=50, restarts=1, gradient="numeric")

        run = adam_maximize(rho, 2, 2, config)
        assert run.best_delta_s >= delta_s_objective(rho, 2, 2, np.eye(4)) - 1e-12


class TestLocalMaximum:
    """Test suite for stationarity and curvature checks."""

    def test_two_qubit_optimum(self, rng: np.random.Generator) -> None:
        """Test the closed-form layout is a local maximum with matching curvatures."""
        basis = GeneratorBasis.pauli()
        for _ in range(5):
            spectrum = _spectrum(rng, 2, 2)
            result = closed_form_d2(spectrum)
            report = verify_local_max(np.diag(spectrum.probs), 2, 2, basis, result.unitary)

            assert report.is_local_max
            assert report.grad_norm <= 1e-4
            assert max(report.hessian_diag) <= 1e-6
            for label in [(1, 1), (2, 1), (1, 3), (2, 3), (3, 1), (3, 3), (0, 2)]:
                assert report.hessian_diag[basis.index_of(label)] == pytest.approx(
                    second_derivative_closed_form_d2(spectrum.probs, label), abs=1e-3
                )

    def test_two_qubit_minimum_rejected(self, rng: np.random.Generator) -> None:
        """Test the worst coset layout is not reported as a local maximum."""
        spectrum = _spectrum(rng, 2, 2)
        worst = min(
            (apply_assignment(spectrum, gf2_assignment(m)) for m in coset_representatives_d2()),
            key=lambda r: r.delta_s,
        )

        report = verify_local_max(
            np.diag(spectrum.probs), 2, 2, GeneratorBasis.pauli(), worst.unitary
        )
        assert not report.is_local_max
        assert report.hessian_max_eigenvalue > 0

    @pytest.mark.slow
    def test_two_qutrit_optimum(self, rng: np.random.Generator) -> None:
        """Test the exhaustive qutrit optimum is a local maximum with the closed forms."""
        basis = GeneratorBasis(3)
        for _ in range(2):
            spectrum = _spectrum(rng, 3, 3)
            result = exhaustive_search(spectrum)
            report = verify_local_max(np.diag(spectrum.probs), 3, 3, basis, result.unitary)

            assert report.is_local_max
            for form in QutritForm:
                assert report.hessian_diag[basis.index_of(form.label)] == pytest.approx(
                    second_derivative_closed_form_d3(spectrum.probs, form, result.assignment),
                    abs=1e-3,
                )


class TestClosedForms:
    """Test suite for closed-form second derivatives."""

    def test_d2_zero_families(self) -> None:
        """Test labels with an identity factor and (3, 3) have zero curvature."""
        probs = [0.4, 0.3, 0.2, 0.1]

        for label in [(0, 1), (2, 0), (3, 3)]:
            assert second_derivative_closed_form_d2(probs, label) == 0.0

    def test_d2_degenerate_limit(self) -> None:
        """Test the log ratio uses its limit when 2 p2 + 2 p3 = 1."""
        value = second_derivative_closed_form_d2([0.4, 0.3, 0.2, 0.1], (1, 3))

        assert value == pytest.approx(8 * 0.1 * 0.1 * -2 / math.log(2), rel=1e-9)

    def test_d2_invalid_spectrum(self) -> None:
        """Test ascending or unnormalized spectra raise InvalidSpectrumError."""
        with pytest.raises(InvalidSpectrumError):
            second_derivative_closed_form_d2([0.1, 0.2, 0.3, 0.4], (1, 1))
        with pytest.raises(InvalidSpectrumError):
            second_derivative_closed_form_d2([0.5, 0.3, 0.2, 0.1], (1, 1))

    def test_d2_invalid_label(self) -> None:
        """Test Pauli labels outside 0..3 are rejected."""
        with pytest.raises(ValueError):
            second_derivative_closed_form_d2([0.4, 0.3, 0.2, 0.1], (4, 1))

    def test_d3_form_labels(self) -> None:
        """Test each qutrit form names its Gell-Mann product."""
        assert QutritForm.FORM1.label == (1, 2)
        assert QutritForm.FORM2.label == (1, 3)
        assert QutritForm.FORM3.label == (1, 8)

    def test_d3_uniform_occupations(self) -> None:
        """Test every form vanishes on a uniform lattice."""
        for form in QutritForm:
            assert second_derivative_closed_form_d3([1 / 9] * 9, form) == pytest.approx(0.0)
