"""Seeded comparison experiments across maximization methods."""

import logging
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from qredist_sdk.config import RunConfig, get_numeric_config
from qredist_sdk.exceptions import QRedistError
from qredist_sdk.gdopt import adam_maximize
from qredist_sdk.generators import GeneratorBasis
from qredist_sdk.models import (
    ComparisonRecord,
    DensityMatrix,
    Method,
    MethodStats,
    RunSummary,
    Spectrum,
    TripartitePureState,
)
from qredist_sdk.permopt import (
    closed_form_d2,
    disentangle,
    exhaustive_search,
    rgnp_refined,
    rgnp_two_step,
)
from qredist_sdk.states import (
    mutual_info_report,
    random_pure_state,
    reduced_ab,
    theorem1_optimal_unitary,
)

logger = logging.getLogger(__name__)

# Below this |delta_s_adam| the relative error is flagged instead of computed
RELATIVE_ERROR_FLOOR = 1e-12
HEADLINE_ORDER = (Method.CLOSED_FORM_D2, Method.EXHAUSTIVE, Method.RGNP)


def relative_error(adam: float, perm: float) -> float | None:
    """(adam - perm) / adam; positive when Adam beat the permutation method."""
    if abs(adam) <= RELATIVE_ERROR_FLOOR:
        return None
    return (adam - perm) / adam


class ExperimentRunner:
    """Runs every requested method on a seeded ensemble of random states.

    State ``i`` is drawn with seed ``config.seed + i`` and its Adam restarts use
    seeds ``config.seed + i + r``, so a run is reproducible from its config.

    Example:
        >>> runner = ExperimentRunner(load_run_config(n_states=10, methods="closed_form_d2,adam"))
        >>> summary = runner.run()
        >>> summary.relative_error[Method.CLOSED_FORM_D2].mean_abs
    """

    def __init__(self, config: RunConfig) -> None:
        """Initialize the runner.

        Args:
            config: Validated run configuration
        """
        self.config = config
        self._basis: GeneratorBasis | None = None

    @property
    def ensemble(self) -> str:
        """Human-readable description of the state ensemble."""
        d_a, d_b, d_c = self.config.dims
        last = self.config.seed + self.config.n_states - 1
        text = (
            f"Haar-random pure states on {d_a}x{d_b}x{d_c} (normalized i.i.d. complex "
            f"Gaussian amplitudes), seeds {self.config.seed}..{last}"
        )
        if self.config.rank_c is not None:
            text += f", C restricted to its first {self.config.rank_c} levels"
        return text

    @property
    def basis(self) -> GeneratorBasis:
        if self._basis is None:
            self._basis = GeneratorBasis(self.config.d_a, self.config.d_b)
        return self._basis

    def _evaluate(
        self,
        method: Method,
        psi: TripartitePureState,
        rho_ab: DensityMatrix,
        spectrum: Spectrum | None,
        seed: int,
    ) -> float:
        d_a, d_b = self.config.d_a, self.config.d_b
        if method is Method.THEOREM1:
            return theorem1_optimal_unitary(psi)[1].delta_s
        if method is Method.ADAM:
            adam = self.config.adam_config().model_copy(update={"seed": seed})
            return adam_maximize(rho_ab, d_a, d_b, adam, self.basis).best_delta_s
        assert spectrum is not None
        if method is Method.EXHAUSTIVE:
            return exhaustive_search(spectrum).delta_s
        if method is Method.CLOSED_FORM_D2:
            return closed_form_d2(spectrum).delta_s
        if self.config.rgnp_refine:
            return rgnp_refined(spectrum).delta_s
        return rgnp_two_step(spectrum).delta_s

    def run_state(self, index: int) -> ComparisonRecord:
        """Generate state ``index`` and run every requested method on it.

        Method failures are recorded in the record; they do not abort the state.
        """
        seed = self.config.seed + index
        psi = random_pure_state(self.config.dims, seed, self.config.rank_c)
        report = mutual_info_report(psi)
        rho_ab = reduced_ab(psi)
        spectrum = None
        if any(m.is_permutation for m in self.config.methods):
            spectrum = disentangle(rho_ab, self.config.d_a, self.config.d_b)[1]

        values: dict[Method, float | None] = {}
        errors: dict[Method, str] = {}
        wall_times: dict[Method, float] = {}
        for method in self.config.methods:
            start = time.perf_counter()
            try:
                values[method] = self._evaluate(method, psi, rho_ab, spectrum, seed)
            except QRedistError as e:
                logger.warning("State %d: %s failed: %s", index, method.value, e)
                values[method] = None
                errors[method] = str(e)
            wall_times[method] = time.perf_counter() - start

        rel: dict[Method, float | None] = {}
        flagged = False
        adam = values.get(Method.ADAM)
        if adam is not None:
            for method, value in values.items():
                if method.is_permutation and value is not None:
                    rel[method] = relative_error(adam, value)
                    flagged = flagged or rel[method] is None
        headline = next((rel[m] for m in HEADLINE_ORDER if rel.get(m) is not None), None)

        logger.info("State %d done (S_C=%.6f)", index, report.s_c)
        return ComparisonRecord(
            state_index=index,
            seed=seed,
            s_c=report.s_c,
            rank_c=report.rank_c,
            delta_s=values,
            relative_errors=rel,
            relative_error=headline,
            relative_error_flagged=flagged,
            errors=errors,
            wall_times=wall_times,
        )

    def run(self) -> RunSummary:
        """Run the whole ensemble.

        Returns:
            Summary with records ordered by state index
        """
        cfg = self.config
        logger.info(
            "Running %d states at %dx%dx%d with %s",
            cfg.n_states,
            *cfg.dims,
            ",".join(m.value for m in cfg.methods),
        )
        indices = range(cfg.n_states)
        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                records = list(pool.map(_run_state, [cfg] * cfg.n_states, indices))
        else:
            records = [self.run_state(i) for i in indices]
        return self.summarize(records)

    def summarize(self, records: list[ComparisonRecord]) -> RunSummary:
        """Aggregate relative-error statistics and ranges over records."""
        from qredist_sdk import __version__

        stats: dict[Method, MethodStats] = {}
        ranges: dict[Method, tuple[float, float]] = {}
        for method in self.config.methods:
            values = [v for r in records if (v := r.delta_s.get(method)) is not None]
            if values:
                ranges[method] = (min(values), max(values))
            if Method.ADAM not in self.config.methods or not method.is_permutation:
                continue
            errors = [r.relative_errors[method] for r in records if method in r.relative_errors]
            finite = np.array([e for e in errors if e is not None])
            stats[method] = MethodStats(
                count=len(finite),
                flagged=sum(1 for e in errors if e is None),
                mean=float(finite.mean()) if finite.size else None,
                mean_abs=float(np.abs(finite).mean()) if finite.size else None,
                min=float(finite.min()) if finite.size else None,
                max=float(finite.max()) if finite.size else None,
            )

        return RunSummary(
            version=__version__,
            dims=self.config.dims,
            n_states=self.config.n_states,
            seed=self.config.seed,
            methods=list(self.config.methods),
            ensemble=self.ensemble,
            adam=self.config.adam_config().model_dump(),
            rgnp_refine=self.config.rgnp_refine,
            tolerances=get_numeric_config().model_dump(),
            relative_error=stats,
            delta_s_range=ranges,
            failures=sum(len(r.errors) for r in records),
            records=records,
        )


def _run_state(config: RunConfig, index: int) -> ComparisonRecord:
    return ExperimentRunner(config).run_state(index)
