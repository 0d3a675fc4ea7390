"""qredist SDK - Redistributing correlations of tripartite quantum states."""

from qredist_sdk.config import (
    AdamConfig,
    NumericConfig,
    RunConfig,
    SuiteScale,
    get_numeric_config,
    load_run_config,
    set_numeric_config,
)
from qredist_sdk.exceptions import (
    AsymmetricDimsError,
    ConfigInvalidError,
    DimensionMismatchError,
    InstanceTooLargeError,
    InvalidDensityError,
    InvalidSpectrumError,
    IterationCapExceededError,
    LengthMismatchError,
    NonHermitianError,
    NonSquareError,
    NotRectangularError,
    NotUnitaryError,
    QRedistError,
    RankTooLargeError,
    SearchTooLargeError,
    SummaryInvalidError,
    TooFewNumbersError,
    WrongDimsError,
)
from qredist_sdk.experiments import ExperimentRunner
from qredist_sdk.gdopt import adam_maximize, delta_s_objective, verify_local_max
from qredist_sdk.generators import GeneratorBasis
from qredist_sdk.models import (
    ComparisonRecord,
    DensityMatrix,
    LatticeAssignment,
    Method,
    MutualInfoReport,
    OptRun,
    Partition,
    PartitionInput,
    PermResult,
    RunSummary,
    Spectrum,
    StationarityReport,
    TripartitePureState,
)
from qredist_sdk.npp import exhaustive_balanced, gnp, rgnp
from qredist_sdk.permopt import (
    closed_form_d2,
    disentangle,
    exhaustive_search,
    refine_layout,
    rgnp_refined,
    rgnp_two_step,
)
from qredist_sdk.states import mutual_info_report, random_pure_state, theorem1_optimal_unitary
from qredist_sdk.verification import run_suites

__version__ = "0.1.0"
__all__ = [
    "AdamConfig",
    "NumericConfig",
    "RunConfig",
    "SuiteScale",
    "get_numeric_config",
    "set_numeric_config",
    "load_run_config",
    "TripartitePureState",
    "DensityMatrix",
    "MutualInfoReport",
    "PartitionInput",
    "Partition",
    "Spectrum",
    "LatticeAssignment",
    "PermResult",
    "OptRun",
    "StationarityReport",
    "ComparisonRecord",
    "RunSummary",
    "Method",
    "GeneratorBasis",
    "ExperimentRunner",
    "mutual_info_report",
    "random_pure_state",
    "theorem1_optimal_unitary",
    "gnp",
    "rgnp",
    "exhaustive_balanced",
    "disentangle",
    "exhaustive_search",
    "closed_form_d2",
    "rgnp_two_step",
    "refine_layout",
    "rgnp_refined",
    "adam_maximize",
    "delta_s_objective",
    "verify_local_max",
    "run_suites",
    "QRedistError",
    "NonSquareError",
    "NonHermitianError",
    "DimensionMismatchError",
    "NotUnitaryError",
    "InvalidDensityError",
    "RankTooLargeError",
    "AsymmetricDimsError",
    "TooFewNumbersError",
    "NotRectangularError",
    "IterationCapExceededError",
    "InstanceTooLargeError",
    "SearchTooLargeError",
    "WrongDimsError",
    "LengthMismatchError",
    "InvalidSpectrumError",
    "ConfigInvalidError",
    "SummaryInvalidError",
]
