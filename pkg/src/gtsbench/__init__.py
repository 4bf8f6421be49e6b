"""Benchmark toolkit for continuous dynamic multiobjective optimization.

The toolkit generates the GTS problem family: a shared time-varying base
landscape, three interaction-matrix groups of graded difficulty, regular and
irregular change schedules, and three time-linkage modes, together with the
metrics, analytical reference fronts, baseline optimizers and experiment
harness needed to benchmark dynamic multiobjective algorithms on them.
"""

from .dynamics import (
    PI_FRACTIONAL_DIGITS,
    EnvScalars,
    Schedule,
    TimeContext,
    env_scalars,
    pi_digit,
    time_value,
)
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    RunRecord,
    RunSpec,
    cell_id,
    derive_seed,
    export_plot_data,
    load_config,
    run_experiment,
    run_single,
)
from .matrices import (
    InteractionMatrix,
    InteractionMatrixSpec,
    MatrixGroup,
    NotPositiveDefiniteError,
    build_matrix,
    imbalance_ratio,
    matrix_from_dict,
    matrix_to_dict,
    quadratic_form,
    verify_positive_definite,
)
from .metrics import (
    FriedmanResult,
    MetricRecord,
    aggregate,
    friedman,
    hypervolume,
    igd,
    ms2,
    normalized_hypervolume,
    run_means,
)
from .optimizer import (
    DynamicNsga2,
    Population,
    PsOracle,
    RandomSearch,
    crowding_distances,
    environmental_selection,
    nondominated_ranks,
)
from .problems import (
    PROBLEM_IDS,
    LinkageState,
    PhiMode,
    ProblemInstance,
    ReferenceFront,
    evaluate,
    evaluate_batch,
    front_cache_dir,
    g_base,
    g_linkage,
    knee_index,
    knee_point,
    make_instance,
    non_dominated_mask,
    parse_selection,
    phi_update,
    reference_front,
    sample_pf,
    sample_ps,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # dynamics
    "PI_FRACTIONAL_DIGITS",
    "EnvScalars",
    "Schedule",
    "TimeContext",
    "env_scalars",
    "pi_digit",
    "time_value",
    # matrices
    "InteractionMatrix",
    "InteractionMatrixSpec",
    "MatrixGroup",
    "NotPositiveDefiniteError",
    "build_matrix",
    "imbalance_ratio",
    "matrix_from_dict",
    "matrix_to_dict",
    "quadratic_form",
    "verify_positive_definite",
    # problems
    "PROBLEM_IDS",
    "LinkageState",
    "PhiMode",
    "ProblemInstance",
    "ReferenceFront",
    "evaluate",
    "evaluate_batch",
    "front_cache_dir",
    "g_base",
    "g_linkage",
    "knee_index",
    "knee_point",
    "make_instance",
    "non_dominated_mask",
    "parse_selection",
    "phi_update",
    "reference_front",
    "sample_pf",
    "sample_ps",
    # metrics
    "FriedmanResult",
    "MetricRecord",
    "aggregate",
    "friedman",
    "hypervolume",
    "igd",
    "ms2",
    "normalized_hypervolume",
    "run_means",
    # optimizers
    "DynamicNsga2",
    "Population",
    "PsOracle",
    "RandomSearch",
    "crowding_distances",
    "environmental_selection",
    "nondominated_ranks",
    # harness
    "ExperimentConfig",
    "ExperimentResult",
    "RunRecord",
    "RunSpec",
    "cell_id",
    "derive_seed",
    "export_plot_data",
    "load_config",
    "run_experiment",
    "run_single",
]
