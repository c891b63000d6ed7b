"""quantcord: quantile-level dependence between two responses.

Two-step procedure: fit a linear quantile regression to each response,
classify the residual-sign pairs into concordance categories, model the
categories with a multinomial logit on covariates, and map the predicted
cell probabilities to a conditional phi correlation surface with
bootstrap confidence bands.
"""

__version__ = "0.1.0"

from .basis import (
    BasisRecipe,
    TermSpec,
    apply_recipe,
    build_design,
    center,
    identity,
    interaction,
    natural_spline_columns,
    recipe_values,
    spline,
    tertile_knots,
)
from .bootstrap import (
    BootstrapResult,
    bootstrap,
    bootstrap_indices,
    phi_interval,
)
from .concordance import (
    LABELS,
    MERGED_DISCORDANT,
    CellProbabilities,
    PhiBounds,
    classify,
    empirical_cells,
    limiting_cells,
    phi,
    phi_bounds,
)
from .config import (
    BootstrapConfig,
    RunConfig,
    dump_run_config,
    load_run_config,
    load_scenario,
    parse_term,
    run_config_from_dict,
    run_config_to_dict,
    scenario_from_dict,
    scenario_to_dict,
    term_to_dict,
)
from .dataset import Dataset, DropReport, read_csv, write_csv
from .design import DesignMatrix, check_full_rank
from .exceptions import (
    DegenerateIntervalWarning,
    EmptyCategoryError,
    InferenceUnreliableError,
    IngestionError,
    InvalidArgumentError,
    NonConvergenceError,
    QuantcordError,
    SeparationWarning,
    SingularDesignError,
)
from .multinomial import (
    CATEGORIES_FULL,
    CATEGORIES_MERGED,
    REFERENCE,
    MultinomialFit,
    fit_multinomial,
    loglik_gradient,
    predict_cells,
    predict_cells_rows,
)
from .pipeline import (
    AnalysisSpec,
    EvaluationGrid,
    PhiSurface,
    TwoStepResult,
    build_grid,
    evaluate_surface,
    phi_profile,
    run_two_step,
)
from .quantreg import (
    QuantileFit,
    fit_quantile_regression,
    pinball_loss,
    residual_signs,
    sign_indicators,
)
from .synthetic import (
    CovariateSpec,
    ScenarioSpec,
    bvn_cdf,
    bvn_cdf_monte_carlo,
    generate,
    oracle_phi_gaussian,
    oracle_phi_gaussian_median_closed_form,
)

__all__ = [
    "__version__",
    # basis
    "BasisRecipe", "TermSpec", "apply_recipe", "build_design", "center",
    "identity", "interaction", "natural_spline_columns", "recipe_values",
    "spline", "tertile_knots",
    # bootstrap
    "BootstrapResult", "bootstrap", "bootstrap_indices", "phi_interval",
    # concordance
    "LABELS", "MERGED_DISCORDANT", "CellProbabilities", "PhiBounds",
    "classify", "empirical_cells", "limiting_cells", "phi", "phi_bounds",
    # config
    "BootstrapConfig", "RunConfig", "dump_run_config", "load_run_config",
    "load_scenario", "parse_term", "run_config_from_dict",
    "run_config_to_dict", "scenario_from_dict", "scenario_to_dict",
    "term_to_dict",
    # dataset
    "Dataset", "DropReport", "read_csv", "write_csv",
    # design
    "DesignMatrix", "check_full_rank",
    # exceptions
    "DegenerateIntervalWarning", "EmptyCategoryError",
    "InferenceUnreliableError", "IngestionError", "InvalidArgumentError",
    "NonConvergenceError", "QuantcordError", "SeparationWarning",
    "SingularDesignError",
    # multinomial
    "CATEGORIES_FULL", "CATEGORIES_MERGED", "REFERENCE", "MultinomialFit",
    "fit_multinomial", "loglik_gradient", "predict_cells",
    "predict_cells_rows",
    # pipeline
    "AnalysisSpec", "EvaluationGrid", "PhiSurface", "TwoStepResult",
    "build_grid", "evaluate_surface", "phi_profile", "run_two_step",
    # quantreg
    "QuantileFit", "fit_quantile_regression", "pinball_loss",
    "residual_signs", "sign_indicators",
    # synthetic
    "CovariateSpec", "ScenarioSpec", "bvn_cdf", "bvn_cdf_monte_carlo",
    "generate", "oracle_phi_gaussian",
    "oracle_phi_gaussian_median_closed_form",
]
