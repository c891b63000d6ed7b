"""End-to-end two-step procedure.

Step 1 fits one quantile regression per response; step 2 classifies
the residual-sign pairs and fits the multinomial model; finally the
conditional sign-correlation phi is evaluated on per-covariate
profile grids, never clipped to its theoretical bounds.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .basis import build_design, recipe_values
from .concordance import classify, empirical_cells, phi_bounds
from .dataset import Dataset
from .exceptions import InvalidArgumentError, QuantcordError
from .multinomial import fit_multinomial, predict_cells_rows
from .quantreg import fit_quantile_regression, residual_signs

DEFAULT_GRID_POINTS = 100
CONSTANT_PROFILE = "(constant)"


@dataclass(frozen=True)
class AnalysisSpec:
    """Everything needed to run the two-step procedure on a dataset.

    ``binary`` names covariates whose profile grid is {0, 1} and whose
    held-constant default is the majority value.  ``grid_values`` and
    ``held`` override the per-covariate defaults.
    """

    responses: tuple
    taus: tuple
    step1_terms: tuple = ()
    step2_terms: tuple = ()
    merged: bool = False
    grid_points: int = DEFAULT_GRID_POINTS
    grid_values: dict = field(default_factory=dict)
    held: dict = field(default_factory=dict)
    binary: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "responses", tuple(self.responses))
        object.__setattr__(self, "taus", tuple(float(t) for t in self.taus))
        object.__setattr__(self, "step1_terms", tuple(self.step1_terms))
        object.__setattr__(self, "step2_terms", tuple(self.step2_terms))
        object.__setattr__(self, "binary", tuple(self.binary))
        if len(self.responses) != 2 or self.responses[0] == self.responses[1]:
            raise InvalidArgumentError(
                f"responses must be two distinct columns, got {self.responses}"
            )
        if not self.taus:
            raise InvalidArgumentError("at least one tau is required")
        for t in self.taus:
            if not 0.0 < t < 1.0:
                raise InvalidArgumentError(f"tau must be in (0, 1), got {t}")
        if any(a >= b for a, b in zip(self.taus, self.taus[1:])):
            raise InvalidArgumentError(f"taus must be strictly increasing: {self.taus}")
        if self.grid_points < 2:
            raise InvalidArgumentError("grid_points must be at least 2")

    @property
    def profile_columns(self):
        """Covariates that get a profile grid, in declaration order."""
        names = []
        for t in self.step2_terms:
            for c in (t.column, t.column2):
                if c and c not in names:
                    names.append(c)
        return tuple(names)


@dataclass(frozen=True)
class EvaluationGrid:
    """Stacked per-covariate profiles: each row varies one covariate
    (named in ``varying``) and holds the others at ``columns`` values."""

    varying: tuple
    value: np.ndarray
    columns: dict

    @property
    def m(self):
        return len(self.varying)


def _held_default(data, name, binary):
    col = data.column(name)
    if name in binary:
        ones = np.count_nonzero(col == 1.0)
        return 1.0 if ones * 2 > col.size else 0.0
    return float(np.median(col))


def build_grid(data, spec):
    """Default evaluation grid: binary covariates take {0, 1}, others an
    equally spaced grid over the observed range; held-out covariates sit
    at their majority value (binary) or median."""
    names = spec.profile_columns
    if not names:
        return EvaluationGrid(
            varying=(CONSTANT_PROFILE,), value=np.array([np.nan]), columns={}
        )
    held = {}
    for name in names:
        if name in spec.held:
            held[name] = float(spec.held[name])
        else:
            held[name] = _held_default(data, name, spec.binary)

    varying = []
    value_blocks = []
    column_blocks = {name: [] for name in names}
    for name in names:
        if name in spec.grid_values:
            vals = np.asarray(spec.grid_values[name], dtype=float)
            if vals.ndim != 1 or vals.size == 0:
                raise InvalidArgumentError(f"grid values for {name!r} must be a 1-d list")
        elif name in spec.binary:
            vals = np.array([0.0, 1.0])
        else:
            col = data.column(name)
            vals = np.linspace(float(np.min(col)), float(np.max(col)), spec.grid_points)
        varying.extend([name] * len(vals))
        value_blocks.append(vals)
        for other in names:
            column_blocks[other].append(
                vals if other == name else np.full(len(vals), held[other])
            )
    return EvaluationGrid(
        varying=tuple(varying),
        value=np.concatenate(value_blocks),
        columns={n: np.concatenate(b) for n, b in column_blocks.items()},
    )


@dataclass(frozen=True)
class PhiSurface:
    """Conditional phi evaluated on an EvaluationGrid at one tau.

    ``cells`` rows follow the report order ("00", "11", "01", "10") so
    phi is recomputable from them.  Bands are attached by the bootstrap.
    """

    tau: float
    varying: tuple
    value: np.ndarray
    columns: dict
    cells: np.ndarray
    phi: np.ndarray
    phi_min: float
    phi_indep: float
    phi_max: float
    out_of_bounds: np.ndarray
    se: np.ndarray = None
    lower: np.ndarray = None
    upper: np.ndarray = None

    @property
    def m(self):
        return len(self.varying)

    def with_bands(self, se, lower, upper):
        return replace(self, se=se, lower=lower, upper=upper)


def evaluate_surface(fit2, recipe2, grid, tau):
    """Predict cell probabilities on the grid and map them to phi."""
    if grid.columns:
        X, _ = recipe_values(recipe2, grid.columns)
    else:
        X = np.ones((grid.m, 1))
    cells = predict_cells_rows(fit2, X)
    denom = tau * (1.0 - tau)
    phi_vals = (cells[:, 1] * cells[:, 0] - cells[:, 2] * cells[:, 3]) / denom
    bounds = phi_bounds(tau)
    out_of_bounds = (phi_vals < bounds.phi_min) | (phi_vals > bounds.phi_max)
    return PhiSurface(
        tau=tau,
        varying=grid.varying,
        value=grid.value,
        columns=grid.columns,
        cells=cells,
        phi=phi_vals,
        phi_min=bounds.phi_min,
        phi_indep=bounds.phi_indep,
        phi_max=bounds.phi_max,
        out_of_bounds=out_of_bounds,
    )


@dataclass(frozen=True)
class TwoStepResult:
    """Both step-1 fits (response order as declared), the step-2 fit,
    the evaluated surface, and enough state to redo prediction."""

    tau: float
    step1: tuple
    step2: object
    surface: PhiSurface
    recipe1: object
    recipe2: object
    labels: np.ndarray
    empirical: object
    grid: EvaluationGrid


def _tag_step(err, prefix):
    if err.args:
        err.args = (f"{prefix}: {err.args[0]}",) + err.args[1:]
    else:
        err.args = (prefix,)


def run_two_step(data, spec, tau, grid=None):
    """Run the full two-step procedure at one quantile level.

    ``grid`` defaults to ``build_grid(data, spec)``; the bootstrap
    passes the original-data grid so replicates are evaluated at
    identical covariate profiles.
    """
    if not isinstance(data, Dataset):
        raise InvalidArgumentError("data must be a Dataset")
    if not 0.0 < tau < 1.0:
        raise InvalidArgumentError(f"tau must be in (0, 1), got {tau}")

    X1, recipe1 = build_design(data, spec.step1_terms)
    fits = []
    for name in spec.responses:
        try:
            fits.append(fit_quantile_regression(X1, data.column(name), tau))
        except QuantcordError as err:
            _tag_step(err, f"step 1, response {name!r}")
            raise
    omega1 = residual_signs(fits[0])
    omega2 = residual_signs(fits[1])
    labels = classify(omega1, omega2)

    try:
        X2, recipe2 = build_design(data, spec.step2_terms)
        fit2 = fit_multinomial(X2, labels, merged=spec.merged, tau=tau)
    except QuantcordError as err:
        _tag_step(err, "step 2")
        raise

    if grid is None:
        grid = build_grid(data, spec)
    surface = evaluate_surface(fit2, recipe2, grid, tau)
    return TwoStepResult(
        tau=tau,
        step1=tuple(fits),
        step2=fit2,
        surface=surface,
        recipe1=recipe1,
        recipe2=recipe2,
        labels=labels,
        empirical=empirical_cells(labels, tau),
        grid=grid,
    )


def phi_profile(surfaces, covariate):
    """Long-format profile table for one covariate across surfaces.

    Columns: tau, value, phi_hat, phi_min, phi_max, plus lower/upper
    when every surface carries confidence bands.  Rows are ordered by
    tau, then by grid position.
    """
    surfaces = sorted(surfaces, key=lambda s: s.tau)
    if not surfaces:
        raise InvalidArgumentError("no surfaces given")
    known = set()
    for s in surfaces:
        known.update(s.varying)
    if covariate not in known:
        raise InvalidArgumentError(
            f"covariate {covariate!r} has no profile; available: {sorted(known)}"
        )
    with_bands = all(s.lower is not None and s.upper is not None for s in surfaces)
    cols = {k: [] for k in ("tau", "value", "phi_hat", "phi_min", "phi_max")}
    if with_bands:
        cols["lower"] = []
        cols["upper"] = []
    for s in surfaces:
        mask = np.array([v == covariate for v in s.varying])
        k = int(np.count_nonzero(mask))
        cols["tau"].extend([s.tau] * k)
        cols["value"].extend(s.value[mask].tolist())
        cols["phi_hat"].extend(s.phi[mask].tolist())
        cols["phi_min"].extend([s.phi_min] * k)
        cols["phi_max"].extend([s.phi_max] * k)
        if with_bands:
            cols["lower"].extend(s.lower[mask].tolist())
            cols["upper"].extend(s.upper[mask].tolist())
    return {k: np.asarray(v) for k, v in cols.items()}
