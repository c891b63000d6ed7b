"""Design-matrix construction: raw, centered, spline and product terms.

A list of term declarations is turned into a numeric design plus a
recipe holding every data-dependent constant (spline knots, centering
values), so that prediction grids are evaluated with the training
constants and reproduce the training design bit for bit.
"""

from dataclasses import dataclass

import numpy as np

from .design import DesignMatrix
from .exceptions import InvalidArgumentError

SPLINE_MIN_DISTINCT = 8


@dataclass(frozen=True)
class TermSpec:
    """One declared model term.

    kind is one of ``identity``, ``center``, ``spline``, ``interaction``.
    ``center`` uses the explicit constant when given, otherwise the
    training-sample mean.  ``interaction`` is the elementwise product
    of two raw columns.
    """

    kind: str
    column: str
    column2: str = None
    center: float = None

    def __post_init__(self):
        if self.kind not in ("identity", "center", "spline", "interaction"):
            raise InvalidArgumentError(f"unknown term kind {self.kind!r}")
        if self.kind == "interaction" and not self.column2:
            raise InvalidArgumentError("interaction terms need two columns")


def identity(column):
    return TermSpec("identity", column)


def center(column, value=None):
    return TermSpec("center", column, center=value)


def spline(column):
    return TermSpec("spline", column)


def interaction(column, column2):
    return TermSpec("interaction", column, column2=column2)


@dataclass(frozen=True)
class FittedTerm:
    spec: TermSpec
    center_value: float = None
    knots: tuple = None

    @property
    def names(self):
        s = self.spec
        if s.kind == "identity":
            return (s.column,)
        if s.kind == "center":
            return (f"{s.column}-{self.center_value:g}",)
        if s.kind == "interaction":
            return (f"{s.column}:{s.column2}",)
        return tuple(f"s({s.column}).{j}" for j in (1, 2, 3))


@dataclass(frozen=True)
class BasisRecipe:
    """Fitted terms plus intercept flag; immutable and reusable."""

    terms: tuple
    intercept: bool

    @property
    def columns(self):
        names = ("intercept",) if self.intercept else ()
        for t in self.terms:
            names = names + t.names
        return names

    @property
    def required_columns(self):
        req = []
        for t in self.terms:
            for c in (t.spec.column, t.spec.column2):
                if c and c not in req:
                    req.append(c)
        return tuple(req)


def _row_count(data):
    if hasattr(data, "n"):
        return data.n
    d = dict(data)
    if not d:
        raise InvalidArgumentError("cannot infer row count from empty data")
    return len(np.asarray(next(iter(d.values()))))


def _get_column(data, name):
    try:
        if hasattr(data, "column"):
            col = data.column(name)
        else:
            col = data[name]
    except KeyError:
        raise InvalidArgumentError(f"column {name!r} not found in data") from None
    try:
        col = np.asarray(col, dtype=float)
    except (TypeError, ValueError):
        raise InvalidArgumentError(f"column {name!r} is not numeric") from None
    return col


def natural_spline_columns(x, knots):
    """Natural cubic spline basis on fixed knots, excluding the constant.

    With K knots this spans the K-dimensional natural spline space
    together with the intercept: the identity column plus K-2 cubic
    columns, each linear beyond the boundary knots.
    """
    x = np.asarray(x, dtype=float)
    knots = np.asarray(knots, dtype=float)
    K = len(knots)

    def d(k):
        num = np.maximum(x - knots[k], 0.0) ** 3 \
            - np.maximum(x - knots[K - 1], 0.0) ** 3
        return num / (knots[K - 1] - knots[k])

    d_last = d(K - 2)
    cols = [x] + [d(k) - d_last for k in range(K - 2)]
    return np.column_stack(cols)


def tertile_knots(x):
    """Boundary knots at min/max, interior at the empirical tertiles
    (linear-interpolation sample quantiles)."""
    x = np.asarray(x, dtype=float)
    if np.unique(x).size < SPLINE_MIN_DISTINCT:
        raise InvalidArgumentError(
            f"spline term needs at least {SPLINE_MIN_DISTINCT} distinct "
            f"values, got {np.unique(x).size}"
        )
    knots = (
        float(np.min(x)),
        float(np.quantile(x, 1.0 / 3.0)),
        float(np.quantile(x, 2.0 / 3.0)),
        float(np.max(x)),
    )
    if not all(a < b for a, b in zip(knots, knots[1:])):
        raise InvalidArgumentError(
            f"spline knots are not strictly increasing: {knots}; "
            "the column is too concentrated for tertile knots"
        )
    return knots


def _fit_term(spec, data):
    if spec.kind == "identity":
        _get_column(data, spec.column)
        return FittedTerm(spec)
    if spec.kind == "center":
        col = _get_column(data, spec.column)
        value = float(np.mean(col)) if spec.center is None else float(spec.center)
        return FittedTerm(spec, center_value=value)
    if spec.kind == "interaction":
        _get_column(data, spec.column)
        _get_column(data, spec.column2)
        return FittedTerm(spec)
    col = _get_column(data, spec.column)
    return FittedTerm(spec, knots=tertile_knots(col))


def _eval_term(term, data):
    s = term.spec
    col = _get_column(data, s.column)
    if s.kind == "identity":
        return col[:, None]
    if s.kind == "center":
        return (col - term.center_value)[:, None]
    if s.kind == "interaction":
        return (col * _get_column(data, s.column2))[:, None]
    return natural_spline_columns(col, term.knots)


def build_design(data, terms, intercept=True):
    """Fit all data-dependent constants and assemble the design.

    Returns the design matrix and the recipe that rebuilds it.
    """
    fitted = tuple(_fit_term(t, data) for t in terms)
    recipe = BasisRecipe(terms=fitted, intercept=intercept)
    return apply_recipe(recipe, data), recipe


def recipe_values(recipe, data):
    """Raw design values for a fitted recipe, with no row-count floor.

    Used for prediction grids, which may have fewer rows than columns.
    Returns the value array and the sorted indices of rows where a
    spline input fell beyond its boundary knots (linear extrapolation).
    """
    n = _row_count(data)
    blocks = []
    extrapolated = set()
    for term in recipe.terms:
        block = _eval_term(term, data)
        if term.spec.kind == "spline":
            col = _get_column(data, term.spec.column)
            outside = np.nonzero((col < term.knots[0]) | (col > term.knots[-1]))[0]
            extrapolated.update(outside.tolist())
        blocks.append(block)
    if recipe.intercept:
        blocks.insert(0, np.ones((n, 1)))
    values = np.hstack(blocks) if blocks else np.empty((n, 0))
    return values, sorted(extrapolated)


def apply_recipe(recipe, data):
    """Evaluate a fitted recipe on new rows.

    Stored knots and centers are reused, never re-estimated.  Spline
    inputs beyond the boundary knots extrapolate linearly (natural
    spline property); the affected row indices are listed under
    ``meta["extrapolated_rows"]``.
    """
    values, extrapolated = recipe_values(recipe, data)
    meta = {"extrapolated_rows": extrapolated} if extrapolated else {}
    return DesignMatrix(
        values=values,
        columns=recipe.columns,
        intercept=recipe.intercept,
        meta=meta,
    )
