"""Tests for term declarations, spline bases, and recipe reuse."""

import numpy as np
import pytest
from scipy.interpolate import CubicSpline

from quantcord import (
    InvalidArgumentError,
    SingularDesignError,
    TermSpec,
    apply_recipe,
    build_design,
    center,
    check_full_rank,
    identity,
    interaction,
    natural_spline_columns,
    recipe_values,
    spline,
    tertile_knots,
)


class TestTermSpec:

    def test_helpers(self):
        assert identity("x").kind == "identity"
        assert center("x", 37.0).center == 37.0
        assert center("x").center is None
        assert spline("x").kind == "spline"
        t = interaction("a", "b")
        assert (t.column, t.column2) == ("a", "b")

    def test_unknown_kind(self):
        with pytest.raises(InvalidArgumentError, match="unknown term kind"):
            TermSpec("quadratic", "x")

    def test_interaction_needs_second_column(self):
        with pytest.raises(InvalidArgumentError, match="two columns"):
            TermSpec("interaction", "a")


class TestTertileKnots:

    def test_quantile_definition(self):
        rng = np.random.default_rng(1)
        x = rng.uniform(0, 10, 200)
        knots = tertile_knots(x)
        assert knots[0] == float(np.min(x))
        assert knots[3] == float(np.max(x))
        np.testing.assert_allclose(knots[1], np.quantile(x, 1 / 3))
        np.testing.assert_allclose(knots[2], np.quantile(x, 2 / 3))

    def test_too_few_distinct_values(self):
        x = np.tile([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0], 10)
        with pytest.raises(InvalidArgumentError, match="at least 8 distinct"):
            tertile_knots(x)

    def test_concentrated_column(self):
        # 8 distinct values but mass piled on one point: knots collide
        x = np.concatenate([np.full(100, 5.0), np.arange(8.0)])
        assert np.unique(x).size == 8
        with pytest.raises(InvalidArgumentError, match="strictly increasing"):
            tertile_knots(x)


class TestNaturalSplineColumns:

    @pytest.fixture
    def knots(self):
        rng = np.random.default_rng(2)
        return tertile_knots(rng.uniform(0, 10, 100))

    def test_three_columns_from_four_knots(self, knots):
        cols = natural_spline_columns(np.linspace(0, 10, 50), knots)
        assert cols.shape == (50, 3)

    def test_zero_second_derivative_outside_boundaries(self, knots):
        # h large enough that the float-cancellation noise (~eps/h^2)
        # stays below the 1e-8 budget; truncation error is exactly zero
        # where the basis is linear
        h = 1e-2
        for x0 in (knots[0] - 1.0, knots[0] - 0.05, knots[3] + 0.05, knots[3] + 1.0):
            pts = natural_spline_columns(np.array([x0 - h, x0, x0 + h]), knots)
            second = (pts[0] - 2 * pts[1] + pts[2]) / h**2
            assert np.max(np.abs(second)) <= 1e-8

    def test_curved_inside(self, knots):
        h = 1e-2
        x0 = 0.5 * (knots[1] + knots[2])
        pts = natural_spline_columns(np.array([x0 - h, x0, x0 + h]), knots)
        second = (pts[0] - 2 * pts[1] + pts[2]) / h**2
        assert np.max(np.abs(second)) > 1e-3

    def test_continuous_at_knots(self, knots):
        eps = 1e-9
        for k in knots:
            pair = natural_spline_columns(np.array([k - eps, k + eps]), knots)
            np.testing.assert_allclose(pair[0], pair[1], atol=1e-6)

    def test_spans_natural_cubic_splines(self, knots):
        # independent oracle: a scipy natural spline through the same
        # knots must be an exact linear combination of intercept + our 3
        # columns inside the knot interval (scipy extrapolates cubically
        # outside it, so the comparison stops at the boundaries)
        rng = np.random.default_rng(3)
        values_at_knots = rng.standard_normal(4)
        oracle = CubicSpline(knots, values_at_knots, bc_type="natural")
        x = np.linspace(knots[0], knots[3], 400)
        B = np.column_stack([np.ones(x.size), natural_spline_columns(x, knots)])
        target = oracle(x)
        coef, *_ = np.linalg.lstsq(B, target, rcond=None)
        np.testing.assert_allclose(B @ coef, target, atol=1e-8)

    def test_linear_functions_in_span(self, knots):
        x = np.linspace(-5, 15, 100)
        B = np.column_stack([np.ones(x.size), natural_spline_columns(x, knots)])
        coef, *_ = np.linalg.lstsq(B, 3.0 - 2.0 * x, rcond=None)
        np.testing.assert_allclose(B @ coef, 3.0 - 2.0 * x, atol=1e-9)


class TestBuildDesign:

    @pytest.fixture
    def data(self):
        rng = np.random.default_rng(4)
        return {
            "x1": rng.uniform(0, 10, 60),
            "x2": rng.standard_normal(60),
            "g": rng.integers(0, 2, 60).astype(float),
            "const37": np.full(60, 37.0),
        }

    def test_identity_terms_column_count(self, data):
        X, _ = build_design(data, [identity("x1"), identity("x2")], intercept=True)
        assert X.q == 3
        assert X.columns == ("intercept", "x1", "x2")
        assert X.intercept

    def test_declaration_order(self, data):
        X, _ = build_design(data, [identity("x2"), identity("x1")], intercept=True)
        assert X.columns == ("intercept", "x2", "x1")
        np.testing.assert_array_equal(X.values[:, 1], data["x2"])

    def test_center_with_explicit_constant(self, data):
        X, _ = build_design(data, [center("x1", 37.0)], intercept=False)
        np.testing.assert_array_equal(X.values[:, 0], data["x1"] - 37.0)
        assert X.columns == ("x1-37",)

    def test_center_default_is_training_mean(self, data):
        X, recipe = build_design(data, [center("x1")], intercept=False)
        np.testing.assert_allclose(X.values[:, 0].mean(), 0.0, atol=1e-12)
        np.testing.assert_allclose(recipe.terms[0].center_value, data["x1"].mean())

    def test_centered_constant_rejected_downstream(self, data):
        # all-zero column builds fine, then fails the rank check by name
        X, _ = build_design(
            data, [identity("x1"), center("const37", 37.0)], intercept=True
        )
        np.testing.assert_array_equal(X.values[:, 2], np.zeros(60))
        with pytest.raises(SingularDesignError, match="const37-37"):
            check_full_rank(X)

    def test_spline_term_adds_three_columns(self, data):
        X, recipe = build_design(data, [spline("x1")], intercept=True)
        assert X.q == 4
        assert X.columns == ("intercept", "s(x1).1", "s(x1).2", "s(x1).3")
        knots = recipe.terms[0].knots
        assert len(knots) == 4
        np.testing.assert_allclose(knots[1], np.quantile(data["x1"], 1 / 3))

    def test_interaction_is_product(self, data):
        X, _ = build_design(data, [interaction("x2", "g")], intercept=True)
        np.testing.assert_array_equal(X.values[:, 1], data["x2"] * data["g"])
        assert X.columns == ("intercept", "x2:g")

    def test_missing_column(self, data):
        with pytest.raises(InvalidArgumentError, match="'nope' not found"):
            build_design(data, [identity("nope")])

    def test_non_numeric_column(self):
        data = {"x": np.array(["a", "b", "c", "d"], dtype=object)}
        with pytest.raises(InvalidArgumentError, match="not numeric"):
            build_design(data, [identity("x")])

    def test_spline_needs_enough_distinct(self):
        data = {"x": np.tile([0.0, 1.0], 20)}
        with pytest.raises(InvalidArgumentError, match="distinct"):
            build_design(data, [spline("x")])


class TestRecipeReuse:

    @pytest.fixture
    def fitted(self):
        rng = np.random.default_rng(5)
        data = {"x": rng.uniform(0, 10, 80), "g": rng.integers(0, 2, 80).astype(float)}
        X, recipe = build_design(
            data, [spline("x"), center("x"), interaction("x", "g")], intercept=True
        )
        return data, X, recipe

    def test_round_trip_bit_for_bit(self, fitted):
        data, X, recipe = fitted
        again = apply_recipe(recipe, data)
        np.testing.assert_array_equal(again.values, X.values)
        assert again.columns == X.columns

    def test_single_training_row_reproduced(self, fitted):
        data, X, recipe = fitted
        row = {k: v[3:4] for k, v in data.items()}
        values, extrapolated = recipe_values(recipe, row)
        np.testing.assert_array_equal(values[0], X.values[3])
        assert extrapolated == []

    def test_knots_not_reestimated_on_grid(self, fitted):
        data, X, recipe = fitted
        grid = {"x": np.linspace(2, 4, 10), "g": np.zeros(10)}
        values, _ = recipe_values(recipe, grid)
        expected = natural_spline_columns(grid["x"], recipe.terms[0].knots)
        np.testing.assert_array_equal(values[:, 1:4], expected)

    def test_extrapolation_flagged_not_fatal(self, fitted):
        data, X, recipe = fitted
        lo, hi = recipe.terms[0].knots[0], recipe.terms[0].knots[-1]
        grid = {
            "x": np.array([lo - 1.0, 0.5 * (lo + hi), hi + 2.0]),
            "g": np.zeros(3),
        }
        values, extrapolated = recipe_values(recipe, grid)
        assert extrapolated == [0, 2]
        # beyond the boundary the spline columns continue linearly
        h = 1e-2
        probe = {"x": np.array([hi + 2.0 - h, hi + 2.0, hi + 2.0 + h]), "g": np.zeros(3)}
        vals, _ = recipe_values(recipe, probe)
        second = (vals[0] - 2 * vals[1] + vals[2]) / h**2
        assert np.max(np.abs(second)) <= 1e-8

    def test_apply_recipe_records_extrapolated_rows(self, fitted):
        data, X, recipe = fitted
        lo, hi = recipe.terms[0].knots[0], recipe.terms[0].knots[-1]
        inside = np.linspace(lo, hi, 10)
        grid = {"x": np.concatenate([inside, [hi + 1.0]]), "g": np.zeros(11)}
        design = apply_recipe(recipe, grid)
        assert design.meta["extrapolated_rows"] == [10]

    def test_grid_missing_required_column(self, fitted):
        _, _, recipe = fitted
        with pytest.raises(InvalidArgumentError, match="'g' not found"):
            recipe_values(recipe, {"x": np.linspace(0, 1, 5)})
