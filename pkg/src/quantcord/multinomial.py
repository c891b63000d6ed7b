"""Multinomial logistic model for the concordance labels.

Reference category is "00"; the remaining categories get one
coefficient vector each.  Fitting is Newton-Raphson with step-halving
on the full multinomial likelihood, whose Hessian doubles as the
variance estimate.  In merged mode the two discordant labels are
pooled before fitting and the predicted discordant mass is split
equally between them at prediction time, never during fitting.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .concordance import LABELS, MERGED_DISCORDANT, CellProbabilities
from .design import DesignMatrix, check_full_rank
from .exceptions import EmptyCategoryError, InvalidArgumentError, SeparationWarning

REFERENCE = "00"
CATEGORIES_FULL = ("11", "01", "10")
CATEGORIES_MERGED = ("11", MERGED_DISCORDANT)

GRADIENT_TOL = 1e-8
MAX_NEWTON_ITER = 100
SEPARATION_COEF = 30.0


@dataclass(frozen=True)
class MultinomialFit:
    """Fitted category log-odds against the "00" reference."""

    categories: tuple
    gamma: np.ndarray  # one row of coefficients per non-reference category
    tau: float
    loglik: float
    converged: bool
    iterations: int
    columns: tuple
    merged: bool
    vcov: np.ndarray = None
    separation: bool = False
    loglik_path: tuple = ()


def _pool_merged(z):
    z = np.asarray(z, dtype=object)
    out = z.copy()
    out[(z == "01") | (z == "10")] = MERGED_DISCORDANT
    return out


def _indicators(z, categories):
    z = np.asarray(z, dtype=object)
    known = set(categories) | {REFERENCE}
    bad = sorted(set(z.tolist()) - known)
    if bad:
        raise InvalidArgumentError(f"unknown labels present: {bad}")
    Y = np.column_stack([(z == c).astype(float) for c in categories])
    missing = [c for c in (REFERENCE, *categories) if not np.any(z == c)]
    if missing:
        raise EmptyCategoryError(missing)
    return Y


def _loglik_parts(gamma, X, Y):
    eta = X @ gamma.T  # n x K
    lse = logsumexp(np.column_stack([np.zeros(X.shape[0]), eta]), axis=1)
    ll = float(np.sum(Y * eta) - np.sum(lse))
    probs = np.exp(eta - lse[:, None])
    return ll, probs


def _gradient(X, Y, probs):
    return (X.T @ (Y - probs)).T.reshape(-1)  # category-major blocks


def _information(X, probs):
    n, q = X.shape
    K = probs.shape[1]
    info = np.empty((K * q, K * q))
    for k in range(K):
        for l in range(k, K):
            w = probs[:, k] * ((k == l) - probs[:, l])
            block = X.T @ (X * w[:, None])
            info[k * q:(k + 1) * q, l * q:(l + 1) * q] = block
            info[l * q:(l + 1) * q, k * q:(k + 1) * q] = block.T
    return info


def loglik_gradient(gamma, X2, z, merged=False):
    """Analytic score of the multinomial log-likelihood at ``gamma``."""
    categories = CATEGORIES_MERGED if merged else CATEGORIES_FULL
    gamma = np.asarray(gamma, dtype=float).reshape(len(categories), X2.q)
    labels = _pool_merged(z) if merged else np.asarray(z, dtype=object)
    Y = _indicators(labels, categories)
    _, probs = _loglik_parts(gamma, X2.values, Y)
    return _gradient(X2.values, Y, probs)


def _separation_detected(gamma, X):
    sd = X.std(axis=0)
    scale = np.where(sd > 0, sd, 1.0)  # intercept and constant columns: raw value
    return bool(np.any(np.abs(gamma) * scale[None, :] > SEPARATION_COEF))


def fit_multinomial(X2, z, merged=False, *, tau=0.5,
                    tol=GRADIENT_TOL, max_iter=MAX_NEWTON_ITER):
    """Maximum-likelihood fit of the concordance categories on ``X2``.

    Raises EmptyCategoryError when any modeled category (including the
    reference) has no observations; a category with zero count has no
    finite MLE, and the caller should pool discordant labels (merged
    mode) or coarsen the covariates instead.
    """
    if not isinstance(X2, DesignMatrix):
        raise InvalidArgumentError("X2 must be a DesignMatrix")
    check_full_rank(X2)
    categories = CATEGORIES_MERGED if merged else CATEGORIES_FULL
    labels = _pool_merged(z) if merged else np.asarray(z, dtype=object)
    if labels.size == 0:
        raise InvalidArgumentError("empty label vector")
    if labels.size != X2.n:
        raise InvalidArgumentError(
            f"{labels.size} labels for {X2.n} design rows"
        )
    Y = _indicators(labels, categories)

    X = X2.values
    n, q = X.shape
    K = len(categories)
    gamma = np.zeros((K, q))
    ll, probs = _loglik_parts(gamma, X, Y)
    path = [ll]

    converged = np.max(np.abs(_gradient(X, Y, probs))) <= tol
    it = 0
    while not converged and it < max_iter:
        g = _gradient(X, Y, probs)
        info = _information(X, probs)
        try:
            step = np.linalg.solve(info, g).reshape(K, q)
        except np.linalg.LinAlgError:
            step = (np.linalg.pinv(info) @ g).reshape(K, q)
        # step-halving keeps the likelihood path non-decreasing; the
        # few-ulp slack lets the full Newton step through once the
        # likelihood is flat at float resolution (halved steps would
        # otherwise cycle with the gradient stuck near the tolerance)
        slack = 4.0 * np.finfo(float).eps * max(1.0, abs(ll))
        t = 1.0
        improved = False
        for _ in range(40):
            trial = gamma + t * step
            ll_trial, probs_trial = _loglik_parts(trial, X, Y)
            if np.isfinite(ll_trial) and ll_trial >= ll - slack:
                improved = True
                break
            t /= 2.0
        if not improved:
            break  # no ascent left at this iterate
        gamma, ll, probs = trial, ll_trial, probs_trial
        path.append(ll)
        it += 1
        converged = np.max(np.abs(_gradient(X, Y, probs))) <= tol

    separation = _separation_detected(gamma, X)
    if separation:
        warnings.warn(
            "possible complete separation: standardized coefficient "
            f"magnitude exceeds {SEPARATION_COEF}",
            SeparationWarning,
            stacklevel=2,
        )

    info = _information(X, probs)
    try:
        vcov = np.linalg.inv(info)
    except np.linalg.LinAlgError:
        vcov = None

    return MultinomialFit(
        categories=categories,
        gamma=gamma,
        tau=tau,
        loglik=ll,
        converged=converged,
        iterations=it,
        columns=X2.columns,
        merged=merged,
        vcov=vcov,
        separation=separation,
        loglik_path=tuple(path),
    )


def predict_cells_rows(fit, X):
    """Cell probabilities for each row of a design array, as an n-by-4 array.

    Columns follow the report order ``("00", "11", "01", "10")``.
    """
    X = np.asarray(X.values if isinstance(X, DesignMatrix) else X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != fit.gamma.shape[1]:
        raise InvalidArgumentError(
            f"x has dimension {X.shape[1]}, fit expects {fit.gamma.shape[1]}"
        )
    eta = X @ fit.gamma.T
    lse = logsumexpcols(eta)
    probs = np.exp(eta - lse[:, None])
    p_ref = np.exp(-lse)
    out = np.empty((X.shape[0], 4))
    out[:, 0] = p_ref
    if fit.merged:
        out[:, 1] = probs[:, 0]
        out[:, 2] = probs[:, 1] / 2.0  # equal split of the discordant mass
        out[:, 3] = probs[:, 1] / 2.0
    else:
        out[:, 1] = probs[:, 0]
        out[:, 2] = probs[:, 1]
        out[:, 3] = probs[:, 2]
    return out


def logsumexpcols(eta):
    return logsumexp(np.column_stack([np.zeros(eta.shape[0]), eta]), axis=1)


def predict_cells(fit, x):
    """Predicted cell probabilities at a single covariate vector."""
    row = predict_cells_rows(fit, np.asarray(x, dtype=float))[0]
    return CellProbabilities(p00=row[0], p11=row[1], p01=row[2], p10=row[3],
                             tau=fit.tau)


__all__ = [
    "LABELS",
    "REFERENCE",
    "CATEGORIES_FULL",
    "CATEGORIES_MERGED",
    "MultinomialFit",
    "fit_multinomial",
    "loglik_gradient",
    "predict_cells",
    "predict_cells_rows",
]
