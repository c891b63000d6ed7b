"""Linear quantile regression by pinball-loss minimization.

Three-stage solver.  A majorize-minimize phase replaces the check
function by a smoothed surrogate and solves one weighted least-squares
problem per outer iteration while the smoothing parameter decays to a
floor.  A polish phase then snaps the iterate onto the best nearby
vertex (an exact fit through q observations, where the minimum of the
piecewise-linear objective lives).  Finally, exact coordinate-wise
line searches run until no single-coordinate move lowers the
objective, which certifies optimality along every coordinate
direction and, in particular, the quantile property of the residual
sign counts.
"""

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .design import DesignMatrix, check_full_rank
from .exceptions import InvalidArgumentError, NonConvergenceError

DEFAULT_TOL = 1e-10
MAX_OUTER_ITER = 500
MAX_POLISH_SWEEPS = 60
VERTEX_POOL_BUDGET = 300


def pinball_loss(u, tau):
    """Check-function loss: ``tau*u`` for positive u, ``(tau-1)*u`` otherwise.

    Nonnegative, zero exactly at ``u == 0``.  Accepts scalars or arrays.
    """
    if not 0.0 < tau < 1.0:
        raise InvalidArgumentError(f"tau must be in (0, 1), got {tau}")
    u = np.asarray(u, dtype=float)
    if not np.isfinite(u).all():
        raise InvalidArgumentError("residual argument must be finite")
    out = np.where(u > 0, tau * u, (tau - 1.0) * u)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class QuantileFit:
    """Result of one quantile regression.

    ``residuals`` always equals ``y - X @ beta`` as computed with the
    returned coefficients, so it can be recomputed bit for bit.
    """

    tau: float
    beta: np.ndarray
    residuals: np.ndarray
    objective: float
    iterations: int
    converged: bool
    columns: tuple = ()

    def fitted(self, X):
        return np.asarray(X.values if isinstance(X, DesignMatrix) else X) @ self.beta


def residual_signs(fit):
    """Binary indicators: 1 where the residual is <= 0, else 0."""
    return sign_indicators(fit.residuals)


def sign_indicators(residuals):
    return (np.asarray(residuals, dtype=float) <= 0).astype(np.int64)


def _objective(residuals, tau):
    return float(np.sum(np.where(residuals > 0, tau * residuals,
                                 (tau - 1.0) * residuals)))


def _greedy_basis(X, order, q):
    """First q rows, in |residual| order, that keep the submatrix full rank."""
    rows = []
    for i in order:
        trial = rows + [i]
        if np.linalg.matrix_rank(X[trial]) == len(trial):
            rows = trial
        if len(rows) == q:
            return rows
    return None


def _vertex_polish(X, y, tau, beta, objective):
    """Snap the iterate onto the best exact fit through q observations.

    Enumerates row subsets from the smallest-|residual| pool (the whole
    sample when that stays within the combination budget, which makes
    tiny problems exhaustive) plus a greedy full-rank basis.  A vertex
    is preferred whenever it ties the incoming objective to float
    precision, because only vertices carry exact sign structure.
    """
    n, q = X.shape
    r = y - X @ beta
    order = np.argsort(np.abs(r), kind="stable")

    pool_size = n
    while pool_size > q and comb(pool_size, q) > VERTEX_POOL_BUDGET:
        pool_size -= 1
    candidates = list(itertools.combinations(order[:pool_size].tolist(), q))
    greedy = _greedy_basis(X, order.tolist(), q)
    if greedy is not None:
        candidates.append(tuple(greedy))

    vertex_beta, vertex_obj = None, np.inf
    for rows in candidates:
        A = X[list(rows)]
        try:
            b = np.linalg.solve(A, y[list(rows)])
        except np.linalg.LinAlgError:
            continue
        if not np.isfinite(b).all():
            continue
        obj = _objective(y - X @ b, tau)
        if obj < vertex_obj:
            vertex_beta, vertex_obj = b, obj
    if vertex_beta is not None and \
            vertex_obj <= objective + 1e-12 * max(1.0, abs(objective)):
        return vertex_beta, vertex_obj
    return beta, objective


def _line_search(r, c, tau):
    """Exact minimizer over delta of ``sum(pinball(r - delta*c))``.

    The objective is piecewise linear in delta with breakpoints r/c and
    slope jumps |c|; the minimum sits at the breakpoint where the
    cumulative slope crosses zero (a weighted quantile).
    """
    mask = c != 0
    if not mask.any():
        return 0.0
    cm = c[mask]
    t = r[mask] / cm
    w = np.abs(cm)
    order = np.argsort(t, kind="stable")
    t = t[order]
    descent = tau * np.sum(cm[cm > 0]) + (1.0 - tau) * np.sum(-cm[cm < 0])
    cum = np.cumsum(w[order])
    k = min(int(np.searchsorted(cum, descent)), len(t) - 1)
    return float(t[k])


def _coordinate_descent(X, y, tau, beta, objective, max_sweeps=MAX_POLISH_SWEEPS):
    """Sweep exact per-coordinate line searches to a fixed point.

    Equal-objective moves onto breakpoints are accepted so the iterate
    settles on a vertex of the optimal face; two consecutive sweeps
    without strict improvement terminate (optimal plateau reached).
    Returns the point, its objective, and whether a fixed point or
    plateau was certified within the sweep budget.
    """
    q = X.shape[1]
    beta = beta.copy()
    r = y - X @ beta
    slack = 1e-12 * max(1.0, abs(objective))
    flat_sweeps = 0
    for _ in range(max_sweeps):
        sweep_start = objective
        moved = False
        for j in range(q):
            d = _line_search(r, X[:, j], tau)
            if d == 0.0:
                continue
            new_r = r - d * X[:, j]
            new_obj = _objective(new_r, tau)
            if new_obj <= objective + slack:
                beta = beta.copy()
                beta[j] += d
                r, objective = new_r, new_obj
                moved = True
        if not moved:
            return beta, objective, True
        if objective >= sweep_start - slack:
            flat_sweeps += 1
            if flat_sweeps >= 2:
                return beta, objective, True
        else:
            flat_sweeps = 0
    return beta, objective, False


def _wls(X, y, w):
    sw = np.sqrt(w)
    beta, *_ = np.linalg.lstsq(sw[:, None] * X, sw * y, rcond=None)
    return beta


def fit_quantile_regression(X, y, tau, tol=DEFAULT_TOL, max_iter=MAX_OUTER_ITER):
    """Minimize ``sum(pinball_loss(y - X @ beta, tau))`` over beta.

    Parameters
    ----------
    X : DesignMatrix
        Full-rank design; rank deficiency raises SingularDesignError.
    y : array_like
        Response vector of length ``X.n``.
    tau : float
        Quantile level, strictly inside (0, 1).
    tol : float
        Relative change of the exact pinball objective between outer
        iterations that, at the smoothing floor, declares convergence.
    max_iter : int
        Cap on outer iterations.  NonConvergenceError (carrying the
        last polished iterate) is raised only when the cap is hit and
        the polish cannot certify coordinate-wise optimality either.
    """
    if not isinstance(X, DesignMatrix):
        raise InvalidArgumentError("X must be a DesignMatrix")
    if not 0.0 < tau < 1.0:
        raise InvalidArgumentError(f"tau must be in (0, 1), got {tau}")
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != X.n:
        raise InvalidArgumentError(f"y has length {y.shape[0]}, design has {X.n} rows")
    if not np.isfinite(y).all():
        raise InvalidArgumentError("y contains non-finite values")
    check_full_rank(X)

    Xv = X.values
    scale = float(np.median(np.abs(y - np.median(y))))
    if scale == 0.0:
        scale = max(float(np.max(np.abs(y))), 1.0)
    eps = scale
    eps_floor = 1e-12 * scale

    beta, *_ = np.linalg.lstsq(Xv, y, rcond=None)
    r = y - Xv @ beta
    obj = _objective(r, tau)
    best_beta, best_obj = beta.copy(), obj

    converged = False
    polished = False
    iterations = 0
    while iterations < max_iter:
        iterations += 1
        absr = np.abs(r)
        w = 1.0 / (eps + absr)
        # shifted response folds the asymmetric linear term into WLS
        ytilde = y + (2.0 * tau - 1.0) * (eps + absr)
        beta = _wls(Xv, ytilde, w)
        r = y - Xv @ beta
        new_obj = _objective(r, tau)
        if new_obj < best_obj:
            best_beta, best_obj = beta.copy(), new_obj
        rel = abs(obj - new_obj) / max(obj, new_obj, 1e-300)
        obj = new_obj
        if eps <= eps_floor and rel < tol:
            converged = True
            break
        if eps <= eps_floor and rel < 1e-7 and not polished:
            # smooth tail crawls near a vertex; snap once and resume
            pb, po = _vertex_polish(Xv, y, tau, best_beta, best_obj)
            pb, po, _ = _coordinate_descent(Xv, y, tau, pb, po)
            if po <= best_obj:
                best_beta, best_obj = pb.copy(), po
            beta = pb
            r = y - Xv @ beta
            obj = _objective(r, tau)
            polished = True
        eps = max(eps * 0.5, eps_floor)

    beta, obj = _vertex_polish(Xv, y, tau, best_beta, best_obj)
    beta, obj, certified = _coordinate_descent(Xv, y, tau, beta, obj)
    residuals = y - Xv @ beta

    fit = QuantileFit(
        tau=tau,
        beta=beta,
        residuals=residuals,
        objective=_objective(residuals, tau),
        iterations=iterations,
        converged=converged or certified,
        columns=X.columns,
    )
    if not fit.converged:
        raise NonConvergenceError(
            f"quantile regression did not converge in {max_iter} iterations",
            last_fit=fit,
        )
    return fit
