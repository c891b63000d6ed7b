"""Paired nonparametric bootstrap over the whole two-step procedure.

Each replicate resamples rows with replacement (responses and
covariates travel together) and reruns both steps from scratch, so
step-1 estimation noise propagates into the step-2 coefficients and
the phi surface.  Replicates use independent substreams keyed by
(seed, replicate index), making results reproducible for a fixed seed
regardless of execution order or worker count.
"""

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logit
from scipy.stats import norm

from .concordance import phi_bounds
from .exceptions import (
    DegenerateIntervalWarning,
    InferenceUnreliableError,
    InvalidArgumentError,
    QuantcordError,
)
from .pipeline import run_two_step

DEFAULT_B = 1000
DEFAULT_LEVEL = 0.95
MAX_FAILURE_FRACTION = 0.2
WINSOR_EPS = 1e-6


def bootstrap_indices(seed, replicate, n):
    """Resampling indices for one replicate, from its own substream."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(replicate,))
    rng = np.random.default_rng(ss)
    return rng.integers(0, n, size=n)


def _transform_draws(values, tau):
    """Map phi values to logit of the position inside (phi_min, phi_max).

    Values at or beyond a bound are winsorized to eps inside it.
    Returns the transformed array, the winsorized count, and whether
    every value was winsorized toward the same boundary.
    """
    b = phi_bounds(tau)
    span = b.phi_max - b.phi_min
    u = (np.asarray(values, dtype=float) - b.phi_min) / span
    at_low = u < WINSOR_EPS
    at_high = u > 1.0 - WINSOR_EPS
    clipped = np.clip(u, WINSOR_EPS, 1.0 - WINSOR_EPS)
    one_boundary = bool(at_low.all() or at_high.all())
    return logit(clipped), int(at_low.sum() + at_high.sum()), one_boundary


def phi_interval(draws, estimate, tau, level=DEFAULT_LEVEL):
    """Wald interval for phi on the rescaled-logit scale.

    phi is mapped affinely from (phi_min(tau), phi_max(tau)) onto (0, 1)
    and logit-transformed; the interval is centered at the estimate's
    transform with the bootstrap SE of the transformed draws, then
    mapped back.  Out-of-range draws are winsorized first.
    """
    draws = np.asarray(draws, dtype=float)
    if draws.size == 0:
        raise InvalidArgumentError("draws must be nonempty")
    if not 0.0 < level < 1.0:
        raise InvalidArgumentError(f"level must be in (0, 1), got {level}")
    t, _, one_boundary = _transform_draws(draws, tau)
    if one_boundary:
        warnings.warn(
            "all bootstrap draws at one phi boundary; returning a point mass",
            DegenerateIntervalWarning,
            stacklevel=2,
        )
        return float(estimate), float(estimate)
    # identical draws must give an exactly zero-width interval; np.std
    # of equal values can come back ~1e-16 through the mean rounding
    spread = float(np.ptp(t)) if t.size > 1 else 0.0
    se = float(np.std(t, ddof=1)) if spread > 0.0 else 0.0
    if se == 0.0:
        return float(estimate), float(estimate)
    t0 = _transform_draws([estimate], tau)[0][0]
    z = float(norm.ppf(0.5 + level / 2.0))
    b = phi_bounds(tau)
    span = b.phi_max - b.phi_min
    lo, hi = expit(t0 - z * se), expit(t0 + z * se)
    return float(b.phi_min + span * lo), float(b.phi_min + span * hi)


def _run_replicate(data, spec, tau, grid, seed, b):
    idx = bootstrap_indices(seed, b, data.n)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = run_two_step(data.take(idx), spec, tau, grid=grid)
    except QuantcordError:
        return None
    return (
        res.step2.gamma,
        tuple(f.beta for f in res.step1),
        res.surface.phi,
    )


_WORKER_CTX = {}


def _init_worker(data, spec, tau, grid, seed):
    _WORKER_CTX["args"] = (data, spec, tau, grid, seed)


def _replicate_task(b):
    data, spec, tau, grid, seed = _WORKER_CTX["args"]
    return _run_replicate(data, spec, tau, grid, seed, b)


@dataclass(frozen=True)
class BootstrapResult:
    """Replicate draws plus the derived SEs and intervals.

    Successful draw count is ``B - failures`` in every draw array.
    ``gamma_lower``/``gamma_upper`` are percentile intervals; the phi
    bands are Wald intervals on the rescaled-logit scale and also live
    on ``surface`` (a copy of the point-estimate surface with bands).
    """

    B: int
    seed: int
    tau: float
    level: float
    failures: int
    estimate: object
    gamma_draws: np.ndarray
    beta_draws: dict
    phi_draws: np.ndarray
    gamma_se: np.ndarray
    beta_se: dict
    phi_se: np.ndarray
    gamma_lower: np.ndarray
    gamma_upper: np.ndarray
    phi_lower: np.ndarray
    phi_upper: np.ndarray
    winsorized: np.ndarray
    surface: object


def bootstrap(data, spec, tau, B=DEFAULT_B, seed=0, level=DEFAULT_LEVEL, workers=1):
    """Bootstrap the two-step procedure at one quantile level.

    Parameters
    ----------
    data, spec, tau
        As for :func:`quantcord.pipeline.run_two_step`.
    B : int
        Replicate count, at least 2.
    seed : int
        Base seed; replicate b uses substream (seed, b).
    level : float
        Coverage level for all intervals.
    workers : int
        Process count; any value yields identical results.

    Raises
    ------
    InferenceUnreliableError
        When more than 20% of replicates fail; carries partial draws.
    """
    if B < 2:
        raise InvalidArgumentError(f"B must be at least 2, got {B}")
    if not 0.0 < level < 1.0:
        raise InvalidArgumentError(f"level must be in (0, 1), got {level}")
    if workers < 1:
        raise InvalidArgumentError(f"workers must be at least 1, got {workers}")

    base = run_two_step(data, spec, tau)
    grid = base.grid

    if workers == 1:
        results = [_run_replicate(data, spec, tau, grid, seed, b) for b in range(B)]
    else:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_worker,
            initargs=(data, spec, tau, grid, seed),
        ) as pool:
            chunk = max(1, B // (4 * workers))
            results = list(pool.map(_replicate_task, range(B), chunksize=chunk))

    ok = [r for r in results if r is not None]
    failures = B - len(ok)
    if failures > MAX_FAILURE_FRACTION * B:
        raise InferenceUnreliableError(
            f"{failures} of {B} bootstrap replicates failed "
            f"(more than {MAX_FAILURE_FRACTION:.0%})",
            partial={
                "gamma_draws": np.stack([r[0] for r in ok]) if ok else None,
                "phi_draws": np.stack([r[2] for r in ok]) if ok else None,
                "failures": failures,
            },
        )

    gamma_draws = np.stack([r[0] for r in ok])
    beta_draws = {
        name: np.stack([r[1][j] for r in ok])
        for j, name in enumerate(spec.responses)
    }
    phi_draws = np.stack([r[2] for r in ok])

    alpha = 1.0 - level
    gamma_se = np.std(gamma_draws, axis=0, ddof=1)
    beta_se = {k: np.std(v, axis=0, ddof=1) for k, v in beta_draws.items()}
    phi_se = np.std(phi_draws, axis=0, ddof=1)
    gamma_lower = np.quantile(gamma_draws, alpha / 2.0, axis=0)
    gamma_upper = np.quantile(gamma_draws, 1.0 - alpha / 2.0, axis=0)

    m = phi_draws.shape[1]
    phi_lower = np.empty(m)
    phi_upper = np.empty(m)
    winsorized = np.empty(m, dtype=np.int64)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateIntervalWarning)
        for i in range(m):
            winsorized[i] = _transform_draws(phi_draws[:, i], tau)[1]
            phi_lower[i], phi_upper[i] = phi_interval(
                phi_draws[:, i], base.surface.phi[i], tau, level
            )

    return BootstrapResult(
        B=B,
        seed=seed,
        tau=tau,
        level=level,
        failures=failures,
        estimate=base,
        gamma_draws=gamma_draws,
        beta_draws=beta_draws,
        phi_draws=phi_draws,
        gamma_se=gamma_se,
        beta_se=beta_se,
        phi_se=phi_se,
        gamma_lower=gamma_lower,
        gamma_upper=gamma_upper,
        phi_lower=phi_lower,
        phi_upper=phi_upper,
        winsorized=winsorized,
        surface=base.surface.with_bands(se=phi_se, lower=phi_lower, upper=phi_upper),
    )
