"""Synthetic bivariate data with known dependence, plus oracle values.

The generator draws error pairs from a bivariate normal with unit
margins and a fixed (or group-dependent) correlation, so the true
sign-concordance correlation at any quantile has an independent
ground truth through the bivariate normal CDF.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.stats import norm

from .dataset import Dataset
from .exceptions import InvalidArgumentError

MIN_ROWS = 50


@dataclass(frozen=True)
class CovariateSpec:
    """Generator for one covariate column: uniform(low, high) or binary(p)."""

    name: str
    kind: str = "uniform"
    low: float = 0.0
    high: float = 1.0
    p: float = 0.5

    def __post_init__(self):
        if self.kind not in ("uniform", "binary"):
            raise InvalidArgumentError(f"unknown covariate kind {self.kind!r}")
        if self.kind == "uniform" and not self.low < self.high:
            raise InvalidArgumentError(f"uniform range empty: [{self.low}, {self.high})")
        if self.kind == "binary" and not 0.0 < self.p < 1.0:
            raise InvalidArgumentError(f"binary probability must be in (0,1), got {self.p}")


@dataclass(frozen=True)
class ScenarioSpec:
    """Recipe for one synthetic dataset.

    ``rho`` is either a single correlation or, together with
    ``group_column`` (a binary covariate), a {0: rho0, 1: rho1} map.
    ``coefficients`` maps each response name to {"intercept": b0,
    covariate: b, ...}; omitted entries are zero.
    """

    n: int
    rho: float = 0.5
    rho_by_group: dict = None
    group_column: str = None
    covariates: tuple = ()
    coefficients: dict = field(default_factory=dict)
    response_names: tuple = ("y1", "y2")
    seed: int = 0

    def __post_init__(self):
        if self.n < MIN_ROWS:
            raise InvalidArgumentError(f"n must be at least {MIN_ROWS}, got {self.n}")
        rhos = ([self.rho] if self.rho_by_group is None
                else list(self.rho_by_group.values()))
        for r in rhos:
            if not -1.0 < r < 1.0:
                raise InvalidArgumentError(f"|rho| must be < 1, got {r}")
        if (self.rho_by_group is None) != (self.group_column is None):
            raise InvalidArgumentError(
                "rho_by_group and group_column must be given together"
            )
        if self.group_column is not None:
            kinds = {c.name: c.kind for c in self.covariates}
            if kinds.get(self.group_column) != "binary":
                raise InvalidArgumentError(
                    f"group column {self.group_column!r} must be a declared "
                    "binary covariate"
                )
        if len(self.response_names) != 2:
            raise InvalidArgumentError("exactly two response names required")
        names = {c.name for c in self.covariates}
        for resp, coefs in self.coefficients.items():
            if resp not in self.response_names:
                raise InvalidArgumentError(
                    f"coefficients given for unknown response {resp!r}"
                )
            for cov in coefs:
                if cov != "intercept" and cov not in names:
                    raise InvalidArgumentError(
                        f"coefficient references unknown covariate {cov!r}"
                    )


def generate(scenario):
    """Draw one dataset according to the scenario; deterministic in seed."""
    rng = np.random.default_rng(scenario.seed)
    n = scenario.n
    cols = {}
    for cov in scenario.covariates:
        if cov.kind == "uniform":
            cols[cov.name] = rng.uniform(cov.low, cov.high, size=n)
        else:
            cols[cov.name] = rng.binomial(1, cov.p, size=n).astype(float)

    if scenario.rho_by_group is None:
        rho = np.full(n, float(scenario.rho))
    else:
        g = cols[scenario.group_column].astype(int)
        lut = np.array([float(scenario.rho_by_group[0]),
                        float(scenario.rho_by_group[1])])
        rho = lut[g]

    z1 = rng.standard_normal(n)
    z2 = rng.standard_normal(n)
    e1 = z1
    e2 = rho * z1 + np.sqrt(1.0 - rho**2) * z2

    out = {}
    for name, err in zip(scenario.response_names, (e1, e2)):
        coefs = scenario.coefficients.get(name, {})
        y = np.full(n, float(coefs.get("intercept", 0.0)))
        for cov, b in coefs.items():
            if cov == "intercept":
                continue
            y = y + float(b) * cols[cov]
        out[name] = y + err
    out.update(cols)
    return Dataset(columns=out, source=None, meta={"seed": scenario.seed})


def _bvn_density(rho):
    c = 1.0 / (2.0 * np.pi * np.sqrt(1.0 - rho**2))
    s = 1.0 / (2.0 * (1.0 - rho**2))

    def f(y, x):
        return c * np.exp(-s * (x * x - 2.0 * rho * x * y + y * y))

    return f


def bvn_cdf(h, k, rho, abs_tol=1e-9):
    """P(X <= h, Y <= k) for standard bivariate normal, by adaptive
    2-d quadrature of the density over the lower-left quadrant."""
    if not -1.0 < rho < 1.0:
        raise InvalidArgumentError(f"|rho| must be < 1, got {rho}")
    if rho == 0.0:
        return float(norm.cdf(h) * norm.cdf(k))
    lo = min(-9.0, h - 9.0, k - 9.0)
    val, _ = integrate.dblquad(
        _bvn_density(rho), lo, h, lo, k, epsabs=abs_tol / 10.0, epsrel=1e-12
    )
    return float(val)


def bvn_cdf_monte_carlo(h, k, rho, draws=10_000_000, seed=0, chunk=1_000_000):
    """Plain Monte Carlo estimate of the bivariate normal CDF.

    Independent of the quadrature path; used to cross-check it.
    """
    rng = np.random.default_rng(seed)
    hits = 0
    left = draws
    while left > 0:
        m = min(chunk, left)
        z1 = rng.standard_normal(m)
        z2 = rho * z1 + np.sqrt(1.0 - rho**2) * rng.standard_normal(m)
        hits += int(np.count_nonzero((z1 <= h) & (z2 <= k)))
        left -= m
    return hits / draws


def oracle_phi_gaussian(rho, tau, abs_tol=1e-9):
    """Ground-truth sign-concordance correlation under bivariate
    normal errors: the joint CDF at the matched marginal quantiles,
    centered and scaled by the fixed margins."""
    if not 0.0 < tau < 1.0:
        raise InvalidArgumentError(f"tau must be in (0, 1), got {tau}")
    z = float(norm.ppf(tau))
    joint = bvn_cdf(z, z, rho, abs_tol=abs_tol)
    return (joint - tau * tau) / (tau * (1.0 - tau))


def oracle_phi_gaussian_median_closed_form(rho):
    """Arcsine closed form at tau = 0.5, for cross-checking the quadrature."""
    return 2.0 * np.arcsin(rho) / np.pi
