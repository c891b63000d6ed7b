"""Recover group-specific dependence with the two-step procedure.

Simulates two responses whose latent correlation differs by group
(rho = 0.2 when g = 0, rho = 0.8 when g = 1) and whose locations shift
with the group, runs the two-step analysis at three quantile levels,
and compares the fitted phi surface against the Gaussian-copula truth.

The group indicator appears in both steps: step 1 must model the
conditional quantile (dropping g there leaves the location shift in
the residuals and biases every cell), step 2 lets phi vary with g.
"""

import numpy as np

from quantcord import (
    AnalysisSpec,
    CovariateSpec,
    ScenarioSpec,
    generate,
    identity,
    oracle_phi_gaussian,
    phi_profile,
    run_two_step,
)

scenario = ScenarioSpec(
    n=6000,
    rho=None,
    rho_by_group={0: 0.2, 1: 0.8},
    group_column="g",
    covariates=(CovariateSpec("g", "binary", p=0.5),),
    coefficients={"y1": {"intercept": 1.0, "g": 0.5}, "y2": {"g": -0.5}},
    seed=11,
)
data = generate(scenario)

spec = AnalysisSpec(
    responses=("y1", "y2"),
    taus=(0.25, 0.5, 0.75),
    step1_terms=(identity("g"),),
    step2_terms=(identity("g"),),
    binary=("g",),
)
surfaces = [run_two_step(data, spec, tau).surface for tau in spec.taus]
table = phi_profile(surfaces, "g")

print("tau    g    phi_hat   oracle    error")
for tau, value, est in zip(table["tau"], table["value"], table["phi_hat"]):
    rho = {0.0: 0.2, 1.0: 0.8}[value]
    truth = oracle_phi_gaussian(rho, tau)
    print(
        f"{tau:.2f}   {value:.0f}   {est:+.4f}   {truth:+.4f}   "
        f"{abs(est - truth):.4f}"
    )

# for a Gaussian copula phi peaks at the median and falls off
# symmetrically in the tails, visible in both groups above
worst = max(
    abs(est - oracle_phi_gaussian({0.0: 0.2, 1.0: 0.8}[v], t))
    for t, v, est in zip(table["tau"], table["value"], table["phi_hat"])
)
print(f"\nworst absolute error over the grid: {worst:.4f}")
assert worst < 0.1
