"""Paired-bootstrap confidence bands for the phi surface.

Resamples rows of a two-group synthetic dataset (keeping the response
pairs intact), reruns the two-step fit on every replicate, and prints
the resulting standard errors and 95% bands.  The bands should cover
the Gaussian-copula truth and clearly separate the two groups.
"""

import numpy as np

from quantcord import (
    AnalysisSpec,
    CovariateSpec,
    ScenarioSpec,
    bootstrap,
    generate,
    identity,
    oracle_phi_gaussian,
)

scenario = ScenarioSpec(
    n=1200,
    rho=None,
    rho_by_group={0: 0.2, 1: 0.8},
    group_column="g",
    covariates=(CovariateSpec("g", "binary", p=0.5),),
    seed=23,
)
data = generate(scenario)

spec = AnalysisSpec(
    responses=("y1", "y2"),
    taus=(0.5,),
    step2_terms=(identity("g"),),
    binary=("g",),
)
result = bootstrap(data, spec, 0.5, B=200, seed=17)
surface = result.surface

print(f"replicates: 200, failures: {result.failures}")
print("\ng    phi_hat   se       95% band             oracle   covered")
for i, value in enumerate(surface.value):
    truth = oracle_phi_gaussian({0.0: 0.2, 1.0: 0.8}[value], 0.5)
    lo, hi = surface.lower[i], surface.upper[i]
    covered = "yes" if lo <= truth <= hi else "no"
    print(
        f"{value:.0f}    {surface.phi[i]:+.4f}   {result.phi_se[i]:.4f}"
        f"   [{lo:+.4f}, {hi:+.4f}]   {truth:+.4f}   {covered}"
    )

print("\nstep-2 coefficients (percentile intervals):")
print("category  term        estimate   95% interval")
fit = result.estimate.step2
for r, cat in enumerate(fit.categories):
    for c, term in enumerate(fit.columns):
        print(
            f"{cat:<9} {term:<11} {fit.gamma[r, c]:+.4f}"
            f"    [{result.gamma_lower[r, c]:+.4f}, "
            f"{result.gamma_upper[r, c]:+.4f}]"
        )

# the g intervals for both discordant categories sit well below zero:
# relative to "00", discordant cells thin out sharply in the high-rho
# group, which is exactly how stronger dependence shows up here

