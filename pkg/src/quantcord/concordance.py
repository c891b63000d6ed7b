"""Sign-concordance labels, cell probabilities and the phi coefficient."""

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidArgumentError

# report order matches the label numbering of the concordance variable
LABELS = ("00", "11", "01", "10")
MERGED_DISCORDANT = "01+10"


def classify(omega1, omega2):
    """Combine two residual-sign vectors into concordance labels.

    ``"00"`` both signs positive, ``"11"`` both at or below the fitted
    quantile, ``"01"``/``"10"`` the two discordant patterns (first index
    is the first response).
    """
    w1 = np.asarray(omega1)
    w2 = np.asarray(omega2)
    if w1.shape != w2.shape or w1.ndim != 1:
        raise InvalidArgumentError(
            f"sign vectors must be 1-d and equal length, got {w1.shape} and {w2.shape}"
        )
    for w in (w1, w2):
        if not np.isin(w, (0, 1)).all():
            raise InvalidArgumentError("sign vectors must contain only 0 and 1")
    lookup = np.array([["00", "01"], ["10", "11"]], dtype=object)
    return lookup[w1.astype(int), w2.astype(int)]


@dataclass(frozen=True)
class CellProbabilities:
    """Joint probabilities of the four sign patterns at quantile tau."""

    p00: float
    p11: float
    p01: float
    p10: float
    tau: float

    def __post_init__(self):
        cells = (self.p00, self.p11, self.p01, self.p10)
        if any(c < 0 or c > 1 for c in cells):
            raise InvalidArgumentError(f"cells must lie in [0, 1], got {cells}")
        if abs(sum(cells) - 1.0) > 1e-12:
            raise InvalidArgumentError(f"cells must sum to 1, got {sum(cells)!r}")
        if not 0.0 < self.tau < 1.0:
            raise InvalidArgumentError(f"tau must be in (0, 1), got {self.tau}")

    def as_array(self):
        return np.array([self.p00, self.p11, self.p01, self.p10])


def empirical_cells(z, tau):
    """Relative frequency of each concordance label."""
    z = np.asarray(z, dtype=object)
    if z.size == 0:
        raise InvalidArgumentError("empty label vector")
    n = z.size
    counts = {lab: int(np.sum(z == lab)) for lab in LABELS}
    if sum(counts.values()) != n:
        bad = sorted(set(z.tolist()) - set(LABELS))
        raise InvalidArgumentError(f"unknown labels present: {bad}")
    return CellProbabilities(
        p00=counts["00"] / n,
        p11=counts["11"] / n,
        p01=counts["01"] / n,
        p10=counts["10"] / n,
        tau=tau,
    )


def phi(cells):
    """Correlation between the two sign indicators.

    Uses the fixed theoretical margins tau and 1-tau, so the
    denominator is exactly ``tau * (1 - tau)``; empirical margins would
    be off by O(q/n) and break the exact limiting cases.
    """
    tau = cells.tau
    return (cells.p11 * cells.p00 - cells.p01 * cells.p10) / (tau * (1.0 - tau))


@dataclass(frozen=True)
class PhiBounds:
    """Attainable range of phi for fixed margins at quantile tau."""

    phi_min: float
    phi_indep: float
    phi_max: float


def phi_bounds(tau):
    """Theoretical limits of phi: depend on tau only, not on the data."""
    if not 0.0 < tau < 1.0:
        raise InvalidArgumentError(f"tau must be in (0, 1), got {tau}")
    if tau <= 0.5:
        lo = -tau / (1.0 - tau)
    else:
        lo = -(1.0 - tau) / tau
    return PhiBounds(phi_min=lo, phi_indep=0.0, phi_max=1.0)


def limiting_cells(case, tau):
    """Cell probabilities of the three limiting dependence patterns.

    ``case`` is one of ``"independence"``, ``"max"``, ``"min"``.
    """
    if not 0.0 < tau < 1.0:
        raise InvalidArgumentError(f"tau must be in (0, 1), got {tau}")
    if case == "independence":
        return CellProbabilities((1 - tau) ** 2, tau**2, tau - tau**2,
                                 tau - tau**2, tau)
    if case == "max":
        return CellProbabilities(1 - tau, tau, 0.0, 0.0, tau)
    if case == "min":
        if tau <= 0.5:
            return CellProbabilities(1 - 2 * tau, 0.0, tau, tau, tau)
        return CellProbabilities(0.0, 2 * tau - 1, 1 - tau, 1 - tau, tau)
    raise InvalidArgumentError(f"unknown limiting case {case!r}")
