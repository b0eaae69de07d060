"""Analytic probabilities for homogeneity indicators in a pair.

Four events signal agreement between two studies: overlapping
confidence intervals, a non-significant Q test, each interval covering
the other estimate, and a zero heterogeneity estimate.  Each event
occurs exactly when |y2 - y1| stays under an event-specific threshold,
so its probability is a chi-square(1) CDF value once the variance of
the difference is fixed.

Two variance conventions are exposed and never silently mixed.  Under
the hierarchical model the difference of the two estimates has variance
s1^2 + s2^2 + 2 tau^2, tagged "2tau2" and used by default.  The "tau2"
tag (s1^2 + s2^2 + tau^2) does not follow from the model; it is kept
because widely circulated reference values for these four events were
computed that way, and reproducing them requires it.  Conversions are
exact: "tau2" at heterogeneity tau equals "2tau2" at tau/sqrt(2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .statfn import brent_root, chisq_cdf, gaussian_quantile

EVENT_KINDS = ("overlap", "nonsig_q", "mutual_coverage", "zero_tau")
CONVENTIONS = ("2tau2", "tau2")


def _check_kind(kind: str) -> str:
    if kind not in EVENT_KINDS:
        raise DomainError(f"unknown event kind {kind!r}; expected one of {EVENT_KINDS}")
    return kind


def _check_convention(convention: str) -> str:
    if convention not in CONVENTIONS:
        raise DomainError(
            f"unknown convention {convention!r}; expected one of {CONVENTIONS}"
        )
    return convention


def _check_probability(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 < value < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {value!r}")
    return value


def _check_sigma(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0.0):
        raise DomainError(f"{name} must be a positive real, got {value!r}")
    return value


@dataclass(frozen=True)
class EventSpec:
    """One homogeneity indicator with its test level and CI coverage.

    `alpha` is the level of the Q test (nonsig_q only); `ci_level` is
    the coverage of the intervals behind overlap and mutual coverage.
    """

    kind: str
    alpha: float = 0.05
    ci_level: float = 0.95

    def __post_init__(self):
        _check_kind(self.kind)
        _check_probability("alpha", self.alpha)
        _check_probability("ci_level", self.ci_level)


def difference_variance(
    sigma1: float, sigma2: float, tau: float, convention: str = "2tau2"
) -> float:
    """Variance of y2 - y1 under the chosen heterogeneity convention."""
    sigma1 = _check_sigma("sigma1", sigma1)
    sigma2 = _check_sigma("sigma2", sigma2)
    tau = float(tau)
    if tau < 0.0 or not math.isfinite(tau):
        raise DomainError(f"tau must be non-negative, got {tau!r}")
    factor = 2.0 if _check_convention(convention) == "2tau2" else 1.0
    return sigma1 * sigma1 + sigma2 * sigma2 + factor * tau * tau


def event_threshold(
    kind: str,
    sigma1: float,
    sigma2: float,
    alpha: float = 0.05,
    ci_level: float = 0.95,
) -> float:
    """Cutoff c such that the event holds exactly when |y2 - y1| < c."""
    _check_kind(kind)
    sigma1 = _check_sigma("sigma1", sigma1)
    sigma2 = _check_sigma("sigma2", sigma2)
    _check_probability("alpha", alpha)
    _check_probability("ci_level", ci_level)
    if kind == "overlap":
        return gaussian_quantile(0.5 * (1.0 + ci_level)) * (sigma1 + sigma2)
    if kind == "mutual_coverage":
        return gaussian_quantile(0.5 * (1.0 + ci_level)) * min(sigma1, sigma2)
    if kind == "zero_tau":
        return math.sqrt(sigma1 * sigma1 + sigma2 * sigma2)
    # nonsig_q
    return gaussian_quantile(1.0 - 0.5 * alpha) * math.sqrt(
        sigma1 * sigma1 + sigma2 * sigma2
    )


def event_probability(
    spec: EventSpec | str,
    sigma1: float,
    sigma2: float,
    tau,
    convention: str = "2tau2",
):
    """Probability of the event at heterogeneity tau.

    Equals F_chi2(1)(c^2 / Var(y2 - y1)) with the threshold c from
    event_threshold and the variance from difference_variance.  `tau`
    may be a scalar or an array; a bare kind string means default alpha
    and ci_level.
    """
    if isinstance(spec, str):
        spec = EventSpec(kind=spec)
    sigma1 = _check_sigma("sigma1", sigma1)
    sigma2 = _check_sigma("sigma2", sigma2)
    _check_convention(convention)
    arr = np.asarray(tau, dtype=np.float64)
    if np.any(arr < 0.0) or np.any(~np.isfinite(arr)):
        raise DomainError("tau must be non-negative and finite")
    c = event_threshold(spec.kind, sigma1, sigma2, spec.alpha, spec.ci_level)
    factor = 2.0 if convention == "2tau2" else 1.0
    var = sigma1 * sigma1 + sigma2 * sigma2 + factor * arr * arr
    out = chisq_cdf(c * c / var, 1)
    return float(out) if np.ndim(tau) == 0 else out


def q_cdf_under_alternative(
    x, sigma1: float, sigma2: float, tau: float, convention: str = "2tau2"
):
    """CDF of Cochran's Q for a pair when the true heterogeneity is tau.

    Q carries the null scaling by sigma1^2 + sigma2^2, so under the
    alternative its CDF is the chi-square(1) CDF evaluated at x times
    (sigma1^2 + sigma2^2) / Var(y2 - y1); at tau = 0 this is the null
    chi-square for either convention.
    """
    sigma1 = _check_sigma("sigma1", sigma1)
    sigma2 = _check_sigma("sigma2", sigma2)
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < 0.0):
        raise DomainError("x must be non-negative")
    var = difference_variance(sigma1, sigma2, tau, convention)
    shrink = (sigma1 * sigma1 + sigma2 * sigma2) / var
    out = chisq_cdf(arr * shrink, 1)
    return float(out) if np.ndim(x) == 0 else out


def i2_from_ratio(tau_over_sigma):
    """I-squared for equal-sigma studies: r^2 / (1 + r^2)."""
    arr = np.asarray(tau_over_sigma, dtype=np.float64)
    if np.any(arr < 0.0):
        raise DomainError("tau/sigma must be non-negative")
    r2 = arr * arr
    out = r2 / (1.0 + r2)
    return float(out) if np.ndim(tau_over_sigma) == 0 else out


def ratio_from_i2(i2):
    """Inverse of i2_from_ratio; defined for I-squared in [0, 1)."""
    arr = np.asarray(i2, dtype=np.float64)
    if np.any(arr < 0.0) or np.any(arr >= 1.0):
        raise DomainError("I-squared must lie in [0, 1)")
    out = np.sqrt(arr / (1.0 - arr))
    return float(out) if np.ndim(i2) == 0 else out


def invert_event_probability(
    kind: str,
    target_p: float,
    convention: str = "2tau2",
    alpha: float = 0.05,
    ci_level: float = 0.95,
) -> float:
    """Heterogeneity ratio tau/sigma at which an equal-sigma event has
    the given probability.

    Probabilities fall strictly as tau grows, so the root is unique;
    a target at or above the tau = 0 probability has no solution.
    """
    _check_kind(kind)
    _check_convention(convention)
    target_p = _check_probability("target_p", target_p)
    spec = EventSpec(kind=kind, alpha=alpha, ci_level=ci_level)

    def prob(r: float) -> float:
        return event_probability(spec, 1.0, 1.0, r, convention)

    p0 = prob(0.0)
    if target_p >= p0:
        raise DomainError(
            f"no solution: {kind} has probability {p0:.6f} at tau=0, "
            f"which {target_p!r} does not fall below"
        )
    hi = 1.0
    for _ in range(200):
        if prob(hi) < target_p:
            break
        hi *= 2.0
    return brent_root(lambda r: prob(r) - target_p, 0.0, hi)


def probability_curves(
    kinds,
    ratio_grid,
    convention: str = "2tau2",
    alpha: float = 0.05,
    ci_level: float = 0.95,
) -> dict[str, np.ndarray]:
    """Event probabilities along a tau/sigma grid for equal sigmas.

    Returns one array per requested kind, aligned with `ratio_grid`.
    """
    kinds = tuple(kinds)
    if not kinds:
        raise DomainError("at least one event kind is required")
    grid = np.asarray(ratio_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("ratio_grid must be a non-empty 1-d sequence")
    if np.any(grid < 0.0):
        raise DomainError("ratio_grid must be non-negative")
    _check_convention(convention)
    out: dict[str, np.ndarray] = {}
    for kind in kinds:
        spec = EventSpec(kind=kind, alpha=alpha, ci_level=ci_level)
        out[kind] = event_probability(spec, 1.0, 1.0, grid, convention)
    return out
