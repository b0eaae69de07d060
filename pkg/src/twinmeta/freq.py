"""Frequentist inference for a study pair.

Cochran's Q with its chi-square test, the closed-form k=2 heterogeneity
estimate (the moment, Paule-Mandel, DerSimonian-Laird, and REML
estimators all coincide there) with a Q-profile interval, and pooled
effects under fixed-effect, random-effects, HKSJ, and modified
Knapp-Hartung weighting.

Everything here is a pure function over immutable inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .model import HeterogeneityResult, PooledEffect, StudyPair, require_pair
from .statfn import (
    brent_root,
    chisq_quantile,
    chisq_sf,
    gaussian_quantile,
    student_t_quantile,
)

POOLING_METHODS = ("FE", "RE", "HKSJ", "mKH")


@dataclass(frozen=True)
class QResult:
    """Cochran's heterogeneity statistic with its chi-square p-value."""

    Q: float
    df: int
    p_value: float


def _check_level(level: float) -> float:
    level = float(level)
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must lie in (0, 1), got {level!r}")
    return level


def _pooled_at(ys, ss, tau: float) -> tuple[float, float]:
    """Inverse-variance pooled mean and total weight at heterogeneity tau."""
    weights = [1.0 / (s * s + tau * tau) for s in ss]
    total = sum(weights)
    mean = sum(w * y for w, y in zip(weights, ys)) / total
    return mean, total


def generalized_q(pair: StudyPair, tau: float) -> float:
    """Weighted squared deviation from the pooled mean at heterogeneity tau.

    Weights are 1/(s_i^2 + tau^2) and the pooled mean is recomputed at
    each tau, which is the construction the Q-profile interval inverts.
    At tau = 0 this is Cochran's Q.
    """
    pair = require_pair(pair)
    tau = float(tau)
    if tau < 0.0:
        raise DomainError(f"tau must be non-negative, got {tau!r}")
    ys = pair.estimates()
    ss = pair.std_errs()
    mean, _ = _pooled_at(ys, ss, tau)
    return sum((y - mean) ** 2 / (s * s + tau * tau) for y, s in zip(ys, ss))


def cochran_q(pair: StudyPair) -> QResult:
    """Cochran's Q test of homogeneity across the pair's studies.

    For two studies Q reduces to (y2 - y1)^2 / (s1^2 + s2^2) with one
    degree of freedom.
    """
    pair = require_pair(pair)
    q = generalized_q(pair, 0.0)
    df = pair.k - 1
    return QResult(Q=q, df=df, p_value=chisq_sf(q, df))


def tau_estimate_k2(
    pair: StudyPair, level: float = 0.95, tau_max: float | None = None
) -> HeterogeneityResult:
    """Closed-form heterogeneity estimate for a pair with Q-profile interval.

    tau_hat^2 = max(0, ((y2-y1)^2 - (s1^2+s2^2)) / 2); the interval ends
    solve generalized_q(tau) = chi-square(1) quantiles at (1+level)/2
    (lower end) and (1-level)/2 (upper end), truncated at zero.  A
    profile still above the upper target at `tau_max` (default
    100 * sqrt(s1^2+s2^2)) yields that cap with `upper_unbounded` set.
    """
    pair = require_pair(pair, k=2)
    level = _check_level(level)
    (y1, y2) = pair.estimates()
    (s1, s2) = pair.std_errs()
    v = s1 * s1 + s2 * s2
    delta2 = (y2 - y1) ** 2
    tau_hat = math.sqrt(max(0.0, 0.5 * (delta2 - v)))
    if tau_max is None:
        tau_max = 100.0 * math.sqrt(v)
    else:
        tau_max = float(tau_max)
        if tau_max <= 0.0:
            raise DomainError(f"tau_max must be positive, got {tau_max!r}")
    lower_target = chisq_quantile(0.5 * (1.0 + level), 1)
    upper_target = chisq_quantile(0.5 * (1.0 - level), 1)

    def profile(tau: float) -> float:
        return delta2 / (v + 2.0 * tau * tau)

    q0 = profile(0.0)
    q_cap = profile(tau_max)
    unbounded = False
    if q0 <= lower_target:
        lower = 0.0
    elif q_cap > lower_target:
        lower = tau_max
    else:
        lower = brent_root(lambda t: profile(t) - lower_target, 0.0, tau_max)
    if q0 <= upper_target:
        upper = 0.0
    elif q_cap > upper_target:
        upper = tau_max
        unbounded = True
    else:
        upper = brent_root(lambda t: profile(t) - upper_target, 0.0, tau_max)
    return HeterogeneityResult(
        tau_hat=tau_hat,
        interval=(lower, upper),
        level=level,
        method="freq-k2",
        upper_unbounded=unbounded,
    )


def _point_estimate_tau(pair: StudyPair) -> float:
    if pair.k == 2:
        return tau_estimate_k2(pair).tau_hat
    # one implementation of the Paule-Mandel root-find serves both the
    # joint model and outsized "pairs"
    from .multipair import common_tau_freq
    from .model import TwinCorpus

    return common_tau_freq(TwinCorpus(pairs=(pair,))).tau_hat


def pooled_effect(
    pair: StudyPair,
    method: str = "RE",
    level: float = 0.95,
    tau: float | None = None,
) -> PooledEffect:
    """Pooled effect for the pair under the requested weighting scheme.

    FE ignores heterogeneity (weights 1/s_i^2, normal quantile).  RE
    uses weights 1/(s_i^2 + tau^2) with a normal quantile.  HKSJ keeps
    the RE mean but rescales the variance to q/sum(w) with
    q = sum(w_i (y_i - mean)^2)/(k-1) and uses a Student-t quantile with
    k-1 degrees of freedom; mKH additionally floors that variance at the
    RE value 1/sum(w).  When tau is not given it is estimated from the
    pair itself (closed form at k=2, Paule-Mandel root otherwise).

    Identical estimates make the HKSJ variance zero: HKSJ then returns a
    zero-width interval while mKH falls back to the RE variance through
    the max rule.
    """
    pair = require_pair(pair)
    level = _check_level(level)
    if method not in POOLING_METHODS:
        raise DomainError(
            f"unknown pooling method {method!r}; expected one of {POOLING_METHODS}"
        )
    if tau is not None:
        tau = float(tau)
        if tau < 0.0:
            raise DomainError(f"tau must be non-negative, got {tau!r}")
    if method == "FE":
        tau_eff = 0.0
    elif tau is not None:
        tau_eff = tau
    else:
        tau_eff = _point_estimate_tau(pair)
    ys = pair.estimates()
    ss = pair.std_errs()
    mean, total_weight = _pooled_at(ys, ss, tau_eff)
    if method in ("FE", "RE"):
        half = gaussian_quantile(0.5 * (1.0 + level)) * math.sqrt(1.0 / total_weight)
    else:
        k = pair.k
        q = sum(
            (y - mean) ** 2 / (s * s + tau_eff * tau_eff) for y, s in zip(ys, ss)
        ) / (k - 1)
        variance = q / total_weight
        if method == "mKH":
            variance = max(variance, 1.0 / total_weight)
        half = student_t_quantile(0.5 * (1.0 + level), k - 1) * math.sqrt(variance)
    return PooledEffect.build(mean, mean - half, mean + half, method=method)


def is_significant(estimate: float, std_err: float, alpha: float = 0.05) -> bool:
    """Two-sided significance of a single estimate at level alpha."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    std_err = float(std_err)
    if std_err <= 0.0:
        raise DomainError(f"std_err must be positive, got {std_err!r}")
    return abs(float(estimate)) / std_err > gaussian_quantile(1.0 - 0.5 * alpha)
