"""Monte Carlo back-end for the analytic event calculus.

Replications draw theta_i ~ Normal(mu, tau^2) and y_i ~ Normal(theta_i,
sigma_i^2) through the package's counter-based uniform stream and an
inverse-CDF transform, so a SimConfig pins the entire simulation bit
for bit on any platform.  Replications are organized in fixed-size
chunks, one RNG stream per chunk, which makes chunk results independent
and lets estimates merge by summation in any order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernel import norm_quantile
from .errors import DomainError
from .events import EventSpec, event_threshold, q_cdf_under_alternative
from .statfn import uniform_stream

SIM_CHUNK = 1 << 16


@dataclass(frozen=True)
class SimConfig:
    """Generative settings for one simulated pair population."""

    mu: float
    tau: float
    sigma1: float
    sigma2: float
    reps: int
    seed: int

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise DomainError(f"mu must be finite, got {self.mu!r}")
        if not (math.isfinite(self.tau) and self.tau >= 0.0):
            raise DomainError(f"tau must be non-negative, got {self.tau!r}")
        for name in ("sigma1", "sigma2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise DomainError(f"{name} must be positive, got {value!r}")
        if not isinstance(self.reps, int) or self.reps < 1:
            raise DomainError(f"reps must be a positive integer, got {self.reps!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an integer in [0, 2^64), got {self.seed!r}")


def simulate_pairs(config: SimConfig):
    """Yield chunks of simulated (y1, y2, theta1, theta2) arrays.

    Chunk c consumes stream index c of the config's seed; within a
    chunk of n replications the 4n normal deviates are laid out in
    blocks [z_theta1 | z_theta2 | z_y1 | z_y2].
    """
    for chunk_index, start in enumerate(range(0, config.reps, SIM_CHUNK)):
        n = min(SIM_CHUNK, config.reps - start)
        z = norm_quantile(uniform_stream(config.seed, chunk_index, 4 * n))
        theta1 = config.mu + config.tau * z[:n]
        theta2 = config.mu + config.tau * z[n : 2 * n]
        y1 = theta1 + config.sigma1 * z[2 * n : 3 * n]
        y2 = theta2 + config.sigma2 * z[3 * n : 4 * n]
        yield y1, y2, theta1, theta2


def mc_event_probabilities(config: SimConfig, specs) -> dict[str, dict[str, float]]:
    """Event frequencies for several indicators over one shared simulation.

    Returns {kind: {"estimate", "mc_std_err"}} with binomial standard
    errors; all indicators are evaluated on the same replications.
    """
    specs = tuple(EventSpec(kind=s) if isinstance(s, str) else s for s in specs)
    if not specs:
        raise DomainError("at least one event spec is required")
    if len({s.kind for s in specs}) != len(specs):
        raise DomainError("event kinds must be distinct")
    if config.reps < 10_000:
        raise DomainError("Monte Carlo event probabilities need reps >= 10000")
    thresholds = {
        s.kind: event_threshold(s.kind, config.sigma1, config.sigma2, s.alpha, s.ci_level)
        for s in specs
    }
    counts = {kind: 0 for kind in thresholds}
    for y1, y2, _, _ in simulate_pairs(config):
        diff = np.abs(y2 - y1)
        for kind, c in thresholds.items():
            counts[kind] += int(np.count_nonzero(diff <= c))
    out = {}
    for kind, hits in counts.items():
        p = hits / config.reps
        out[kind] = {
            "estimate": p,
            "mc_std_err": math.sqrt(p * (1.0 - p) / config.reps),
        }
    return out


def mc_event_probability(config: SimConfig, spec: EventSpec | str) -> dict[str, float]:
    """Fraction of replications on which one indicator fires."""
    if isinstance(spec, str):
        spec = EventSpec(kind=spec)
    return mc_event_probabilities(config, (spec,))[spec.kind]


def mc_q_ks(config: SimConfig, convention: str = "2tau2") -> float:
    """KS distance between simulated Q statistics and their analytic CDF.

    Q is each replication's (y2-y1)^2 / (sigma1^2+sigma2^2); the
    reference curve is the chi-square(1) CDF shrunk per the convention.
    """
    v0 = config.sigma1**2 + config.sigma2**2
    qs = np.concatenate(
        [((y2 - y1) ** 2) / v0 for y1, y2, _, _ in simulate_pairs(config)]
    )
    qs.sort()
    analytic = q_cdf_under_alternative(qs, config.sigma1, config.sigma2,
                                       config.tau, convention)
    n = qs.size
    steps = np.arange(1, n + 1, dtype=np.float64) / n
    d_plus = float(np.max(steps - analytic))
    d_minus = float(np.max(analytic - (steps - 1.0 / n)))
    return max(d_plus, d_minus)
