"""End-to-end acceptance checks against published reference values.

Each criterion prints one line, "criterion NN (<name>): PASS" or FAIL,
and raises on any miss.  Run through pytest as usual, or directly
(python3 tests/test_acceptance.py) for the standalone report.
"""
import math
import sys
from time import perf_counter

import numpy as np

from twinmeta import (
    EVENT_KINDS,
    HalfNormalPrior,
    StudyPair,
    StudyResult,
    back_transform,
    bayes_factor_homogeneity,
    cochran_q,
    common_tau_bayes,
    common_tau_freq,
    dataset_path,
    event_probability,
    event_threshold,
    i2_from_ratio,
    ingest_csv,
    invert_event_probability,
    marginal_likelihood,
    mu_posterior,
    pooled_effect,
    prior_summary,
    random_tau_predictive,
    summarize_corpus,
    tau_estimate_k2,
    tau_posterior,
    uniformity_diagnostics,
)
from twinmeta.bayes import GridPosterior
from twinmeta.sim import SimConfig, mc_event_probabilities
from twinmeta.statfn import (
    chisq_cdf,
    chisq_quantile,
    chisq_sf,
    gaussian_cdf,
    gaussian_quantile,
    student_t_cdf,
    student_t_quantile,
)

# Reference probability grid (percent) for equal standard errors, one row
# per heterogeneity ratio tau/sigma, columns ordered as EVENT_KINDS.
# Reproduced by the "tau2" convention; the generating model ("2tau2")
# gives different values, which criterion 2 quantifies by Monte Carlo.
REFERENCE_GRID_PCT = {
    0.0: (99.4, 95.0, 83.4, 68.3),
    0.5: (99.1, 93.5, 80.9, 65.4),
    1.0: (97.6, 89.0, 74.2, 58.6),
    2.0: (89.0, 74.2, 57.6, 43.6),
}
REFERENCE_I2 = {0.0: 0.0, 0.5: 0.2, 1.0: 0.5, 2.0: 0.8}

# Reference analyses of the glow dataset: heterogeneity rows as
# (prior scale, median, upper) and effect rows as (estimate, lo, hi).
GLOW_TAU_ROWS = ((10.0, 6.1, 18.1), (20.0, 10.5, 33.4), (50.0, 19.4, 73.9))
GLOW_TAU_FREQ_UPPER = 247.7
GLOW_EFFECT_ROWS = {
    "FE": (103.2, 81.4, 124.9),
    "RE": (103.2, 81.4, 124.9),
    "HKSJ": (103.2, 33.8, 172.5),
    "mKH": (103.2, -37.7, 244.0),
}
GLOW_BAYES_EFFECT_ROWS = (
    (10.0, 103.1, 77.7, 128.3),
    (20.0, 103.0, 70.6, 135.1),
    (50.0, 102.9, 45.7, 159.5),
)

# Reference analyses of the respire dataset, per regimen.  The reference
# table's 28-day HN(0.25) upper bound is printed as 1.120, contradicting
# the row's own width column (0.448 + 0.751 = 1.199); the width-implied
# 1.199 is the value tested here, and the width itself is checked too.
RESPIRE_TAU = {"14day": (0.13, 0.22), "28day": (0.36, 0.028)}
RESPIRE_EFFECT_ROWS = {
    "14day": {
        "FE": (0.718, 0.561, 0.919),
        "RE": (0.716, 0.529, 0.970),
        "HKSJ": (0.716, 0.100, 5.110),
        "mKH": (0.716, 0.100, 5.110),
    },
    "28day": {
        "FE": (0.732, 0.566, 0.949),
        "RE": (0.733, 0.416, 1.294),
        "HKSJ": (0.733, 0.019, 29.02),
        "mKH": (0.733, 0.019, 29.02),
    },
}
RESPIRE_BAYES_EFFECT_ROWS = {
    "14day": ((0.50, 0.715, 0.373, 1.362), (0.25, 0.716, 0.474, 1.079)),
    "28day": ((0.50, 0.733, 0.337, 1.599), (0.25, 0.733, 0.448, 1.199)),
}
RESPIRE_28D_HN025_WIDTH = 0.751


def _close(value: float, target: float, tol: float, what: str) -> None:
    assert abs(value - target) <= tol, (
        f"{what}: got {value!r}, want {target!r} within {tol!r}"
    )


def _load(name: str):
    corpus = ingest_csv(str(dataset_path(name)))
    return {p.pair_id: p for p in corpus.pairs}


def _make_pair(pair_id, ys, ss, scale="identity"):
    studies = tuple(
        StudyResult(label=f"s{i}", estimate=float(y), std_err=float(s))
        for i, (y, s) in enumerate(zip(ys, ss), start=1)
    )
    return StudyPair(pair_id=pair_id, studies=studies, measure="MD" if scale == "identity" else "logIRR", scale=scale)


def criterion_01_probability_grid():
    start = perf_counter()
    for ratio, row in REFERENCE_GRID_PCT.items():
        for kind, pct in zip(EVENT_KINDS, row):
            p = event_probability(kind, 1.0, 1.0, ratio, convention="tau2")
            _close(100.0 * p, pct, 0.05, f"{kind} at tau/sigma={ratio}")
        i2 = i2_from_ratio(ratio)
        assert i2 == REFERENCE_I2[ratio], f"I^2 at ratio {ratio}: {i2!r}"
    elapsed = perf_counter() - start
    assert elapsed < 1.0, f"grid took {elapsed:.3f}s, budget 1s"


def criterion_02_convention_adjudication():
    start = perf_counter()
    min_gap = math.inf
    for ratio in (0.5, 1.0, 2.0):
        config = SimConfig(
            mu=0.0, tau=ratio, sigma1=1.0, sigma2=1.0, reps=10**6, seed=20260817
        )
        mc = mc_event_probabilities(config, EVENT_KINDS)
        for kind, ref_pct in zip(EVENT_KINDS, REFERENCE_GRID_PCT[ratio]):
            est = mc[kind]["estimate"]
            se = mc[kind]["mc_std_err"]
            analytic = event_probability(kind, 1.0, 1.0, ratio, convention="2tau2")
            _close(est, analytic, 3.29 * se, f"MC vs 2tau2, {kind} at ratio {ratio}")
            if ratio >= 1.0:
                gap = abs(est - ref_pct / 100.0) / se
                min_gap = min(min_gap, gap)
                assert gap > 5.0, (
                    f"MC vs reference grid, {kind} at ratio {ratio}: "
                    f"only {gap:.1f} MC standard errors apart"
                )
    elapsed = perf_counter() - start
    assert elapsed < 30.0, f"Monte Carlo took {elapsed:.1f}s, budget 30s"
    return (
        f"reference grid rejected by >= {min_gap:.0f} MC standard errors "
        f"at tau/sigma in {{1, 2}}"
    )


def criterion_03_matched_ratios():
    for kind, target, want, tol in (
        ("nonsig_q", 0.846, 1.3, 0.05),
        ("mutual_coverage", 0.808, 0.51, 0.01),
        ("zero_tau", 0.654, 0.50, 0.01),
    ):
        ratio = invert_event_probability(kind, target, convention="tau2")
        _close(ratio, want, tol, f"inverted ratio for {kind} at p={target}")


def criterion_04_p_value_anchors():
    for q, want, tol in ((0.0076, 0.93, 0.005), (0.54, 0.46, 0.005), (5.6, 0.018, 0.002)):
        _close(chisq_sf(q, 1), want, tol, f"upper tail at Q={q}")
    # same anchor through the Q test itself: Q = (y2-y1)^2 at unit variance sum
    pair = _make_pair("anchor", (0.0, math.sqrt(5.6)), (math.sqrt(0.5), math.sqrt(0.5)))
    _close(cochran_q(pair).p_value, 0.018, 0.002, "Q test p-value at Q=5.6")


def criterion_05_smallest_p_quantile():
    rest = np.linspace(0.05, 0.99, 25)
    diag = uniformity_diagnostics([0.0177, *rest])
    q = diag["min_p_quantile"]
    _close(q, 0.372, 0.003, "smallest-p quantile for (0.0177, n=26)")
    assert f"{q:.0%}" == "37%", f"rendering: {q:.0%}"


def criterion_06_prior_summaries():
    # reference constants to 4 significant figures, plus the coarser
    # digits the dataset write-ups quote (2 decimals for small scales,
    # 1 for the rest)
    rows = (
        (0.25, 0.169, 0.490, "0.17", "0.49", 2),
        (0.50, 0.337, 0.980, "0.34", "0.98", 2),
        (10.0, 6.745, 19.60, "6.7", "19.6", 1),
        (20.0, 13.49, 39.19, "13.5", "39.2", 1),
        (50.0, 33.72, 97.98, "33.7", "98.0", 1),
    )
    for scale, med, hi, med_str, hi_str, dp in rows:
        ps = prior_summary(HalfNormalPrior(scale))
        # the 4-figure constants carry transcription slop that grows with
        # the scale, so the tolerance does too; the digit checks below
        # pin the reported rounding exactly
        tol = max(0.01, 4e-4 * scale)
        _close(ps.median, med, tol, f"HN({scale}) median")
        _close(ps.interval[1], hi, tol, f"HN({scale}) upper")
        assert f"{ps.median:.{dp}f}" == med_str, (
            f"HN({scale}) median {ps.median!r} does not round to {med_str}"
        )
        assert f"{ps.interval[1]:.{dp}f}" == hi_str, (
            f"HN({scale}) upper {ps.interval[1]!r} does not round to {hi_str}"
        )
        assert ps.interval[0] == 0.0


def criterion_07_width_ratio_law():
    rng = np.random.default_rng(20260817)
    for i in range(50):
        s1, s2 = np.exp(rng.normal(0.0, 1.0, 2))
        y1 = rng.normal(0.0, 5.0)
        # keep the squared gap below s1^2 + s2^2 so tau-hat truncates to zero
        y2 = y1 + rng.uniform(-1.0, 1.0) * math.hypot(s1, s2)
        pair = _make_pair(f"w{i}", (y1, y2), (s1, s2))
        assert tau_estimate_k2(pair).tau_hat == 0.0
        ratio = pooled_effect(pair, "mKH").width / pooled_effect(pair, "RE").width
        _close(ratio, 6.4821, 0.001, f"width ratio for pair {i}")


def criterion_08_glow_reproduction():
    pair = _load("glow")["glow"]
    het = tau_estimate_k2(pair)
    assert het.tau_hat == 0.0, f"tau-hat {het.tau_hat!r}, want exactly 0"
    _close(
        het.interval[1],
        GLOW_TAU_FREQ_UPPER,
        0.02 * GLOW_TAU_FREQ_UPPER,
        "tau interval upper bound",
    )
    for scale, med, hi in GLOW_TAU_ROWS:
        result, _ = tau_posterior(pair, HalfNormalPrior(scale))
        _close(result.tau_hat, med, 0.3, f"HN({scale}) tau median")
        _close(result.interval[1], hi, 0.3, f"HN({scale}) tau upper")
        assert result.interval[0] <= 0.3
    for method, (est, lo, hi) in GLOW_EFFECT_ROWS.items():
        effect = pooled_effect(pair, method)
        _close(effect.estimate, est, 1.0, f"{method} estimate")
        _close(effect.interval[0], lo, 2.0, f"{method} lower")
        _close(effect.interval[1], hi, 2.0, f"{method} upper")
    for scale, est, lo, hi in GLOW_BAYES_EFFECT_ROWS:
        effect, _ = mu_posterior(pair, HalfNormalPrior(scale))
        _close(effect.estimate, est, 1.0, f"HN({scale}) estimate")
        _close(effect.interval[0], lo, 2.0, f"HN({scale}) lower")
        _close(effect.interval[1], hi, 2.0, f"HN({scale}) upper")


def criterion_09_respire_reproduction():
    pairs = _load("respire")
    for rid, (tau_want, p_want) in RESPIRE_TAU.items():
        pair = pairs[rid]
        _close(tau_estimate_k2(pair).tau_hat, tau_want, 0.02, f"{rid} tau-hat")
        _close(cochran_q(pair).p_value, p_want, 0.01, f"{rid} Q p-value")
        for method, (est, lo, hi) in RESPIRE_EFFECT_ROWS[rid].items():
            effect = back_transform(pooled_effect(pair, method))
            _close(effect.estimate, est, 0.01, f"{rid} {method} estimate")
            _close(effect.interval[0], lo, 0.03, f"{rid} {method} lower")
            _close(effect.interval[1], hi, 0.03, f"{rid} {method} upper")
        for scale, est, lo, hi in RESPIRE_BAYES_EFFECT_ROWS[rid]:
            effect, _ = mu_posterior(pair, HalfNormalPrior(scale))
            _close(effect.estimate, est, 0.01, f"{rid} HN({scale}) estimate")
            _close(effect.interval[0], lo, 0.03, f"{rid} HN({scale}) lower")
            _close(effect.interval[1], hi, 0.03, f"{rid} HN({scale}) upper")
        hksj = pooled_effect(pair, "HKSJ")
        mkh = pooled_effect(pair, "mKH")
        assert hksj.estimate == mkh.estimate
        for h, m in zip(hksj.interval, mkh.interval):
            assert abs(h - m) <= 1e-12 * max(1.0, abs(m)), (
                f"{rid}: HKSJ and mKH must coincide when tau-hat is positive"
            )
        re_effect = pooled_effect(pair, "RE")
        inflation = mkh.width / re_effect.width
        _close(inflation, 6.5, 0.1, f"{rid} log-scale width inflation")
    bayes28, _ = mu_posterior(pairs["28day"], HalfNormalPrior(0.25))
    _close(
        bayes28.interval[1] - bayes28.interval[0],
        RESPIRE_28D_HN025_WIDTH,
        0.03,
        "28day HN(0.25) interval width",
    )


def criterion_10_corpus_checks():
    # the shared source corpus is not distributable, so its value checks
    # are replaced by property checks on a synthetic corpus
    rng = np.random.default_rng(774411)
    pairs = []
    for i in range(26):
        mu = rng.normal(0.0, 0.4)
        ses = np.exp(rng.normal(-1.2, 0.3, 2))
        ys = rng.normal(mu, ses)
        pairs.append(_make_pair(f"p{i:02d}", ys, ses, scale="log"))
    summary = summarize_corpus(pairs)
    assert summary.n_pairs == 26
    assert len(summary.q_pvalues) == 26
    for kind in EVENT_KINDS:
        assert 0.0 <= summary.event_frequencies[kind] <= 1.0
    assert sum(summary.concordance["same"]) + sum(summary.concordance["opposite"]) == 26
    zero_frac = np.mean([tau_estimate_k2(p).tau_hat == 0.0 for p in pairs])
    assert summary.event_frequencies["zero_tau"] == zero_frac
    assert summary.se_ratio["max"] >= summary.se_ratio["median"] >= 1.0

    diag = uniformity_diagnostics(summary.q_pvalues)
    assert 0.0 < diag["ks_p"] <= 1.0 and 0.0 < diag["ks_d"] < 1.0
    assert 0.0 < diag["min_p_quantile"] <= 1.0

    pm = common_tau_freq(pairs)
    assert pm.tau_hat >= 0.0 and pm.df == 26
    assert pm.interval[0] <= pm.tau_hat <= pm.interval[1]
    bayes = common_tau_bayes(pairs, HalfNormalPrior(0.5))
    assert 0.0 <= bayes.interval[0] <= bayes.tau_hat <= bayes.interval[1]
    bf01 = bayes_factor_homogeneity(pairs, mu_prior_sd=4.0, tau_prior=HalfNormalPrior(0.5))
    assert bf01 > 1.0, f"homogeneous corpus should favor tau=0, got BF01={bf01!r}"
    hier = random_tau_predictive(pairs, hyper_upper=2.0)
    assert 0.0 < hier.predictive_median < hier.predictive_q95
    return "source corpus unavailable; ran synthetic-corpus property checks"


def criterion_11_property_suites():
    rng = np.random.default_rng(99332211)

    # truncation equivalence: the zero-tau indicator fires exactly when
    # the moment estimate truncates to zero
    ys = rng.normal(0.0, 2.0, (10_000, 2))
    ses = np.exp(rng.normal(0.0, 0.7, (10_000, 2)))
    for i in range(10_000):
        pair = _make_pair(f"e{i}", ys[i], ses[i])
        fires = abs(ys[i, 1] - ys[i, 0]) <= event_threshold("zero_tau", *ses[i])
        assert (tau_estimate_k2(pair).tau_hat == 0.0) == fires, f"pair {i}"

    # swap and shift equivariance
    for i in range(25):
        y1, y2 = rng.normal(0.0, 3.0, 2)
        s1, s2 = np.exp(rng.normal(0.0, 0.5, 2))
        shift = rng.normal(0.0, 10.0)
        pair = _make_pair(f"s{i}", (y1, y2), (s1, s2))
        swapped = _make_pair(f"s{i}x", (y2, y1), (s2, s1))
        shifted = _make_pair(f"s{i}y", (y1 + shift, y2 + shift), (s1, s2))
        base_tau = tau_estimate_k2(pair).tau_hat
        assert tau_estimate_k2(swapped).tau_hat == base_tau
        # shifting reorders the subtraction y2 - y1, so allow last-ulp drift
        moved_tau = tau_estimate_k2(shifted).tau_hat
        assert abs(moved_tau - base_tau) <= 1e-12 * max(1.0, base_tau)
        assert abs(cochran_q(swapped).Q - cochran_q(pair).Q) < 1e-10
        for method in ("FE", "RE", "HKSJ", "mKH"):
            base = pooled_effect(pair, method)
            swap = pooled_effect(swapped, method)
            assert abs(swap.estimate - base.estimate) < 1e-10
            assert abs(swap.width - base.width) < 1e-10
            moved = pooled_effect(shifted, method)
            assert abs(moved.estimate - (base.estimate + shift)) < 1e-9
            assert abs(moved.width - base.width) < 1e-9

    # posterior normalization and external grid-refinement stability
    glow = _load("glow")["glow"]
    respire14 = _load("respire")["14day"]
    for pair, scale in ((glow, 20.0), (respire14, 0.5)):
        prior = HalfNormalPrior(scale)
        tau_res, gp_tau = tau_posterior(pair, prior)
        _, gp_mu = mu_posterior(pair, prior)
        for gp in (gp_tau, gp_mu):
            mass = float(np.trapezoid(gp.density, gp.grid))
            assert abs(mass - 1.0) <= 1e-6, f"posterior mass {mass!r}"

        def tau_median(n_knots: int) -> float:
            grid = np.linspace(0.0, 10.0 * scale, n_knots)
            logd = marginal_likelihood(pair, grid) + prior.log_pdf(grid)
            return GridPosterior.from_log_density(grid, logd).median

        coarse, fine = tau_median(2001), tau_median(4001)
        assert abs(fine - coarse) <= 1e-4 * max(1.0, abs(fine)), (
            f"median moved {abs(fine - coarse)!r} under grid doubling"
        )
        assert abs(tau_res.tau_hat - fine) <= 1e-3 * max(1.0, abs(fine))

    # a vanishing heterogeneity prior collapses the Bayes effect onto FE
    pair = _make_pair("c", (0.4, 0.9), (0.8, 1.1))
    fe = pooled_effect(pair, "FE")
    collapsed, _ = mu_posterior(pair, HalfNormalPrior(1e-4))
    assert abs(collapsed.estimate - fe.estimate) <= 1e-3
    assert abs(collapsed.interval[0] - fe.interval[0]) <= 1e-3
    assert abs(collapsed.interval[1] - fe.interval[1]) <= 1e-3

    # wider thresholds give larger probabilities, for both conventions
    for _ in range(1000):
        s1, s2 = np.exp(rng.normal(0.0, 1.0, 2))
        tau = rng.uniform(0.0, 3.0)
        for convention in ("2tau2", "tau2"):
            p = {
                kind: event_probability(kind, s1, s2, tau, convention)
                for kind in EVENT_KINDS
            }
            assert p["overlap"] >= p["nonsig_q"] >= p["mutual_coverage"]
            assert p["nonsig_q"] >= p["zero_tau"]

    # quantile/CDF roundtrips
    probs = np.linspace(1e-6, 1.0 - 1e-6, 211)
    for p in probs:
        assert abs(gaussian_cdf(gaussian_quantile(p)) - p) <= 1e-8
        for df in (1, 2, 7):
            assert abs(chisq_cdf(chisq_quantile(p, df), df) - p) <= 1e-8
        for df in (1, 5):
            assert abs(student_t_cdf(student_t_quantile(p, df), df) - p) <= 1e-8


_CRITERIA = (
    (1, "indicator probability grid", criterion_01_probability_grid),
    (2, "convention adjudication by Monte Carlo", criterion_02_convention_adjudication),
    (3, "matched heterogeneity ratios", criterion_03_matched_ratios),
    (4, "chi-square p-value anchors", criterion_04_p_value_anchors),
    (5, "smallest p-value quantile", criterion_05_smallest_p_quantile),
    (6, "half-normal prior summaries", criterion_06_prior_summaries),
    (7, "width ratio at zero heterogeneity", criterion_07_width_ratio_law),
    (8, "glow dataset reproduction", criterion_08_glow_reproduction),
    (9, "respire dataset reproduction", criterion_09_respire_reproduction),
    (10, "corpus checks", criterion_10_corpus_checks),
    (11, "property suites", criterion_11_property_suites),
)


def _announce(number: int, label: str, body) -> None:
    try:
        note = body()
    except BaseException:
        print(f"criterion {number:2d} ({label}): FAIL")
        raise
    suffix = f"  [{note}]" if note else ""
    print(f"criterion {number:2d} ({label}): PASS{suffix}")


def test_criterion_01_probability_grid():
    _announce(1, "indicator probability grid", criterion_01_probability_grid)


def test_criterion_02_convention_adjudication():
    _announce(2, "convention adjudication by Monte Carlo", criterion_02_convention_adjudication)


def test_criterion_03_matched_ratios():
    _announce(3, "matched heterogeneity ratios", criterion_03_matched_ratios)


def test_criterion_04_p_value_anchors():
    _announce(4, "chi-square p-value anchors", criterion_04_p_value_anchors)


def test_criterion_05_smallest_p_quantile():
    _announce(5, "smallest p-value quantile", criterion_05_smallest_p_quantile)


def test_criterion_06_prior_summaries():
    _announce(6, "half-normal prior summaries", criterion_06_prior_summaries)


def test_criterion_07_width_ratio_law():
    _announce(7, "width ratio at zero heterogeneity", criterion_07_width_ratio_law)


def test_criterion_08_glow_reproduction():
    _announce(8, "glow dataset reproduction", criterion_08_glow_reproduction)


def test_criterion_09_respire_reproduction():
    _announce(9, "respire dataset reproduction", criterion_09_respire_reproduction)


def test_criterion_10_corpus_checks():
    _announce(10, "corpus checks", criterion_10_corpus_checks)


def test_criterion_11_property_suites():
    _announce(11, "property suites", criterion_11_property_suites)


if __name__ == "__main__":
    failures = 0
    for number, label, body in _CRITERIA:
        try:
            _announce(number, label, body)
        except BaseException as exc:  # keep going so every line prints
            failures += 1
            print(f"  -> {type(exc).__name__}: {exc}", file=sys.stderr)
    sys.exit(1 if failures else 0)
