"""Corpus-level descriptive summaries and p-value uniformity checks.

Frozen values were computed with mpmath (Beta tail identity) and
scipy.stats.kstest in asymptotic mode, independently of the package.
"""
import math
import warnings

import numpy as np
import pytest
from scipy import stats

from twinmeta.empirical import CorpusSummary, summarize_corpus, uniformity_diagnostics
from twinmeta.errors import DomainError, ValidationError
from twinmeta.events import EVENT_KINDS, event_threshold
from twinmeta.freq import tau_estimate_k2
from twinmeta.model import StudyPair, StudyResult, TwinCorpus


def make_pair(pair_id, ys, ss, sizes=(None, None)):
    return StudyPair(
        pair_id=pair_id,
        studies=(
            StudyResult(label="a", estimate=ys[0], std_err=ss[0],
                        sample_size=sizes[0]),
            StudyResult(label="b", estimate=ys[1], std_err=ss[1],
                        sample_size=sizes[1]),
        ),
    )


# unit standard errors so the thresholds are z-multiples:
# overlap 3.9199, nonsig_q 2.7718, mutual_coverage 1.9600, zero_tau 1.4142
CLASSIFIED = TwinCorpus(pairs=(
    make_pair("both-same", (5.0, 6.0), (1.0, 1.0)),        # diff 1.0
    make_pair("none-opposite", (0.5, -0.3), (1.0, 1.0)),   # diff 0.8
    make_pair("one-same", (3.0, 0.5), (1.0, 1.0)),         # diff 2.5
    make_pair("both-opposite", (3.0, -3.0), (1.0, 1.0)),   # diff 6.0
))


class TestSummarizeCorpus:
    def test_event_frequencies_on_classified_corpus(self):
        summary = summarize_corpus(CLASSIFIED)
        assert summary.n_pairs == 4
        assert summary.event_frequencies == {
            "overlap": 3 / 4,
            "nonsig_q": 3 / 4,
            "mutual_coverage": 2 / 4,
            "zero_tau": 2 / 4,
        }

    def test_concordance_cells(self):
        summary = summarize_corpus(CLASSIFIED)
        assert summary.concordance == {
            "same": (0, 1, 1),
            "opposite": (1, 0, 1),
        }

    def test_concordance_sums_to_n_pairs(self):
        summary = summarize_corpus(CLASSIFIED)
        total = sum(sum(cells) for cells in summary.concordance.values())
        assert total == summary.n_pairs

    def test_q_pvalues_in_corpus_order(self):
        from twinmeta.freq import cochran_q

        summary = summarize_corpus(CLASSIFIED)
        assert len(summary.q_pvalues) == 4
        for pair, p in zip(CLASSIFIED.pairs, summary.q_pvalues):
            assert p == cochran_q(pair).p_value

    def test_identical_estimates_fire_everything(self):
        corpus = TwinCorpus(pairs=tuple(
            make_pair(f"t{i}", (v, v), (0.8, 1.3))
            for i, v in enumerate((-2.0, 0.0, 0.7, 11.0))
        ))
        summary = summarize_corpus(corpus)
        assert all(f == 1.0 for f in summary.event_frequencies.values())
        for pair in corpus.pairs:
            assert tau_estimate_k2(pair).tau_hat == 0.0

    def test_se_ratio_median_and_max(self):
        corpus = TwinCorpus(pairs=(
            make_pair("r2", (0.0, 0.1), (1.0, 2.0)),
            make_pair("r5", (0.0, 0.1), (5.0, 1.0)),
            make_pair("r125", (0.0, 0.1), (1.0, 1.25)),
        ))
        summary = summarize_corpus(corpus)
        assert summary.se_ratio == {"median": 2.0, "max": 5.0}

    def test_size_ratio_when_sizes_complete(self):
        corpus = TwinCorpus(pairs=(
            make_pair("a", (0.0, 0.1), (1.0, 1.0), sizes=(100, 50)),
            make_pair("b", (0.0, 0.1), (1.0, 1.0), sizes=(40, 200)),
            make_pair("c", (0.0, 0.1), (1.0, 1.0), sizes=(80, 64)),
        ))
        summary = summarize_corpus(corpus)
        assert summary.size_ratio == {"median": 2.0, "max": 5.0}
        assert summary.notes == ()

    def test_missing_sizes_omit_ratio_with_note(self):
        corpus = TwinCorpus(pairs=(
            make_pair("full", (0.0, 0.1), (1.0, 1.0), sizes=(100, 50)),
            make_pair("gappy", (0.0, 0.1), (1.0, 1.0), sizes=(100, None)),
        ))
        summary = summarize_corpus(corpus)
        assert summary.size_ratio is None
        assert len(summary.notes) == 1
        assert "gappy" in summary.notes[0]

    def test_accepts_plain_iterable(self):
        summary = summarize_corpus(list(CLASSIFIED.pairs))
        assert isinstance(summary, CorpusSummary)
        assert summary.n_pairs == 4

    def test_rejects_triplet(self):
        triple = StudyPair(
            pair_id="triple",
            studies=tuple(
                StudyResult(label=f"s{i}", estimate=0.0, std_err=1.0)
                for i in range(3)
            ),
        )
        with pytest.raises(ValidationError):
            summarize_corpus([triple])

    def test_rejects_empty_corpus(self):
        with pytest.raises(ValidationError):
            summarize_corpus([])

    def test_rejects_duplicate_ids(self):
        pair = make_pair("dup", (0.0, 0.1), (1.0, 1.0))
        with pytest.raises(ValidationError):
            summarize_corpus([pair, pair])


class TestZeroTauEquivalence:
    def test_indicator_iff_truncated_estimate(self):
        # zero_tau fires exactly when the closed-form tau-hat truncates
        rng = np.random.default_rng(4821)
        for i in range(200):
            s1, s2 = rng.uniform(0.2, 3.0, size=2)
            y1 = rng.normal(0.0, 2.0)
            y2 = y1 + rng.normal(0.0, 1.5 * math.sqrt(s1 * s1 + s2 * s2))
            pair = make_pair(f"rnd{i}", (y1, y2), (s1, s2))
            fires = abs(y2 - y1) <= event_threshold("zero_tau", s1, s2)
            truncated = tau_estimate_k2(pair).tau_hat == 0.0
            assert fires == truncated

    def test_boundary_pair_counts_as_firing(self):
        # 3-4-5 triple: |y2-y1| equals sqrt(s1^2+s2^2) exactly
        pair = make_pair("boundary", (0.0, 5.0), (3.0, 4.0))
        assert tau_estimate_k2(pair).tau_hat == 0.0
        summary = summarize_corpus([pair])
        assert summary.event_frequencies["zero_tau"] == 1.0


class TestUniformityDiagnostics:
    def test_frozen_minimum_quantile(self):
        # 1 - (1 - 0.0177)^26 = 0.37143854533421021 (mpmath, 20 digits)
        others = np.linspace(0.1, 0.9, 25)
        out = uniformity_diagnostics([0.0177, *others])
        assert out["min_p"] == 0.0177
        assert out["min_p_quantile"] == pytest.approx(
            0.37143854533421021, rel=1e-13)

    def test_equispaced_ks_statistic(self):
        for n in (5, 26, 100):
            pv = np.arange(1, n + 1) / (n + 1)
            out = uniformity_diagnostics(pv)
            assert out["ks_d"] == pytest.approx(1.0 / (n + 1), abs=1e-15)
            assert out["ks_p"] > 0.999

    def test_single_half(self):
        out = uniformity_diagnostics([0.5])
        assert out["min_p_quantile"] == 0.5

    def test_matches_scipy_asymptotic(self):
        rng = np.random.default_rng(99)
        pv = rng.uniform(size=40)
        out = uniformity_diagnostics(pv)
        ref = stats.kstest(pv, "uniform", mode="asymp")
        assert out["ks_d"] == pytest.approx(ref.statistic, rel=1e-12)
        assert out["ks_p"] == pytest.approx(ref.pvalue, rel=1e-9)

    def test_quantile_identity_and_monotone(self):
        # grid capped at 0.2 so 1-(1-p)^n stays clear of saturating at 1.0
        n = 26
        others = list(np.linspace(0.3, 0.999, n - 1))
        prev = -1.0
        for p in np.linspace(1e-6, 0.2, 400):
            out = uniformity_diagnostics([p, *others])
            direct = 1.0 - (1.0 - p) ** n
            assert abs(out["min_p_quantile"] - direct) <= 1e-12
            assert out["min_p_quantile"] > prev
            prev = out["min_p_quantile"]

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            uniformity_diagnostics([])

    def test_out_of_range_rejected(self):
        with pytest.raises(DomainError):
            uniformity_diagnostics([0.2, 1.2])
        with pytest.raises(DomainError):
            uniformity_diagnostics([-0.1])

    def test_ties_warn(self):
        with pytest.warns(UserWarning, match="tied"):
            uniformity_diagnostics([0.5, 0.5, 0.7])

    def test_untied_does_not_warn(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            uniformity_diagnostics([0.2, 0.5, 0.7])


class TestHomogeneousCalibration:
    def test_ks_rejection_rate_under_null(self):
        # homogeneous pairs: q p-values are uniform, so the corpus-level
        # KS test should reject near its nominal 5% rate
        rng = np.random.default_rng(2)
        rejected = 0
        reps = 200
        for _ in range(reps):
            pairs = []
            for j in range(20):
                mu = rng.normal(0.0, 1.0)
                s1, s2 = rng.uniform(0.3, 2.0, size=2)
                pairs.append(make_pair(
                    f"h{j}",
                    (mu + s1 * rng.standard_normal(),
                     mu + s2 * rng.standard_normal()),
                    (s1, s2),
                ))
            summary = summarize_corpus(pairs)
            out = uniformity_diagnostics(summary.q_pvalues)
            if out["ks_p"] < 0.05:
                rejected += 1
        assert 0.01 <= rejected / reps <= 0.09
