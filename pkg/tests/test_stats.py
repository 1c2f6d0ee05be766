import math
import random
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from loopsight.stats import (
    ConfusionMatrix,
    betainc_reg,
    classification_report,
    confusion,
    kolmogorov_sf,
    ks_p_value,
    ks_two_sample,
    median,
    summarize_runs,
    t_cdf,
    t_confidence_interval,
    t_interval_from_moments,
    t_quantile,
)

from reference_values import KS_ACCURACY, KS_LOSS, REPORTS, T_INTERVALS, rendered_rows


class TestConfusion:
    def test_perfect(self):
        y = [0] * 300 + [1] * 300
        cm = confusion(y, y)
        assert cm.fp == cm.fn == 0 and cm.total == 600

    def test_counts(self):
        cm = confusion([0, 0, 1, 1, 1], [0, 1, 0, 1, 1])
        assert (cm.tn, cm.fp, cm.fn, cm.tp) == (1, 1, 1, 2)
        assert cm.accuracy == 3 / 5

    def test_errors(self):
        with pytest.raises(ValueError, match="length mismatch"):
            confusion([0, 1], [0])
        with pytest.raises(ValueError):
            confusion([0, 2], [0, 1])
        with pytest.raises(ValueError):
            ConfusionMatrix(-1, 0, 0, 0)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=60))
    def test_against_sklearn(self, pairs):
        from sklearn.metrics import confusion_matrix

        t, p = zip(*pairs)
        cm = confusion(t, p)
        assert [[cm.tn, cm.fp], [cm.fn, cm.tp]] == confusion_matrix(t, p, labels=[0, 1]).tolist()


class TestReport:
    @pytest.mark.parametrize("name", sorted(REPORTS))
    def test_reference_tables(self, name):
        cm, expected = REPORTS[name]
        assert rendered_rows(classification_report(ConfusionMatrix(*cm))) == expected

    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
    def test_against_sklearn(self, tn, fp, fn, tp):
        from sklearn.metrics import precision_recall_fscore_support

        assume(tn + fp + fn + tp > 0)
        cm = ConfusionMatrix(tn, fp, fn, tp)
        y_true = [0] * (tn + fp) + [1] * (fn + tp)
        y_pred = [0] * tn + [1] * fp + [0] * fn + [1] * tp
        rep = classification_report(cm)
        p, r, f, s = precision_recall_fscore_support(y_true, y_pred, labels=[0, 1], zero_division=0)
        for c in (0, 1):
            m = rep.per_class[c]
            assert math.isclose(m.precision, p[c], abs_tol=1e-12)
            assert math.isclose(m.recall, r[c], abs_tol=1e-12)
            assert math.isclose(m.f1, f[c], abs_tol=1e-12)
            assert m.support == s[c]
        for avg, mine in (("macro", rep.macro), ("weighted", rep.weighted)):
            pa, ra, fa, _ = precision_recall_fscore_support(y_true, y_pred, labels=[0, 1], average=avg, zero_division=0)
            assert math.isclose(mine.precision, pa, abs_tol=1e-12)
            assert math.isclose(mine.recall, ra, abs_tol=1e-12)
            assert math.isclose(mine.f1, fa, abs_tol=1e-12)
        values = [v for m in (*rep.per_class, rep.macro, rep.weighted) for v in (m.precision, m.recall, m.f1)]
        assert all(0 <= v <= 1 for v in values)
        assert rep.per_class[0].support + rep.per_class[1].support == cm.total

    def test_render(self):
        text = classification_report(ConfusionMatrix(312, 11, 8, 269)).render()
        assert "0.96" in text.splitlines()[2] and text.splitlines()[3].split()[-2:] == ["0.97", "600"]


class TestKS:
    def test_identical(self):
        r = ks_two_sample([1, 2, 3, 3], [3, 1, 3, 2])
        assert r.statistic == 0 and r.p_value == 1

    def test_disjoint(self):
        assert ks_two_sample([1, 2, 3], [4, 5]).statistic == 1

    def test_reference_accuracy(self):
        d, n, m, (lo, hi) = KS_ACCURACY
        r = ks_p_value(d, n, m)
        assert r.method == "exact" and lo <= r.p_value <= hi
        assert not r.significant()

    def test_reference_loss(self):
        d, n, m, bound = KS_LOSS
        r = ks_p_value(d, n, m)
        assert r.p_value < bound and r.significant()

    def test_empty(self):
        with pytest.raises(ValueError):
            ks_two_sample([], [1.0])

    @settings(max_examples=80, deadline=None)
    @given(
        st.lists(st.integers(0, 12), min_size=1, max_size=30),
        st.lists(st.integers(0, 12), min_size=1, max_size=30),
    )
    def test_exact_matches_scipy_with_ties(self, a, b):
        ours = ks_two_sample(a, b, method="exact")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            ref = sps.ks_2samp(a, b, method="exact")
        # scipy falls back to its asymptotic series when its own exact count fails.
        assume(not caught)
        assert math.isclose(ours.statistic, ref.statistic, abs_tol=1e-12)
        # scipy's exact path counts lattice paths in floating point
        assert math.isclose(ours.p_value, ref.pvalue, rel_tol=1e-6, abs_tol=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(-5, 5), min_size=1, max_size=25), st.lists(st.floats(-5, 5), min_size=1, max_size=25))
    def test_symmetry(self, a, b):
        assert ks_two_sample(a, b) == ks_two_sample(b, a)

    def test_asymptotic_tracks_exact_on_attainable_values(self):
        # 50 random statistics in [0.05, 0.5] at n = m = 100, drawn from the
        # attainable lattice k/100 so both methods see the same D.
        rng = random.Random(17)
        for k in (rng.randint(5, 50) for _ in range(50)):
            d = k / 100
            exact = ks_p_value(d, 100, 100, "exact").p_value
            approx = ks_p_value(d, 100, 100, "asymptotic").p_value
            assert abs(exact - approx) < 0.01, (d, exact, approx)

    def test_method_switch(self):
        assert ks_p_value(0.2, 100, 100).method == "exact"
        assert ks_p_value(0.2, 100, 101).method == "asymptotic"

    def test_kolmogorov_against_scipy(self):
        for lam in (0.3, 0.5, 0.8, 1.0, 1.36, 2.0, 3.0):
            assert math.isclose(kolmogorov_sf(lam), sps.kstwobign.sf(lam), rel_tol=1e-9, abs_tol=1e-15)


class TestT:
    @pytest.mark.parametrize("df", [1, 2, 5, 29, 100])
    def test_quantile_against_scipy(self, df):
        for q in (0.6, 0.9, 0.975, 0.995):
            assert math.isclose(t_quantile(q, df), sps.t.ppf(q, df), rel_tol=1e-9)
            assert math.isclose(t_cdf(sps.t.ppf(q, df), df), q, rel_tol=1e-10)

    def test_betainc_against_scipy(self):
        from scipy.special import betainc

        for a, b, x in ((0.5, 14.5, 0.2), (2, 3, 0.7), (14.5, 0.5, 0.999), (1, 1, 0.3)):
            assert math.isclose(betainc_reg(a, b, x), betainc(a, b, x), rel_tol=1e-10)

    @pytest.mark.parametrize("args,expected", T_INTERVALS)
    def test_reference_intervals(self, args, expected):
        # Compared as rendered two-decimal values, in hundredths.
        lo, hi = (round(100 * v) for v in t_interval_from_moments(*args))
        assert abs(lo - round(100 * expected[0])) <= 1 and abs(hi - round(100 * expected[1])) <= 1

    def test_constant_sample(self):
        assert t_confidence_interval([4.0] * 5) == (4.0, 4.0)

    def test_too_small(self):
        with pytest.raises(ValueError):
            t_confidence_interval([1.0])

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31), st.integers(3, 40))
    def test_matches_scipy_interval(self, seed, n):
        xs = np.random.default_rng(seed).normal(90, 5, n)
        lo, hi = t_confidence_interval(xs)
        ref = sps.t.interval(0.95, n - 1, loc=xs.mean(), scale=sps.sem(xs))
        assert np.allclose((lo, hi), ref)

    def test_width_shrinks_like_inverse_sqrt_n(self):
        # For a fixed spread the half-width times sqrt(n) approaches 1.96 * s.
        widths = [t_interval_from_moments(0, 1, n)[1] * math.sqrt(n) for n in (30, 300, 3000, 30000)]
        assert widths == sorted(widths, reverse=True)
        assert abs(widths[-1] - 1.959964) < 1e-3


class TestSummaries:
    def test_two_point(self):
        s = summarize_runs([90, 94])
        assert (s.mean, s.median) == (92, 92) and math.isclose(s.std, math.sqrt(8))

    def test_loss_orientation(self):
        s = summarize_runs([0.3, 0.1, 0.2], higher_is_better=False)
        assert s.best == 0.1 and s.worst == 0.3

    def test_errors(self):
        with pytest.raises(ValueError):
            summarize_runs([1.0])
        with pytest.raises(ValueError):
            median([])

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(0, 100), min_size=2, max_size=40), st.randoms(use_true_random=False))
    def test_invariants_and_order(self, xs, rnd):
        s = summarize_runs(xs)
        ys = list(xs)
        rnd.shuffle(ys)
        t = summarize_runs(ys)
        assert s.worst <= s.median <= s.best
        assert s.std >= 0
        assert s.ci95[0] <= s.mean + 1e-9 and s.mean - 1e-9 <= s.ci95[1]
        assert math.isclose(s.mean, t.mean, abs_tol=1e-9) and (s.median, s.best, s.worst) == (t.median, t.best, t.worst)
        assert s.median == float(np.median(xs))
