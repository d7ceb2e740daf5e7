import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose

from qmetro.design import (
    AVERAGE,
    WORST,
    apportion,
    average_case,
    average_case_lp,
    evaluate_curve,
    round_counts,
    worst_case,
)
from qmetro.fisher import ConfigGrid, FisherTable, f_max

tables = st.integers(1, 6).flatmap(
    lambda n: st.integers(1, 6).flatmap(
        lambda m: arrays(float, (n, m), elements=st.floats(0, 4, allow_nan=False, width=32))
    )
)


def make_table(G, prior=None):
    G = np.asarray(G, dtype=float)
    n, m = G.shape
    prior = np.full(m, 1 / m) if prior is None else np.asarray(prior, float) / np.sum(prior)
    return FisherTable(G, np.linspace(0.3, 1.2, m), prior, np.zeros(G.shape, bool),
                       ConfigGrid(np.linspace(0, np.pi, n), np.array([0.0])))


class TestAverageCase:
    def test_single_theta_is_argmax(self):
        d = average_case(make_table([[1.0], [4.0], [2.0]]))
        assert_allclose(d.weights, [0, 1, 0])
        assert d.objective == 4.0
        assert d.kind == AVERAGE

    def test_identical_rows_pick_lowest(self):
        d = average_case(make_table([[1.0, 2.0], [3.0, 1.0], [3.0, 1.0]]))
        assert d.support[0].index == 1

    def test_support_labels(self):
        d = average_case(make_table([[1.0, 2.0], [3.0, 1.0]]))
        (s,) = d.support
        assert (s.index, s.phi, s.beta, s.weight) == (1, np.pi, 0.0, 1.0)

    @given(tables, st.floats(0.1, 100))
    def test_prior_scaling_invariance(self, G, s):
        prior = np.linspace(1, 2, G.shape[1])
        a = average_case(make_table(G, prior))
        b = average_case(make_table(G, s * prior))
        assert a.support[0].index == b.support[0].index

    @given(tables)
    def test_matches_lp(self, G):
        t = make_table(G)
        assert average_case_lp(t) == pytest.approx(average_case(t).objective, abs=1e-10)


class TestWorstCase:
    def test_symmetric(self):
        d = worst_case(make_table([[2.0, 0.0], [0.0, 2.0]]))
        assert_allclose(d.weights, [0.5, 0.5])
        assert d.objective == pytest.approx(1.0)
        assert d.kind == WORST

    def test_single_theta_unit_vector(self):
        d = worst_case(make_table([[1.0], [3.0], [2.0]]))
        assert_allclose(d.weights, [0, 1, 0])

    @given(tables)
    def test_curve_minimum_is_objective(self, G):
        t = make_table(G)
        d = worst_case(t)
        assert evaluate_curve(t, d.weights).min() == pytest.approx(d.objective, abs=1e-9)
        assert d.weights.sum() == pytest.approx(1.0, abs=1e-10)
        assert {s.index for s in d.support} == set(np.nonzero(d.weights > 1e-8)[0])

    @given(tables)
    def test_worst_below_average_under_uniform_prior(self, G):
        t = make_table(G)
        assert worst_case(t).objective <= average_case(t).objective + 1e-9

    @given(tables)
    def test_curves_below_fmax(self, G):
        t = make_table(G)
        fmax = np.array([f_max(t, r)[0] for r in range(t.n_theta)])
        for d in (average_case(t), worst_case(t)):
            assert np.all(evaluate_curve(t, d.weights) <= fmax + 1e-9)


class TestCurves:
    def test_unit_weight_gives_row(self):
        G = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
        assert_allclose(evaluate_curve(make_table(G), [0, 1]), G[1])

    def test_average_consistency(self):
        t = make_table([[1.0, 2.0, 3.0], [4.0, 0.0, 1.0]], prior=[1, 2, 3])
        d = average_case(t)
        assert evaluate_curve(t, d.weights) @ t.prior == pytest.approx(d.objective, abs=1e-12)

    def test_rejects_non_distribution(self):
        with pytest.raises(ValueError):
            evaluate_curve(make_table([[1.0], [2.0]]), [0.5, 0.6])


class TestRounding:
    def test_unit(self):
        assert apportion([1.0, 0.0], 100).tolist() == [100, 0]

    def test_largest_remainder(self):
        assert apportion([0.57, 0.43], 10).tolist() == [6, 4]

    def test_thirds_tie_lowest_index(self):
        assert apportion([1 / 3, 1 / 3, 1 / 3], 10).tolist() == [4, 3, 3]

    @given(arrays(float, st.integers(1, 8), elements=st.floats(0, 1)), st.integers(1, 1000))
    def test_sums_to_total(self, w, total):
        if w.sum() <= 0:
            return
        w = w / w.sum()
        counts = apportion(w, total)
        assert counts.sum() == total and np.all(counts >= 0)
        assert np.all(np.abs(counts - w * total) < 1.0 + 1e-9)

    @given(tables, st.integers(1, 50))
    def test_sandwich(self, G, total):
        t = make_table(G)
        for d, kind in ((average_case(t), AVERAGE), (worst_case(t), WORST)):
            c = round_counts(d.weights, total, t, kind)
            assert c.counts.sum() == total
            assert c.lower_bound <= c.upper_bound + 1e-9
            assert c.upper_bound == pytest.approx(d.objective, abs=1e-9)

    def test_rejects_zero_total(self):
        with pytest.raises(ValueError):
            apportion([1.0], 0)
