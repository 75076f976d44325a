import math

import numpy as np
import pytest

from artcolony.stats import (
    adjusted_rand_index,
    bh_fdr,
    bootstrap_bca_ci,
    logistic_fit,
    mann_whitney_auc,
    normalized_mutual_information,
    p_value_from_null,
    pearson_r,
    permutation_test,
    quadratic_fit,
    welch_t,
)


def _shuffle_labels(data, rng):
    x, labels = data
    return x, rng.permutation(labels)


def _mean_diff(data):
    x, labels = data
    return float(x[labels == 1].mean() - x[labels == 0].mean())


class TestPermutation:
    def test_p_value_floor(self):
        # Convention p = (1 + exceed) / (N + 1): never exactly zero.
        rng = np.random.default_rng(0)
        x = np.concatenate([rng.normal(0, 1, 20), rng.normal(50, 1, 20)])
        labels = np.array([0] * 20 + [1] * 20)
        res = permutation_test(
            _mean_diff((x, labels)), _mean_diff, (x, labels), _shuffle_labels,
            n_resamples=400, seed=1,
        )
        assert res.p_value == pytest.approx(1.0 / 401.0)
        assert res.method == "permutation"
        assert res.n_resamples == 400

    def test_two_sided_centered(self):
        null = np.array([0.8, 0.9, 1.0, 1.1, 1.2])
        res = p_value_from_null(1.15, null, alternative="two-sided", center=1.0)
        # |1.15-1| = 0.15; exceeded by |0.8-1|=0.2 and matched/exceeded by 1.2,
        # 0.8 -> count = 2 -> p = 3/6.
        assert res.p_value == pytest.approx(3.0 / 6.0)

    def test_one_sided_greater(self):
        null = np.linspace(0.0, 1.0, 99)
        res = p_value_from_null(2.0, null, alternative="greater")
        assert res.p_value == pytest.approx(1.0 / 100.0)

    def test_rejects_unknown_alternative(self):
        with pytest.raises(ValueError):
            p_value_from_null(0.0, [0.0], alternative="sideways")

    def test_empty_null_rejected(self):
        with pytest.raises(ValueError):
            p_value_from_null(0.0, [])

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=30)
        labels = np.array([0, 1] * 15)
        args = (_mean_diff((x, labels)), _mean_diff, (x, labels), _shuffle_labels)
        a = permutation_test(*args, n_resamples=100, seed=9)
        b = permutation_test(*args, n_resamples=100, seed=9)
        assert a.p_value == b.p_value


class TestBootstrap:
    def test_interval_brackets_mean(self):
        rng = np.random.default_rng(4)
        data = rng.normal(5.0, 1.0, size=60)
        ci = bootstrap_bca_ci(data, lambda v: float(np.mean(v)), seed=2)
        assert ci.low < data.mean() < ci.high
        assert ci.method == "bca"
        assert ci.contains(5.0)

    def test_degenerate_sample(self):
        ci = bootstrap_bca_ci(np.full(10, 2.5), lambda v: float(np.mean(v)), seed=0)
        assert ci.low == ci.high == 2.5

    def test_needs_two_observations(self):
        with pytest.raises(ValueError):
            bootstrap_bca_ci([1.0], lambda v: float(np.mean(v)))

    def test_deterministic(self):
        data = np.random.default_rng(5).normal(size=40)
        a = bootstrap_bca_ci(data, lambda v: float(np.mean(v)), seed=8)
        b = bootstrap_bca_ci(data, lambda v: float(np.mean(v)), seed=8)
        assert (a.low, a.high) == (b.low, b.high)


class TestFdr:
    def test_hand_example(self):
        mask = bh_fdr([0.01, 0.02, 0.03, 0.5], q=0.05)
        assert mask.tolist() == [True, True, True, False]

    def test_empty(self):
        assert bh_fdr([]).size == 0

    def test_order_independent(self):
        p = [0.5, 0.01, 0.03, 0.02]
        mask = bh_fdr(p, q=0.05)
        assert mask.tolist() == [False, True, True, True]

    def test_rejects_bad_p(self):
        with pytest.raises(ValueError):
            bh_fdr([0.1, 1.5])


class TestCorrelation:
    def test_perfect_line(self):
        x = np.arange(10, dtype=float)
        res = pearson_r(x, 2 * x + 1)
        assert res.r == pytest.approx(1.0)
        assert res.p_value < 1e-8

    def test_constant_input_returns_none(self):
        assert pearson_r(np.ones(5), np.arange(5.0)) is None

    def test_too_short(self):
        with pytest.raises(ValueError):
            pearson_r([1.0, 2.0], [3.0, 4.0])

    def test_permutation_p(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=40)
        y = x + rng.normal(scale=0.1, size=40)
        res = pearson_r(x, y, n_resamples=200, seed=1)
        assert res.p_value == pytest.approx(1.0 / 201.0)


class TestWelch:
    def test_matches_scipy_convention(self):
        a = [1.0, 2.0, 3.0, 4.0]
        b = [1.5, 2.5, 3.5, 10.0]
        res = welch_t(a, b)
        assert 0.0 < res.p_value <= 1.0
        assert not res.degenerate

    def test_degenerate_equal(self):
        res = welch_t([2.0, 2.0], [2.0, 2.0])
        assert res.p_value == 1.0 and res.degenerate

    def test_degenerate_unequal(self):
        res = welch_t([2.0, 2.0], [3.0, 3.0])
        assert res.p_value == 0.0 and res.degenerate

    def test_needs_two_each(self):
        with pytest.raises(ValueError):
            welch_t([1.0], [1.0, 2.0])


class TestAuc:
    def test_separated(self):
        assert mann_whitney_auc([2.0, 3.0], [0.0, 1.0]) == 1.0

    def test_ties_half(self):
        assert mann_whitney_auc([1.0], [1.0]) == 0.5

    def test_antisymmetry(self):
        rng = np.random.default_rng(2)
        pos = rng.normal(0.5, 1.0, 25)
        neg = rng.normal(0.0, 1.0, 30)
        assert mann_whitney_auc(pos, neg) + mann_whitney_auc(neg, pos) == 1.0


class TestPartitionScores:
    def test_identical_partitions(self):
        a = [0, 0, 1, 1, 2, 2]
        assert normalized_mutual_information(a, a) == pytest.approx(1.0)
        assert adjusted_rand_index(a, a) == pytest.approx(1.0)

    def test_label_names_irrelevant(self):
        a = [0, 0, 1, 1]
        b = ["x", "x", "y", "y"]
        assert normalized_mutual_information(a, b) == pytest.approx(1.0)

    def test_single_cluster_zero_by_convention(self):
        assert normalized_mutual_information([0, 0, 0], [0, 1, 2]) == 0.0

    def test_independent_partitions_low(self):
        rng = np.random.default_rng(7)
        a = rng.integers(0, 4, 400)
        b = rng.integers(0, 4, 400)
        assert normalized_mutual_information(a, b) < 0.05
        assert abs(adjusted_rand_index(a, b)) < 0.05


class TestModels:
    def test_logistic_separable(self):
        rng = np.random.default_rng(0)
        x0 = rng.normal(-2.0, 0.3, size=(40, 2))
        x1 = rng.normal(2.0, 0.3, size=(40, 2))
        X = np.vstack([x0, x1])
        y = np.array([0] * 40 + [1] * 40)
        fit = logistic_fit(X, y)
        assert fit.auc == 1.0
        assert fit.coefficients.shape == (2,)

    def test_logistic_needs_both_classes(self):
        with pytest.raises(ValueError):
            logistic_fit(np.ones((5, 1)), np.ones(5))

    def test_quadratic_recovers_coefficients(self):
        x = np.linspace(-2, 2, 50)
        y = 1.0 + 0.5 * x - 2.0 * x**2
        fit = quadratic_fit(x, y)
        assert fit.beta0 == pytest.approx(1.0, abs=1e-8)
        assert fit.beta1 == pytest.approx(0.5, abs=1e-8)
        assert fit.beta2 == pytest.approx(-2.0, abs=1e-8)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-10)
        assert fit.vertex == pytest.approx(0.125)

    def test_quadratic_rejects_constant_x(self):
        with pytest.raises(ValueError):
            quadratic_fit(np.ones(10), np.arange(10.0))

    def test_quadratic_vertex_none_when_linear(self):
        x = np.linspace(0, 1, 30)
        fit = quadratic_fit(x, 3 * x)
        assert fit.beta2 == pytest.approx(0.0, abs=1e-9)


def test_results_serialize():
    res = welch_t([1.0, 2.0, 3.0], [4.0, 5.0, 6.0])
    d = res.to_dict()
    assert set(d) >= {"statistic", "p_value", "method"}
    ci = bootstrap_bca_ci(np.arange(10.0), lambda v: float(np.mean(v)), seed=0)
    assert set(ci.to_dict()) >= {"low", "high", "level", "method"}
