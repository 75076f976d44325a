import numpy as np
import pytest

from artcolony.chains import (
    chain_coherence,
    chain_engagement_stats,
    chain_null_distribution,
    chain_style_diversity,
    extract_chains,
    lag_k_coherence,
)

from conftest import make_dataset, unit_vec

E1 = [1.0, 0.0, 0.0, 0.0]
E2 = [0.0, 1.0, 0.0, 0.0]
E3 = [0.0, 0.0, 1.0, 0.0]
E12 = [1.0, 1.0, 0.0, 0.0]


def branched_dataset():
    """One post with an image-reply tree:

        p1 -- r1(img) -- r2(img) -- r5(img)
                      \\- r6(img)
           -- r3(text) -- r4(img, unreachable through the text break)
    """
    return make_dataset(
        ["a", "b", "c"],
        [("p1", "a", 0, E1)],
        replies=[
            ("r1", "p1", "b", 10, "", E2),
            ("r2", "r1", "c", 20, "", E3),
            ("r5", "r2", "a", 30, "", E12),
            ("r6", "r1", "a", 25, "", E1),
            ("r3", "p1", "b", 15, "plain text", None),
            ("r4", "r3", "c", 40, "", E2),
        ],
    )


class TestExtraction:
    def test_maximal_branching_paths(self):
        chains = extract_chains(branched_dataset())
        ids = sorted(tuple(r.reply_id for r in c.replies) for c in chains)
        assert ids == [("r1", "r2", "r5"), ("r1", "r6")]

    def test_text_reply_breaks_path(self):
        chains = extract_chains(branched_dataset())
        seen = {r.reply_id for c in chains for r in c.replies}
        assert "r4" not in seen and "r3" not in seen

    def test_min_depth_filters(self):
        chains = extract_chains(branched_dataset(), min_depth=3)
        assert [c.depth for c in chains] == [3]

    def test_depth_one_excluded_by_default(self):
        d = make_dataset(["a", "b"], [("p1", "a", 0, E1)],
                         replies=[("r1", "p1", "b", 5, "", E2)])
        assert extract_chains(d) == []
        assert len(extract_chains(d, min_depth=1)) == 1

    def test_children_visited_in_time_order(self):
        d = make_dataset(
            ["a", "b"],
            [("p1", "a", 0, E1)],
            replies=[
                ("r9", "p1", "b", 10, "", E2),
                ("r1", "p1", "b", 20, "", E3),
                ("r2", "r9", "a", 30, "", E1),
                ("r3", "r1", "a", 40, "", E1),
            ],
        )
        chains = extract_chains(d)
        heads = [c.replies[0].reply_id for c in chains]
        assert heads == ["r9", "r1"]  # earliest child first

    def test_chain_properties(self):
        chains = extract_chains(branched_dataset())
        deep = next(c for c in chains if c.depth == 3)
        assert deep.chain_id == "p1:r5"
        assert deep.authors == ["a", "b", "c", "a"]
        assert deep.distinct_agents() == 3
        assert deep.embeddings.shape == (4, 4)


class TestCoherence:
    def test_hand_value(self):
        chains = extract_chains(branched_dataset())
        deep = next(c for c in chains if c.depth == 3)
        # adjacent cosines: e1.e2=0, e2.e3=0, e3.e12=0
        assert chain_coherence(deep) == pytest.approx(0.0)

    def test_aligned_chain(self):
        d = make_dataset(
            ["a", "b"],
            [("p1", "a", 0, E1)],
            replies=[("r1", "p1", "b", 5, "", E1),
                     ("r2", "r1", "a", 9, "", E1)],
        )
        chain = extract_chains(d)[0]
        assert chain_coherence(chain) == pytest.approx(1.0)
        assert chain_style_diversity(chain) == pytest.approx(0.0)

    def test_cross_author_masking(self):
        d = make_dataset(
            ["a", "b"],
            [("p1", "a", 0, E1)],
            replies=[("r1", "p1", "a", 5, "", E2),   # same author as root
                     ("r2", "r1", "b", 9, "", E2)],  # cross author, cos=1
        )
        chain = extract_chains(d)[0]
        assert chain_coherence(chain, include_same_author=False) == pytest.approx(1.0)

    def test_all_same_author_returns_none(self):
        d = make_dataset(
            ["a"],
            [("p1", "a", 0, E1)],
            replies=[("r1", "p1", "a", 5, "", E2),
                     ("r2", "r1", "a", 9, "", E3)],
        )
        chain = extract_chains(d)[0]
        assert chain_coherence(chain, include_same_author=False) is None

    def test_diversity_hand_value(self):
        chains = extract_chains(branched_dataset())
        deep = next(c for c in chains if c.depth == 3)
        # pairs: (e1,e2) (e1,e3) (e1,u12) (e2,e3) (e2,u12) (e3,u12)
        s = np.sqrt(0.5)
        expected = np.mean([1.0, 1.0, 1.0 - s, 1.0, 1.0 - s, 1.0])
        assert chain_style_diversity(deep) == pytest.approx(expected)


class TestNull:
    def _pool(self, n=40, dim=6, seed=0):
        rng = np.random.default_rng(seed)
        mat = rng.standard_normal((n, dim))
        return mat / np.linalg.norm(mat, axis=1, keepdims=True)

    def test_coherence_null_centers_near_zero(self):
        pool = self._pool()
        null = chain_null_distribution(pool, [2, 3, 2], n_resamples=400, seed=1)
        assert abs(null.mean) < 0.1
        assert null.resample_means.shape == (400,)
        assert null.statistic == "coherence"

    def test_diversity_null_centers_near_one(self):
        pool = self._pool()
        null = chain_null_distribution(pool, [2, 3], statistic="diversity",
                                       n_resamples=300, seed=2)
        assert abs(null.mean - 1.0) < 0.15

    def test_deterministic(self):
        pool = self._pool()
        a = chain_null_distribution(pool, [2, 2], n_resamples=50, seed=5)
        b = chain_null_distribution(pool, [2, 2], n_resamples=50, seed=5)
        np.testing.assert_array_equal(a.resample_means, b.resample_means)

    def test_rejects_unknown_statistic(self):
        with pytest.raises(ValueError):
            chain_null_distribution(self._pool(), [2], statistic="entropy")

    def test_rejects_empty_depths(self):
        with pytest.raises(ValueError):
            chain_null_distribution(self._pool(), [])


class TestLag:
    def test_planted_lag_signal(self):
        d = make_dataset(
            ["a", "b"],
            [("p1", "a", 0, E1)],
            replies=[("r1", "p1", "b", 5, "", E1),
                     ("r2", "r1", "a", 9, "", E1),
                     ("r3", "r2", "b", 12, "", E1)],
        )
        chains = extract_chains(d)
        rng = np.random.default_rng(0)
        pool = rng.standard_normal((50, 4))
        pool /= np.linalg.norm(pool, axis=1, keepdims=True)
        lag = lag_k_coherence(chains, 1, pool, n_resamples=200, seed=3)
        assert lag.observed_mean == pytest.approx(1.0)
        assert lag.delta > 0.5
        assert lag.p_value < 0.05

    def test_no_deep_chains_returns_none(self):
        assert lag_k_coherence([], 1, np.eye(3)) is None

    def test_rejects_lag_zero(self):
        with pytest.raises(ValueError):
            lag_k_coherence([], 0, np.eye(3))


class TestEngagement:
    def test_means_and_ratio(self):
        d = make_dataset(
            ["a", "b"],
            [("p1", "a", 0, E1, 4, 2),    # chain root, engagement 6
             ("p2", "a", 1, E2, 1, 1),    # not a root, engagement 2
             ("p3", "b", 2, E3, 0, 0)],
            replies=[("r1", "p1", "b", 5, "", E2),
                     ("r2", "r1", "a", 9, "", E3)],
        )
        chains = extract_chains(d)
        stats = chain_engagement_stats(d, chains)
        assert stats.in_chain_mean == pytest.approx(6.0)
        assert stats.out_chain_mean == pytest.approx(1.0)
        assert stats.ratio == pytest.approx(6.0)
        assert (stats.n_in, stats.n_out) == (1, 2)

    def test_empty_dataset(self):
        d = make_dataset(["a"], [])
        stats = chain_engagement_stats(d, [])
        assert stats.in_chain_mean is None and stats.ratio is None
