import numpy as np
import pytest

from artcolony.graph import build_interaction_graph
from artcolony.themes import (
    centrality_r0_correlation,
    detect_themes,
    kmeans,
    secondary_adopters,
    sensitivity_grid,
    silhouette_score,
    supercritical_fraction,
    theme_r0,
)

from conftest import make_dataset, ts

E1 = [1.0, 0.0, 0.0, 0.0]
E2 = [0.0, 1.0, 0.0, 0.0]


def _blobs(seed=0, n=30, centers=((0, 0), (10, 10), (-10, 10)), scale=0.5):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(c, scale, size=(n, 2)) for c in centers])
    labels = np.repeat(np.arange(len(centers)), n)
    return X, labels


class TestKmeans:
    def test_recovers_blobs(self):
        X, truth = _blobs()
        labels, centers = kmeans(X, 3, rng=1)
        assert centers.shape == (3, 2)
        # Each true blob maps to exactly one predicted cluster.
        for c in range(3):
            assert len(set(labels[truth == c])) == 1

    def test_k_one(self):
        X, _ = _blobs()
        labels, centers = kmeans(X, 1, rng=0)
        assert set(labels) == {0}
        np.testing.assert_allclose(centers[0], X.mean(axis=0))

    def test_k_bounds(self):
        X, _ = _blobs()
        with pytest.raises(ValueError):
            kmeans(X, 0)
        with pytest.raises(ValueError):
            kmeans(X, len(X) + 1)

    def test_deterministic(self):
        X, _ = _blobs(seed=3)
        la, ca = kmeans(X, 3, rng=7)
        lb, cb = kmeans(X, 3, rng=7)
        np.testing.assert_array_equal(la, lb)
        np.testing.assert_allclose(ca, cb)


class TestSilhouette:
    def test_separated_blobs_high(self):
        X, labels = _blobs()
        assert silhouette_score(X, labels) > 0.8

    def test_bad_partition_lower(self):
        X, labels = _blobs()
        rng = np.random.default_rng(0)
        bad = rng.permutation(labels)
        assert silhouette_score(X, bad) < silhouette_score(X, labels)

    def test_needs_two_clusters(self):
        X, _ = _blobs()
        with pytest.raises(ValueError):
            silhouette_score(X, np.zeros(len(X)))


def cascade_dataset():
    """One tight theme: index post by 'a' at t=0, then posts by b (+10h),
    c (+50h), and a again (+1h, same author so never an adopter)."""
    hour = 60
    return make_dataset(
        ["a", "b", "c"],
        [
            ("p1", "a", 0, E1),
            ("p2", "a", 1 * hour, E1),
            ("p3", "b", 10 * hour, E1),
            ("p4", "c", 50 * hour, E1),
            # far-away second theme so k-means separates cleanly
            ("q1", "b", 0, E2),
            ("q2", "c", 5 * hour, E2),
        ],
    )


class TestThemes:
    def test_detection_groups_by_embedding(self):
        d = cascade_dataset()
        themes = detect_themes(d, seed=0, posts_per_cluster=3)
        assert len(themes) == 2
        sizes = sorted(t.size for t in themes)
        assert sizes == [2, 4]
        for t in themes:
            assert t.index_post_id == t.post_ids[0]
            assert t.t0 == d.posts[t.index_post_id].created_at

    def test_theme_ids_deterministic(self):
        d = cascade_dataset()
        a = detect_themes(d, seed=0, posts_per_cluster=3)
        b = detect_themes(d, seed=0, posts_per_cluster=3)
        assert [t.theme_id for t in a] == [t.theme_id for t in b]
        assert [t.post_ids for t in a] == [t.post_ids for t in b]

    def test_empty_dataset(self):
        assert detect_themes(make_dataset(["a"], [])) == []


class TestCascades:
    def _main_theme(self, d):
        themes = detect_themes(d, seed=0, posts_per_cluster=3)
        return next(t for t in themes if t.size == 4)

    def test_adopters_by_window(self):
        d = cascade_dataset()
        theme = self._main_theme(d)
        assert secondary_adopters(theme, d, 24.0) == {"b"}
        assert secondary_adopters(theme, d, 72.0) == {"b", "c"}

    def test_index_author_never_adopts(self):
        d = cascade_dataset()
        theme = self._main_theme(d)
        assert "a" not in secondary_adopters(theme, d, 1000.0)

    def test_window_is_half_open_on_the_left(self):
        d = cascade_dataset()
        theme = self._main_theme(d)
        # b's post is exactly at +10h: included at window=10h (closed right)
        assert secondary_adopters(theme, d, 10.0) == {"b"}
        assert secondary_adopters(theme, d, 9.99) == set()

    def test_r0_scaling(self):
        d = cascade_dataset()
        theme = self._main_theme(d)
        res = theme_r0(theme, d, scaling=3.0, window_hours=72.0)
        assert res.r0 == pytest.approx(6.0)
        assert res.n_secondary == 2
        assert res.index_author == "a"

    def test_supercritical_fraction(self):
        d = cascade_dataset()
        theme = self._main_theme(d)
        r24 = theme_r0(theme, d, scaling=3.0, window_hours=24.0)
        assert supercritical_fraction([r24]) == 1.0
        r_small = theme_r0(theme, d, scaling=0.1, window_hours=24.0)
        assert supercritical_fraction([r_small]) == 0.0
        assert supercritical_fraction([]) is None


class TestSensitivity:
    def test_grid_monotone_in_window(self):
        d = cascade_dataset()
        themes = detect_themes(d, seed=0, posts_per_cluster=3)
        grid = sensitivity_grid(themes, d)
        arr = np.asarray(grid.fractions)
        assert arr.shape == (5, 4)
        assert np.all(np.diff(arr, axis=1) >= 0.0)

    def test_grid_hand_values(self):
        d = cascade_dataset()
        themes = detect_themes(d, seed=0, posts_per_cluster=3)
        grid = sensitivity_grid(themes, d, s_values=(3.0,),
                                windows_hours=(24.0, 72.0))
        # 24h: main theme 1 adopter (3*1>1), small theme 1 adopter -> 1.0
        # 72h: both supercritical -> 1.0
        assert grid.fractions == ((1.0, 1.0),)
        low = sensitivity_grid(themes, d, s_values=(0.2,),
                               windows_hours=(24.0, 72.0))
        # 0.2*1 < 1 but 0.2*2 < 1 too at 24h for both; at 72h main has 2
        # adopters (0.4 < 1) -> still 0
        assert low.fractions == ((0.0, 0.0),)

    def test_to_dict_shape(self):
        d = cascade_dataset()
        themes = detect_themes(d, seed=0, posts_per_cluster=3)
        g = sensitivity_grid(themes, d).to_dict()
        assert set(g) == {"s_values", "windows_hours", "supercritical_fractions"}


class TestCentrality:
    def test_correlation_computed(self):
        d = make_dataset(
            ["a", "b", "c", "d"],
            [(f"p{i}", "a", i, E1) for i in range(3)],
            interactions=[("b", "a", "like", 1, "p0"),
                          ("c", "a", "like", 2, "p0"),
                          ("d", "b", "like", 3, None)],
        )
        g = build_interaction_graph(d)
        themes = detect_themes(d, seed=0, posts_per_cluster=1)
        results = [theme_r0(t, d) for t in themes]
        res = centrality_r0_correlation(results, g)
        assert res is None or -1.0 <= res.r <= 1.0

    def test_too_few_themes_none(self):
        d = cascade_dataset()
        g = build_interaction_graph(d)
        assert centrality_r0_correlation([], g) is None
