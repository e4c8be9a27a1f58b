import numpy as np
import pytest

from laughline.kinematics import KinematicSample
from laughline.metrics import auroc
from laughline.onset import (
    DEFAULT_RATIOS,
    FEATURE_SETS,
    HISTORY_DIM,
    VISION_DIM,
    AnchorSample,
    BenchShow,
    ClassifierConfig,
    balanced_sample_weights,
    collect_anchor_table,
    fit_pca,
    group_split,
    history_features,
    run_ablation,
    sample_anchors,
    train_classifier,
    vision_features,
)
from laughline.synth import generate_corpus
from laughline.timeline import SHOT_LABELS, ShotFrame

from conftest import make_event, make_grid_blocks, random_events


def timeline_with_events(events, n_blocks=1, width=60.0):
    blocks = make_grid_blocks(n_blocks, width=width)
    from laughline.timeline import build_timeline

    return build_timeline("show", blocks, laugh_events=events)


class TestSampleAnchors:
    def test_event_neighborhood_labels(self):
        tl = timeline_with_events([make_event(10.0, 12.0)])
        anchors = {a.t: a.label for a in sample_anchors(tl, step=1.0, delta=2.0)}
        assert 10.0 not in anchors and 11.0 not in anchors  # inside the event
        assert anchors[9.0] is True          # onset 10 in [9, 11)
        assert anchors[8.0] is False         # onset 10 outside [8, 10)
        assert anchors[7.0] is False
        assert anchors[12.0] is False        # event end is outside the event

    def test_no_events_all_negative(self):
        tl = timeline_with_events([])
        anchors = sample_anchors(tl)
        assert len(anchors) == 60
        assert not any(a.label for a in anchors)

    def test_random_layout_matches_rasterized_oracle(self, rng):
        for _ in range(5):
            events = random_events(rng, t_max=120.0, n=12)
            tl = timeline_with_events(events, n_blocks=2)
            anchors = {a.t: a.label for a in sample_anchors(tl, step=1.0, delta=2.0)}

            # oracle: 1 ms boolean grid over [0, 120)
            grid = np.zeros(120_000, dtype=bool)
            onset_ms = set()
            for e in events:
                s, eend = int(round(e.start * 1000)), int(round(e.end * 1000))
                grid[s:eend] = True
                onset_ms.add(s)
            for t in range(120):
                t_ms = t * 1000
                if grid[t_ms]:
                    assert float(t) not in anchors
                else:
                    want = any(t_ms <= o < t_ms + 2000 for o in onset_ms)
                    assert anchors[float(t)] == want

    def test_labels_invariant_under_event_permutation(self, rng):
        events = random_events(rng, t_max=100.0, n=10)
        tl_a = timeline_with_events(events, n_blocks=2)
        shuffled = list(events)
        rng.shuffle(shuffled)
        tl_b = timeline_with_events(shuffled, n_blocks=2)
        a = [(x.t, x.label) for x in sample_anchors(tl_a)]
        b = [(x.t, x.label) for x in sample_anchors(tl_b)]
        assert a == b

    def test_feature_length_invariant(self):
        with pytest.raises(Exception):
            AnchorSample(show_id="s", t=0.0, label=False, history=(1.0,) * 3)


class TestHistoryFeatures:
    def test_empty_history_sentinels(self):
        feats = history_features([], t=50.0)
        assert list(feats) == [0, 0, 0, 0, 0, 0, 0, 0, 600.0, 600.0]

    def test_single_event_fixture(self):
        t = 100.0
        feats = history_features([make_event(t - 5, t - 3, confidence=0.8)], t=t)
        count, rate, cov, max_dur, mean_c, max_c, cov2, cov5, s_on, s_end = feats
        assert count == 1
        assert rate == pytest.approx(0.1)
        assert cov == pytest.approx(0.2)
        assert max_dur == pytest.approx(2.0)
        assert mean_c == pytest.approx(0.8)
        assert max_c == pytest.approx(0.8)
        assert cov2 == 0.0
        assert cov5 == pytest.approx(2.0 / 5.0)
        assert s_on == pytest.approx(5.0)
        assert s_end == pytest.approx(3.0)

    def test_two_abutting_events_match_scan_oracle(self):
        t = 50.0
        events = [
            make_event(t - 6, t - 4, confidence=0.4),
            make_event(t - 4, t - 1, confidence=0.9),
        ]
        feats = history_features(events, t=t)
        assert feats[0] == 2
        assert feats[2] == pytest.approx((2 + 3) / 10)
        assert feats[3] == pytest.approx(3.0)
        assert feats[4] == pytest.approx(0.65)
        assert feats[5] == pytest.approx(0.9)
        assert feats[6] == pytest.approx(1.0 / 2.0)   # [t-2, t) overlaps [t-4, t-1) by 1
        assert feats[7] == pytest.approx(4.0 / 5.0)   # [t-5, t): [t-5,t-4) + [t-4,t-1)
        assert feats[8] == pytest.approx(4.0)
        assert feats[9] == pytest.approx(1.0)

    def test_random_events_match_scan_oracle(self, rng):
        events = random_events(rng, t_max=300.0, n=25)
        for t in rng.uniform(10, 300, size=40):
            t = float(t)
            if any(e.start <= t < e.end for e in events):
                continue
            feats = history_features(events, t=t)
            window = [e for e in events if e.start < t and e.end > t - 10.0]
            assert feats[0] == len(window)
            cov = sum(min(e.end, t) - max(e.start, t - 10.0) for e in window) / 10.0
            assert feats[2] == pytest.approx(cov, abs=1e-12)
            onsets = [e.start for e in events if e.start <= t]
            want_on = min(t - max(onsets), 600.0) if onsets else 600.0
            assert feats[8] == pytest.approx(want_on, abs=1e-12)
            ends = [e.end for e in events if e.end <= t]
            want_end = min(t - max(ends), 600.0) if ends else 600.0
            assert feats[9] == pytest.approx(want_end, abs=1e-12)

    def test_causality_future_events_ignored(self, rng):
        past = random_events(rng, t_max=90.0, n=8)
        t = 100.0
        base = history_features(past, t=t)
        with_future = sorted(
            past + [make_event(150.0, 151.0), make_event(200.0, 230.0)], key=lambda e: e.start
        )
        assert list(history_features(with_future, t=t)) == list(base)

    def test_since_values_capped(self):
        feats = history_features([make_event(1.0, 2.0)], t=2000.0)
        assert feats[8] == 600.0
        assert feats[9] == 600.0


def shot(t, label="full_shot", score=0.9):
    ids = {label: i for i, label in enumerate(SHOT_LABELS)}
    return ShotFrame(time=float(t), label=label, class_id=ids[label], score=score)


class TestVisionFeatures:
    def test_all_full_shot_no_detection(self):
        shots = [shot(t) for t in range(20)]
        kin = [KinematicSample(time=float(t)) for t in range(20)]
        feats = vision_features(shots, kin, t=15.0)
        assert list(feats[:6]) == [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        assert feats[6] == 0.0                      # no label changes
        assert feats[7] == pytest.approx(0.9)       # mean confidence
        assert list(feats[8:]) == [0.0] * 12        # pose stats + detection rate

    def test_alternating_labels_change_rate(self):
        shots = [shot(t, "full_shot" if t % 2 else "medium_shot") for t in range(10)]
        feats = vision_features(shots, [], t=10.0)
        assert feats[6] == pytest.approx(9 / 10)

    def test_empty_window_is_zeros(self):
        feats = vision_features([], [], t=50.0)
        assert list(feats) == [0.0] * VISION_DIM

    def test_mixed_fixture_matches_flat_oracle(self, rng):
        shots = [
            shot(t, str(rng.choice(SHOT_LABELS)), score=float(rng.uniform(0.5, 1)))
            for t in range(30)
        ]
        kin = [
            KinematicSample(
                time=float(t),
                arm_spread=float(rng.uniform(1, 2)) if rng.random() > 0.3 else None,
                kinetic_energy=float(rng.uniform(0, 1)) if rng.random() > 0.3 else None,
                trunk_lean=float(rng.uniform(-20, 20)) if rng.random() > 0.3 else None,
            )
            for t in range(30)
        ]
        t = 25.0
        feats = vision_features(shots, kin, t=t)

        win_shots = [s for s in shots if t - 10 <= s.time < t]
        for i, label in enumerate(SHOT_LABELS):
            assert feats[i] == pytest.approx(
                sum(1 for s in win_shots if s.label == label) / len(win_shots)
            )
        assert feats[6] == pytest.approx(
            sum(1 for a, b in zip(win_shots, win_shots[1:]) if a.label != b.label)
            / len(win_shots)
        )
        assert feats[7] == pytest.approx(np.mean([s.score for s in win_shots]))

        win_kin = [k for k in kin if t - 10 <= k.time < t]
        arm = [(k.time, k.arm_spread) for k in win_kin if k.arm_spread is not None]
        if arm:
            vals = np.array([v for _, v in arm])
            assert feats[8] == pytest.approx(vals.mean())
            assert feats[9] == pytest.approx(vals.std())
            assert feats[10] == pytest.approx(vals.max())
            times = np.array([x for x, _ in arm])
            slope = np.polyfit(times, vals, 1)[0] if len(arm) >= 2 else 0.0
            assert feats[11] == pytest.approx(slope, abs=1e-9)
        det = sum(1 for k in win_kin if k.any_present()) / len(win_kin)
        assert feats[19] == pytest.approx(det)


class TestPca:
    def test_exact_subspace_reconstruction(self, rng):
        basis = rng.normal(size=(3, 20))
        coeffs = rng.normal(size=(40, 3))
        X = coeffs @ basis + rng.normal(size=20)  # affine 3-dim subspace
        pca = fit_pca(X, k=3)
        Z = pca.transform(X)
        recon = Z @ pca.components + pca.mean
        assert np.allclose(recon, X, atol=1e-9)

    def test_isotropic_variances_roughly_equal(self, rng):
        X = rng.normal(size=(5000, 4))
        pca = fit_pca(X, k=4)
        ratios = pca.explained_variance / pca.explained_variance.mean()
        assert np.all(np.abs(ratios - 1.0) < 0.15)

    def test_matches_covariance_eigendecomposition(self, rng):
        X = rng.normal(size=(50, 8)) * rng.uniform(0.5, 3.0, size=8)
        pca = fit_pca(X, k=3)
        # oracle: dense eigendecomposition of the explicit covariance
        cov = np.cov(X, rowvar=False, ddof=1)
        eigvals = np.sort(np.linalg.eigvalsh(cov))[::-1]
        assert np.allclose(pca.explained_variance, eigvals[:3], atol=1e-9)
        proj = pca.transform(X)
        assert np.allclose(proj.var(axis=0, ddof=1), eigvals[:3], atol=1e-9)

    def test_sign_is_deterministic(self, rng):
        X = rng.normal(size=(30, 6))
        pca = fit_pca(X, k=4)
        for comp in pca.components:
            assert comp[np.argmax(np.abs(comp))] > 0

    def test_rank_deficient_reduces_k(self, rng):
        X = np.tile(rng.normal(size=(1, 10)), (5, 1)) + np.outer(
            rng.normal(size=5), rng.normal(size=10)
        )
        pca = fit_pca(X, k=8)
        assert pca.k <= 2

    def test_k_validation(self, rng):
        with pytest.raises(ValueError):
            fit_pca(rng.normal(size=(10, 4)), k=0)


class TestGroupSplit:
    def test_full_scale_sizes(self):
        ids = [f"s{i}" for i in range(90)]
        split = group_split(ids, ratios=DEFAULT_RATIOS, seed=1)
        assert len(split.fold("train")) == 62
        assert len(split.fold("val")) == 14
        assert len(split.fold("test")) == 14

    def test_deterministic(self):
        ids = [f"s{i}" for i in range(30)]
        a = group_split(ids, seed=5)
        b = group_split(list(reversed(ids)), seed=5)
        assert a == b

    def test_nine_show_rounding(self):
        split = group_split([f"s{i}" for i in range(9)], ratios=(2 / 3, 1 / 6, 1 / 6), seed=0)
        sizes = (len(split.fold("train")), len(split.fold("val")), len(split.fold("test")))
        assert sizes in ((6, 1, 2), (6, 2, 1))

    def test_every_show_exactly_one_fold(self, rng):
        ids = [f"s{i}" for i in range(25)]
        split = group_split(ids, seed=3)
        seen = split.fold("train") + split.fold("val") + split.fold("test")
        assert sorted(seen) == sorted(ids)

    def test_too_few_shows(self):
        with pytest.raises(ValueError):
            group_split(["a", "b"], seed=0)

    def test_ratio_validation(self):
        with pytest.raises(ValueError):
            group_split(["a", "b", "c", "d"], ratios=(0.5, 0.2, 0.2), seed=0)


class TestTrainClassifier:
    def test_separable_toy_set(self, rng):
        X = np.vstack([rng.normal(0, 0.3, size=(50, 2)), rng.normal(4, 0.3, size=(50, 2))])
        y = np.array([0] * 50 + [1] * 50)
        model = train_classifier(X, y, ClassifierConfig(random_state=0))
        assert auroc(model.predict_scores(X), y) == 1.0

    def test_permuted_labels_chance_level(self, rng):
        X = rng.normal(size=(10_000, 4))
        y = rng.integers(0, 2, size=10_000)  # independent of X by construction
        X_train, y_train = X[:8000], y[:8000]
        X_val, y_val = X[8000:], y[8000:]
        model = train_classifier(X_train, y_train, ClassifierConfig(random_state=0))
        val = auroc(model.predict_scores(X_val), y_val)
        assert 0.45 <= val <= 0.55

    def test_duplication_equals_double_weight(self):
        # hand-traceable 20-sample fixture: doubling positives must equal
        # doubling their weights, bin edges included
        rng = np.random.default_rng(4)
        X = rng.normal(size=(20, 3))
        y = np.array([1, 0] * 10)

        import numpy as _np

        from sklearn.ensemble import HistGradientBoostingClassifier

        params = dict(
            loss="log_loss", learning_rate=0.1, max_iter=20, max_leaf_nodes=31,
            min_samples_leaf=1, max_bins=255, early_stopping=False, random_state=0,
        )
        dup_X = _np.vstack([X, X[y == 1]])
        dup_y = _np.concatenate([y, y[y == 1]])
        m_dup = HistGradientBoostingClassifier(**params).fit(dup_X, dup_y)

        w = _np.where(y == 1, 2.0, 1.0)
        m_w = HistGradientBoostingClassifier(**params).fit(X, y, sample_weight=w)

        probe = rng.normal(size=(50, 3))
        assert np.array_equal(m_dup.predict_proba(probe), m_w.predict_proba(probe))

    def test_balanced_weights(self):
        y = np.array([1, 0, 0, 0])
        w = balanced_sample_weights(y)
        assert w[0] == pytest.approx(2.0)
        assert w[1] == pytest.approx(2.0 / 3.0)
        assert np.isclose(w.sum(), 4.0)

    def test_single_class_error(self, rng):
        with pytest.raises(ValueError):
            train_classifier(rng.normal(size=(10, 2)), np.ones(10), ClassifierConfig())

    def test_logistic_baseline_same_interface(self, rng):
        X = np.vstack([rng.normal(0, 1, size=(60, 2)), rng.normal(3, 1, size=(60, 2))])
        y = np.array([0] * 60 + [1] * 60)
        model = train_classifier(X, y, ClassifierConfig(kind="logistic"))
        scores = model.predict_scores(X)
        assert scores.shape == (120,)
        assert ((0 <= scores) & (scores <= 1)).all()
        blob = model.to_json()
        assert blob["kind"] == "logistic" and len(blob["coef"]) == 2

    def test_gbdt_tree_export(self, rng):
        X = rng.normal(size=(80, 3))
        y = (X[:, 0] > 0).astype(int)
        model = train_classifier(X, y, ClassifierConfig(max_iter=5))
        blob = model.to_json()
        assert blob["kind"] == "hist_gbdt"
        assert len(blob["trees"]) == 5
        assert all(len(node) == 6 for tree in blob["trees"] for node in tree)


@pytest.fixture(scope="module")
def corpus():
    pairs = generate_corpus(6, seed=7, duration=300.0)
    return [BenchShow.from_timeline(tl, kin) for tl, kin in pairs]


class TestAblation:
    def test_five_rows_and_shapes(self, corpus):
        result = run_ablation(corpus, seed=1, ratios=(4 / 6, 1 / 6, 1 / 6))
        assert tuple(result.reports) == FEATURE_SETS
        assert result.n_anchors > 0
        assert 0 < result.positive_rate < 1

    def test_table_feature_widths(self, corpus):
        table = collect_anchor_table(corpus)
        assert table.history.shape[1] == HISTORY_DIM
        assert table.embeddings.shape[1] == 384
        assert table.vision.shape[1] == VISION_DIM

    def test_deterministic_reports(self, corpus):
        a = run_ablation(corpus, seed=3, ratios=(4 / 6, 1 / 6, 1 / 6))
        b = run_ablation(corpus, seed=3, ratios=(4 / 6, 1 / 6, 1 / 6))
        for name in FEATURE_SETS:
            assert a.reports[name] == b.reports[name]
        assert a.split == b.split

    def test_split_integrity(self, corpus):
        result = run_ablation(corpus, seed=2, ratios=(4 / 6, 1 / 6, 1 / 6))
        folds = result.split.as_dict()
        all_ids = sorted(s.show_id for s in corpus)
        assert sorted(folds["train"] + folds["val"] + folds["test"]) == all_ids

    def test_pca_leak_guard(self, corpus):
        # PCA fit on train-only embeddings must differ from a leaky fit
        table = collect_anchor_table(corpus)
        split = group_split([s.show_id for s in corpus], ratios=(4 / 6, 1 / 6, 1 / 6), seed=2)
        fold = np.array([split.assignment[sid] for sid in table.show_ids])
        train_only = fit_pca(table.embeddings[(fold == "train") & table.has_embedding], k=8)
        leaky = fit_pca(table.embeddings[table.has_embedding], k=8)
        assert not np.allclose(train_only.components, leaky.components)
        assert not np.allclose(train_only.mean, leaky.mean)
