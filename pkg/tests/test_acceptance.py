"""Acceptance suite: one test per criterion, one printed PASS/FAIL line each.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion
lines. Corpus-scale headline numbers from the source material (e.g. AUROC
0.647, r = -0.75, r = +0.28) depend on the unreleased 90-show corpus and
unknown seeds; they are declared NOT reproducible at desk scale and are
excluded from pass/fail (criterion 11 prints the declaration).
"""

import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

import laughline.cli as cli
from laughline.kinematics import KinematicSample, arm_spread, kinetic_energy, smooth, trunk_lean
from laughline.laughter import coverage
from laughline.metrics import auprc, auroc
from laughline.onset import (
    BenchShow,
    ClassifierConfig,
    collect_anchor_table,
    fit_pca,
    group_split,
    run_ablation,
    train_classifier,
)
from laughline.subtitles import build_blocks, parse_srt, parse_vtt
from laughline.synth import generate_corpus, write_raw_corpus
from laughline.timeline import (
    EMBEDDING_DIM,
    PoseFrame,
    TimedSpan,
    TopicBlock,
    assign_by_containment,
    deserialize_show,
)
from laughline.topics import (
    TopicAssignment,
    TopicDescriptor,
    TopicModelDiagnostics,
    centroid_reassign,
    diagnostics,
    gap_fill,
    npmi_coherence,
)

from conftest import make_event
from test_kinematics import energy_oracle, grid_frame, lean_oracle, arm_spread_oracle, scaled, translated
from test_kinematics import smooth_oracle
from test_metrics import pairwise_auroc_oracle
from test_subtitles import write_srt, write_vtt


@contextmanager
def criterion(number: int, name: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number:02d} FAIL - {name}")
        raise
    print(f"ACCEPTANCE {number:02d} PASS - {name}")


def test_criterion_01_containment_partition():
    with criterion(1, "containment partition on 100 synthetic shows"):
        rng = np.random.default_rng(101)
        t0 = time.perf_counter()
        for _ in range(100):
            n_blocks = int(rng.integers(3, 12))
            blocks = [
                TopicBlock(block_id=i, span=TimedSpan(i * 60.0, (i + 1) * 60.0),
                           topic_id=0, text="")
                for i in range(n_blocks)
            ]
            horizon = n_blocks * 60.0
            n_events = int(rng.poisson(80))
            starts = rng.uniform(0.0, horizon, size=n_events)
            events = [make_event(float(s), float(s) + 0.5) for s in starts]
            nested, overflow = assign_by_containment(events, blocks, lambda e: e.start)

            # exhaustive-scan oracle, exact equality
            assert overflow == []
            assert sum(len(n) for n in nested) == len(events)
            for i, block in enumerate(blocks):
                want = {id(e) for e in events if block.span.start <= e.start < block.span.end}
                assert {id(e) for e in nested[i]} == want
        elapsed = time.perf_counter() - t0
        assert elapsed < 5.0, f"took {elapsed:.2f}s"


def test_criterion_02_kinematics_oracles():
    with criterion(2, "kinematic signals match brute force; invariances exact"):
        rng = np.random.default_rng(202)
        for _ in range(1000):
            prev = grid_frame(rng, 0.0)
            curr = grid_frame(rng, 1.0)

            a, ao = arm_spread(curr), arm_spread_oracle(curr)
            t, to = trunk_lean(curr), lean_oracle(curr)
            e, eo = kinetic_energy(curr, prev), energy_oracle(curr, prev)
            for got, want in ((a, ao), (t, to), (e, eo)):
                assert (got is None) == (want is None)
                if got is not None:
                    assert abs(got - want) <= 1e-12

            # scale/translation invariance, exact
            assert arm_spread(scaled(curr, 2.0)) == a
            assert trunk_lean(scaled(curr, 2.0)) == t
            assert kinetic_energy(scaled(curr, 2.0), scaled(prev, 2.0)) == e
            assert arm_spread(translated(curr, 256.0, 512.0)) == a
            assert trunk_lean(translated(curr, 256.0, 512.0)) == t
            assert kinetic_energy(translated(curr, 256.0, 512.0),
                                  translated(prev, 256.0, 512.0)) == e

        # invalid joints never contribute: moving an invalid joint's phantom
        # coordinates cannot change any signal
        base = grid_frame(rng, 0.0)
        pts = list(base.keypoints)
        pts[0] = (0.0, 0.0)
        f1 = PoseFrame(time=0.0, has_detection=True, bbox=base.bbox, keypoints=tuple(pts))
        prev = grid_frame(rng, -1.0)
        assert kinetic_energy(f1, prev) == energy_oracle(f1, prev)
        # wrists invalid -> arm spread absent
        pts_w = list(base.keypoints)
        pts_w[9] = (0.0, 0.0)
        assert arm_spread(PoseFrame(0.0, True, base.bbox, tuple(pts_w))) is None


def test_criterion_03_smoothing_equivalence():
    with criterion(3, "streaming smoothing equals O(n*w) oracle"):
        rng = np.random.default_rng(303)
        for _ in range(10):
            n = int(rng.integers(40, 200))
            samples = []
            for t in range(n):
                samples.append(
                    KinematicSample(
                        time=float(t),
                        arm_spread=float(rng.uniform(0, 4)) if rng.random() > 0.25 else None,
                        kinetic_energy=float(rng.uniform(0, 2)) if rng.random() > 0.25 else None,
                        trunk_lean=float(rng.uniform(-60, 60)) if rng.random() > 0.25 else None,
                    )
                )
            got = smooth(samples, 30.0)
            want = smooth_oracle(samples, 30.0)
            for g, w in zip(got, want):
                for name in ("arm_spread", "kinetic_energy", "trunk_lean"):
                    gv, wv = getattr(g, name), getattr(w, name)
                    assert (gv is None) == (wv is None)
                    if gv is not None:
                        assert abs(gv - wv) <= 1e-12


def test_criterion_04_npmi():
    with criterion(4, "NPMI matches hand counts; independence and association limits"):
        docs = [
            ["cat", "dog"],
            ["cat", "dog", "fish"],
            ["cat"],
            ["dog"],
            ["fish", "bird"],
            ["bird"],
        ]
        # hand counts: P(cat)=3/6, P(dog)=3/6, P(cat,dog)=2/6
        got = npmi_coherence([TopicDescriptor(0, ("cat", "dog"))], docs)
        want = math.log((2 / 6) / ((3 / 6) * (3 / 6))) / (-math.log(2 / 6))
        assert abs(got - want) <= 1e-12
        # P(fish)=2/6, P(bird)=2/6, P(fish,bird)=1/6
        got2 = npmi_coherence([TopicDescriptor(0, ("fish", "bird"))], docs)
        want2 = math.log((1 / 6) / ((2 / 6) * (2 / 6))) / (-math.log(1 / 6))
        assert abs(got2 - want2) <= 1e-12

        # perfect association -> 1
        perfect_docs = [["a", "b"], ["a", "b"], ["c"], ["c"], ["c"], ["c"]]
        assert abs(npmi_coherence([TopicDescriptor(0, ("a", "b"))], perfect_docs) - 1.0) <= 1e-12
        # exact independence -> 0
        indep_docs = [["w1", "w2"], ["w1", "w2"], ["w1"], ["w2"], ["w2"], ["x"]]
        assert abs(npmi_coherence([TopicDescriptor(0, ("w1", "w2"))], indep_docs)) <= 1e-12


def test_criterion_05_diagnostics():
    with criterion(5, "diagnostics values and validity gate"):
        counts = [(0, 50), (1, 30), (2, 20)]
        assignments = [
            TopicAssignment(block_index=i + t * 100, topic_id=t)
            for t, n in counts
            for i in range(n)
        ]
        d = diagnostics(assignments)
        assert d.s_max == 0.5
        # oracle (hand computation of the stated formula): the source text's
        # "0.9433" is an arithmetic slip; -(0.5 ln 0.5 + 0.3 ln 0.3 + 0.2 ln 0.2)/ln 3
        # evaluates to 0.93723..., which is what the gate pins at the stated 1e-4
        want = -(0.5 * math.log(0.5) + 0.3 * math.log(0.3) + 0.2 * math.log(0.2)) / math.log(3)
        assert abs(want - 0.9372305632161295) <= 1e-15
        assert abs(d.h_norm - want) <= 1e-4

        uniform = [TopicAssignment(block_index=i, topic_id=i % 4) for i in range(80)]
        assert diagnostics(uniform).h_norm == pytest.approx(1.0, abs=1e-12)

        assert not TopicModelDiagnostics(k=9, s_max=0.2, h_norm=0.9).valid
        assert not TopicModelDiagnostics(k=12, s_max=0.36, h_norm=0.9).valid
        assert TopicModelDiagnostics(k=10, s_max=0.35, h_norm=0.9).valid


def test_criterion_06_postprocessing():
    with criterion(6, "centroid reassignment oracle and gap filling"):
        rng = np.random.default_rng(606)

        def unit():
            v = rng.normal(size=EMBEDDING_DIM)
            return tuple(v / np.linalg.norm(v))

        for _ in range(3):
            centroids = [unit() for _ in range(5)]
            descriptors = [
                TopicDescriptor(t, ("w",), centroid=c) for t, c in enumerate(centroids)
            ]
            outliers = [TopicAssignment(i, -1, unit()) for i in range(20)]
            out = centroid_reassign(outliers, descriptors, threshold=0.30)
            for before, after in zip(outliers, out):
                sims = [float(np.dot(before.embedding, c)) for c in centroids]
                best = int(np.argmax(sims))
                want = best if sims[best] >= 0.30 else -1
                assert after.topic_id == want

        assert gap_fill([4, -1, 4]) == [4, 4, 4]
        assert gap_fill([4, -1, 7]) == [4, -1, 7]
        assert gap_fill([4, -1, -1, 4]) == [4, -1, -1, 4]


def test_criterion_07_coverage():
    with criterion(7, "coverage matches the published example and rasterization"):
        got = coverage([make_event(3482.4, 3485.6)], TimedSpan(3480.0, 3540.0))
        assert abs(got - 3.2 / 60.0) <= 1e-9

        rng = np.random.default_rng(707)
        span = TimedSpan(0.0, 80.0)
        for _ in range(5):
            bounds = np.sort(rng.choice(np.arange(0, 95_000), size=40, replace=False)) / 1000.0
            events = [make_event(bounds[2 * i], bounds[2 * i + 1]) for i in range(20)]
            got = coverage(events, span)
            grid = np.zeros(80_000, dtype=bool)
            for e in events:
                s = int(round(max(e.start, 0.0) * 1000))
                t = int(round(min(e.end, 80.0) * 1000))
                grid[s:t] = True
            assert abs(got - grid.mean()) <= 1e-3


def test_criterion_08_metrics():
    with criterion(8, "AUROC pairwise oracle; AUPRC limits"):
        rng = np.random.default_rng(808)
        for _ in range(50):
            n = int(rng.integers(6, 80))
            scores = rng.choice(np.linspace(0, 1, 9), size=n)
            labels = rng.integers(0, 2, size=n)
            if labels.all() or not labels.any():
                labels[0] = 1 - labels[0]
            assert auroc(scores, labels) == pairwise_auroc_oracle(list(scores), list(labels))

        labels = [1, 0, 0, 1, 0, 0, 0, 1, 0, 0]
        assert auprc([0.7] * 10, labels) == 0.3  # exactly the positive rate
        assert auroc([0.1, 0.4, 0.8, 0.9], [0, 0, 1, 1]) == 1.0
        assert auprc([0.1, 0.4, 0.8, 0.9], [0, 0, 1, 1]) == 1.0


def test_criterion_09_benchmark_determinism(tmp_path):
    with criterion(9, "bit-identical ablation, split hygiene, PCA leak guard"):
        raw = tmp_path / "raw"
        write_raw_corpus(raw, n_shows=4, seed=99, duration=240.0)
        pre = tmp_path / "pre"
        assert cli.main(["align", "--corpus", str(raw), "--output", str(pre)]) == 0
        assert cli.main(["kinematics", "--corpus", str(raw), "--output", str(pre)]) == 0
        outs = []
        for name in ("run1", "run2"):
            out = tmp_path / name
            code = cli.main([
                "--seed", "11", "onset-bench",
                "--corpus", str(pre / "aligned"),
                "--kinematics", str(pre / "kinematics"),
                "--output", str(out),
            ])
            assert code == 0
            outs.append((out / "bench" / "ablation.csv").read_bytes())
        assert outs[0] == outs[1]

        split = json.loads((tmp_path / "run1" / "bench" / "split.json").read_text())
        folds = split["train"] + split["val"] + split["test"]
        assert sorted(folds) == sorted(set(folds))
        assert len(folds) == 4

        # leak guard: excluding test embeddings must change the PCA transform
        pairs = generate_corpus(5, seed=31, duration=180.0)
        shows = [BenchShow.from_timeline(tl, kin) for tl, kin in pairs]
        table = collect_anchor_table(shows)
        split_obj = group_split([s.show_id for s in shows], ratios=(3 / 5, 1 / 5, 1 / 5), seed=1)
        fold = np.array([split_obj.assignment[sid] for sid in table.show_ids])
        clean = fit_pca(table.embeddings[(fold == "train") & table.has_embedding], k=8)
        leaky = fit_pca(table.embeddings[table.has_embedding], k=8)
        assert not np.allclose(clean.components, leaky.components)


def test_criterion_10_synthetic_signal_recovery():
    with criterion(10, "history signal recovered; permuted control at chance"):
        t0 = time.perf_counter()
        pairs = generate_corpus(10, seed=42, duration=1200.0, burst_prob=0.7)
        shows = [BenchShow.from_timeline(tl, kin) for tl, kin in pairs]

        result = run_ablation(
            shows, seed=7, feature_sets=("history", "all"),
            config=ClassifierConfig(random_state=7),
        )
        history_auroc = result.reports["history"].auroc
        all_auroc = result.reports["all"].auroc
        assert history_auroc >= 0.75, f"history-only AUROC {history_auroc:.3f}"
        assert all_auroc >= history_auroc - 0.01, f"all {all_auroc:.3f} vs {history_auroc:.3f}"

        # permuted-label control: break the feature-label link in train/val
        table = collect_anchor_table(shows)
        fold = np.array([result.split.assignment[sid] for sid in table.show_ids])
        rng = np.random.default_rng(7)
        labels = table.labels.copy()
        for f in ("train", "val"):
            idx = np.where(fold == f)[0]
            labels[idx] = labels[rng.permutation(idx)]
        model = train_classifier(
            table.history[fold == "train"], labels[fold == "train"],
            ClassifierConfig(random_state=7),
        )
        control = auroc(model.predict_scores(table.history[fold == "test"]),
                        table.labels[fold == "test"])
        assert control <= 0.55, f"permuted control AUROC {control:.3f}"

        elapsed = time.perf_counter() - t0
        assert elapsed < 120.0, f"took {elapsed:.1f}s"
        print(
            f"  [criterion 10] history={history_auroc:.3f} all={all_auroc:.3f} "
            f"permuted={control:.3f} ({elapsed:.1f}s)",
            end=" ",
        )


def test_criterion_11_structural_shapes(tmp_path):
    with criterion(11, "published table/JSON shapes reproduced structurally"):
        raw = tmp_path / "raw"
        write_raw_corpus(raw, n_shows=4, seed=23, duration=240.0)
        out = tmp_path / "out"
        assert cli.main(["all", "--corpus", str(raw), "--output", str(out)]) == 0

        rows = (out / "bench" / "ablation.csv").read_text().splitlines()
        header = rows[0].split(",")
        assert [r.split(",")[0] for r in rows[1:]] == [
            "history", "text", "vision", "text+vision", "all",
        ]
        assert "positive_rate" in header  # the 0.170 / 285,916-anchors figures are checkable

        for path in sorted((out / "aligned").glob("*.json")):
            deserialize_show(path.read_bytes())  # full schema validation

        pairs = generate_corpus(3, seed=5, duration=120.0)
        table = collect_anchor_table([BenchShow.from_timeline(tl, k) for tl, k in pairs])
        assert table.history.shape[1] == 10
        assert table.vision.shape[1] == 20
        pca = fit_pca(np.random.default_rng(0).normal(size=(200, EMBEDDING_DIM)), k=64)
        assert pca.transform(np.zeros((1, EMBEDDING_DIM))).shape == (1, 64)

        print(
            "  [criterion 11] corpus-scale headline metrics (AUROC 0.647, r=-0.75, r=+0.28) "
            "are NOT reproducible at desk scale and are excluded from pass/fail",
            end=" ",
        )


def test_criterion_12_subtitle_conservation():
    with criterion(12, "subtitle conservation, format equivalence, block rule"):
        rng = np.random.default_rng(1212)
        for _ in range(20):
            cues = []
            t = 0.0
            for i in range(int(rng.integers(3, 50))):
                t += float(rng.uniform(0.2, 6.0))
                dur = float(rng.uniform(0.5, 5.0))
                words = " ".join(f"w{int(w)}" for w in rng.integers(0, 99, size=4))
                cues.append((round(t, 3), round(t + dur, 3), words))
                t += dur
            srt_cues = parse_srt(write_srt(cues))
            vtt_cues = parse_vtt(write_vtt(cues))
            assert srt_cues == vtt_cues  # cross-format equivalence, exact

            blocks = build_blocks(srt_cues, target_duration=60.0, stopwords=())
            assert " ".join(b.text for b in blocks) == " ".join(c.clean_text for c in srt_cues)

        fixture = [
            (0.0, 2.0, "a"), (30.0, 32.0, "b"), (59.0, 63.0, "c"), (61.0, 64.0, "d"),
        ]
        blocks = build_blocks(parse_srt(write_srt(fixture)), 60.0, stopwords=())
        assert [b.text for b in blocks] == ["a b c", "d"]
