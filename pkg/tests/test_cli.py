import json
import os

import numpy as np
import pytest

from laughline.cli import EXIT_INPUT, EXIT_INVARIANT, EXIT_OK, main
from laughline.synth import write_raw_corpus
from laughline.timeline import EMBEDDING_DIM, deserialize_show


@pytest.fixture(scope="module")
def raw_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    write_raw_corpus(root, n_shows=4, seed=5, duration=240.0)
    return root


@pytest.fixture(scope="module")
def two_show_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus2")
    write_raw_corpus(root, n_shows=2, seed=6, duration=240.0)
    return root


def run(*argv) -> int:
    return main([str(a) for a in argv])


class TestAlign:
    def test_two_show_fixture_produces_valid_unified_json(self, two_show_corpus, tmp_path):
        out = tmp_path / "out"
        assert run("align", "--corpus", two_show_corpus, "--output", out) == EXIT_OK
        files = sorted((out / "aligned").glob("*.json"))
        assert [f.name for f in files] == ["S000.json", "S001.json"]
        for f in files:
            tl = deserialize_show(f.read_bytes())  # full schema validation
            assert tl.n_blocks > 0
            assert all(b.embedding is None or len(b.embedding) == EMBEDDING_DIM
                       for b in tl.timeline)

    def test_missing_corpus_is_input_error(self, tmp_path):
        assert run("align", "--corpus", tmp_path / "nope", "--output", tmp_path) == EXIT_INPUT


class TestStageCommands:
    def test_parse_subs(self, raw_corpus, tmp_path):
        assert run("parse-subs", "--corpus", raw_corpus, "--output", tmp_path) == EXIT_OK
        blocks = (tmp_path / "blocks" / "S000.blocks.jsonl").read_text().splitlines()
        first = json.loads(blocks[0])
        assert set(first) == {"start", "end", "text", "tokens"}

    def test_merge_laughs(self, raw_corpus, tmp_path):
        assert run("merge-laughs", "--corpus", raw_corpus, "--output", tmp_path) == EXIT_OK
        lines = (tmp_path / "laughs" / "S000.laugh_events.jsonl").read_text().splitlines()
        events = [json.loads(l) for l in lines]
        assert all(set(e) == {"start", "end", "type", "confidence"} for e in events)
        starts = [e["start"] for e in events]
        assert starts == sorted(starts)

    def test_kinematics(self, raw_corpus, tmp_path):
        assert run("kinematics", "--corpus", raw_corpus, "--output", tmp_path) == EXIT_OK
        lines = (tmp_path / "kinematics" / "S000.kinematics.jsonl").read_text().splitlines()
        sample = json.loads(lines[0])
        assert set(sample) == {"time", "arm_spread", "kinetic_energy", "trunk_lean"}


class TestAllPipeline:
    def test_all_outputs_and_determinism(self, raw_corpus, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        for out in (out_a, out_b):
            code = run("--seed", 3, "all", "--corpus", raw_corpus, "--output", out)
            assert code == EXIT_OK
        files_a = sorted(p.relative_to(out_a) for p in out_a.rglob("*") if p.is_file())
        files_b = sorted(p.relative_to(out_b) for p in out_b.rglob("*") if p.is_file())
        assert files_a == files_b
        for rel in files_a:
            assert (out_a / rel).read_bytes() == (out_b / rel).read_bytes(), rel

        ablation = (out_a / "bench" / "ablation.csv").read_text().splitlines()
        assert ablation[0].split(",")[0] == "feature_set"
        assert [row.split(",")[0] for row in ablation[1:]] == [
            "history", "text", "vision", "text+vision", "all",
        ]
        assert "positive_rate" in ablation[0]

        split = json.loads((out_a / "bench" / "split.json").read_text())
        folds = split["train"] + split["val"] + split["test"]
        assert sorted(folds) == ["S000", "S001", "S002", "S003"]

        profiles = (out_a / "analysis" / "topic_profiles.csv").read_text().splitlines()
        assert profiles[0].startswith("topic_id,")

        # every CSV cell must be a plain parseable value, never a numpy repr
        for name in ("analysis/topic_profiles.csv", "analysis/clustermap.csv",
                     "analysis/correlations.csv", "bench/ablation.csv"):
            body = (out_a / name).read_text()
            assert "np.float" not in body, name
            for row in body.splitlines()[1:]:
                for cell in row.split(",")[1:]:
                    float(cell)

    def test_all_handles_missing_modality_with_warning(self, tmp_path, capsys):
        corpus = tmp_path / "raw"
        write_raw_corpus(corpus, n_shows=2, seed=9, duration=120.0)
        os.remove(corpus / "S001.pose.jsonl")
        out = tmp_path / "out"
        code = run("all", "--corpus", corpus, "--output", out)
        assert code == EXIT_OK
        captured = capsys.readouterr()
        assert "warning" in captured.err.lower()
        assert (out / "aligned" / "S001.json").exists()


class TestOnsetBench:
    def test_ablation_csv_five_rows(self, raw_corpus, tmp_path):
        pre = tmp_path / "pre"
        assert run("align", "--corpus", raw_corpus, "--output", pre) == EXIT_OK
        assert run("kinematics", "--corpus", raw_corpus, "--output", pre) == EXIT_OK
        code = run(
            "onset-bench",
            "--corpus", pre / "aligned",
            "--kinematics", pre / "kinematics",
            "--output", tmp_path,
            "--dump-anchors",
        )
        assert code == EXIT_OK
        rows = (tmp_path / "bench" / "ablation.csv").read_text().splitlines()
        assert [r.split(",")[0] for r in rows[1:]] == list(
            ("history", "text", "vision", "text+vision", "all")
        )
        assert (tmp_path / "bench" / "model.json").exists()
        anchors = (tmp_path / "bench" / "anchors.csv").read_text().splitlines()
        assert anchors[0] == "show_id,t,label"

    def test_too_few_shows_is_input_error(self, two_show_corpus, tmp_path):
        pre = tmp_path / "pre"
        assert run("align", "--corpus", two_show_corpus, "--output", pre) == EXIT_OK
        code = run(
            "onset-bench", "--corpus", pre / "aligned", "--output", tmp_path,
        )
        assert code == EXIT_INPUT


class TestExitCodes:
    def test_schema_violation_is_invariant_error(self, tmp_path):
        aligned = tmp_path / "aligned"
        aligned.mkdir()
        bad = {"ID_x": {"metadata": {"show_id": "x", "n_blocks": 5, "embedding_dim": 384,
                                     "keypoint_joints": []}, "timeline": []}}
        (aligned / "x.json").write_text(json.dumps(bad))
        code = run("analyze", "--corpus", aligned, "--output", tmp_path)
        assert code == EXIT_INVARIANT

    def test_unknown_flag_is_input_error(self, tmp_path):
        assert run("align", "--corpus", tmp_path, "--bogus") == EXIT_INPUT


class TestConfig:
    def test_config_file_and_flag_override(self, raw_corpus, tmp_path):
        cfg = tmp_path / "pipeline.cfg"
        cfg.write_text("target_duration = 30\nlaugh_threshold = 0.5\n# comment\nseed = 9\n")
        out = tmp_path / "out"
        code = run(
            "--config", cfg, "parse-subs", "--corpus", raw_corpus, "--output", out,
            "--target-duration", 45,
        )
        assert code == EXIT_OK
        blocks = [
            json.loads(l)
            for l in (out / "blocks" / "S000.blocks.jsonl").read_text().splitlines()
        ]
        # flag wins over config: spans are at most 45 s
        assert all(b["end"] - b["start"] <= 45.0 + 1e-9 for b in blocks)

    def test_bad_config_key_is_input_error(self, raw_corpus, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("not_a_key = 1\n")
        code = run("--config", cfg, "parse-subs", "--corpus", raw_corpus, "--output", tmp_path)
        assert code == EXIT_INPUT

    def test_config_can_carry_paths(self, raw_corpus, tmp_path):
        cfg = tmp_path / "paths.cfg"
        out = tmp_path / "out"
        cfg.write_text(f"corpus = {raw_corpus}\noutput = {out}\n")
        assert run("--config", cfg, "merge-laughs") == EXIT_OK
        assert (out / "laughs" / "S000.laugh_events.jsonl").exists()

    def test_missing_paths_is_input_error(self):
        assert run("parse-subs") == EXIT_INPUT


class TestTopicEval:
    def test_end_to_end(self, tmp_path, rng):
        from laughline.topics import write_assignments_jsonl, TopicAssignment

        candidates = tmp_path / "cands"
        candidates.mkdir()

        def unit(seed):
            r = np.random.default_rng(seed)
            v = r.normal(size=EMBEDDING_DIM)
            return tuple(v / np.linalg.norm(v))

        # 12 topics, gently skewed, plus outliers: passes the validity gate
        for size in (120, 180):
            assignments = []
            for i in range(120):
                topic = i % 12 if (i + size) % 10 else -1
                assignments.append(TopicAssignment(i, topic, unit(1000 + i % 12)))
            (candidates / f"{size}.assignments.jsonl").write_text(
                write_assignments_jsonl(assignments)
            )
            descriptors = [
                {"topic_id": t, "top_words": [f"w{t}", f"w{t}x"]} for t in range(12)
            ]
            (candidates / f"{size}.descriptors.json").write_text(json.dumps(descriptors))

        docs = tmp_path / "docs.blocks.jsonl"
        lines = []
        for t in range(12):
            for _ in range(4):
                lines.append(json.dumps(
                    {"start": 0.0, "end": 1.0, "text": "", "tokens": [f"w{t}", f"w{t}x"]}
                ))
        docs.write_text("\n".join(lines))

        out = tmp_path / "out"
        code = run(
            "topic-eval", "--candidates", candidates, "--documents", docs, "--output", out
        )
        assert code == EXIT_OK
        report = json.loads((out / "topic_eval.json").read_text())
        assert report["chosen_block_size"] in (120, 180)
        assert set(report["candidates"]) == {"120", "180"}
        assert (out / "reassigned.jsonl").exists()
