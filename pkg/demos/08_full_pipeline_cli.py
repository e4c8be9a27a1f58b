"""The whole pipeline through the CLI, end to end, on a generated raw corpus.

Writes raw per-show inputs (SRT subtitles, laughter stride windows, pose and
shot JSON-lines, topic assignments), then runs the ``all`` subcommand, which
chains parse-subs, merge-laughs, kinematics, align, analyze, and
onset-bench. Running it twice with the same seed produces byte-identical
outputs.
"""

import tempfile
from pathlib import Path

from laughline.cli import main
from laughline.synth import write_raw_corpus

with tempfile.TemporaryDirectory() as tmp:
    raw = Path(tmp) / "raw"
    out = Path(tmp) / "out"
    show_ids = write_raw_corpus(raw, n_shows=4, seed=13, duration=300.0)
    print(f"raw corpus: {len(show_ids)} shows in {raw}")
    for p in sorted(raw.iterdir())[:6]:
        print(f"  {p.name}")
    print("  ...")

    code = main(["--seed", "13", "all", "--corpus", str(raw), "--output", str(out)])
    print(f"\n`laughline all` exit code: {code}\n")

    print("outputs:")
    for p in sorted(out.rglob("*")):
        if p.is_file():
            print(f"  {p.relative_to(out)}  ({p.stat().st_size} bytes)")

    print("\nablation.csv:")
    print((out / "bench" / "ablation.csv").read_text())
