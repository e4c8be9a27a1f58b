"""Hierarchical temporal containment and the unified per-show JSON.

Each modality keeps its native resolution; events nest into 60 s anchor
blocks by half-open timestamp membership ([start, end)), never resampled.
Events outside every block go to a reserved overflow sidecar so totals are
conserved. The serialized document round-trips losslessly.
"""

import json

from laughline.synth import generate_show
from laughline.timeline import deserialize_show, serialize_show

timeline, _ = generate_show("demo", seed=11, duration=300.0)

print(f"show {timeline.show_id!r}: {timeline.n_blocks} blocks over {timeline.span.duration:.0f} s")
for block in timeline.timeline:
    print(f"  block {block.block_id}: [{block.span.start:5.0f}, {block.span.end:5.0f}) "
          f"topic={block.topic_id:>2}  laughs={len(block.laugh_events):2d}  "
          f"poses={len(block.pose_keypoints):2d}  shots={len(block.shot_events):2d}")
print(f"  overflow: {len(timeline.overflow.laugh_events)} laugh events outside all blocks")

data = serialize_show(timeline)
assert deserialize_show(data) == timeline  # lossless round-trip
print(f"\nserialized: {len(data)} bytes; round-trips exactly")

doc = json.loads(data)
block0 = doc["ID_demo"]["timeline"][0]
excerpt = {
    "block_id": block0["block_id"],
    "start": block0["start"],
    "end": block0["end"],
    "topic_id": block0["topic_id"],
    "laugh_events": block0["laugh_events"][:1],
    "shot_events": block0["shot_events"][:1],
}
print("\nfirst block, excerpted:")
print(json.dumps(excerpt, indent=2)[:600])
