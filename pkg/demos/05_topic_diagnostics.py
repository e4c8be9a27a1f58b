"""Topic-model diagnostics, NPMI coherence, selection, and outlier cleanup.

The topic model itself is external; this module scores its outputs. A
candidate is valid when it finds at least 10 topics and no topic holds more
than 35% of the blocks; among valid candidates the composite score
(normalized entropy + NPMI coherence - 2 * largest share) picks the winner.
Remaining outliers are pulled to their nearest topic centroid (cosine >=
0.30), then single outliers flanked by one topic are filled in.
"""

import numpy as np

from laughline.synth import topic_embedding
from laughline.topics import (
    TopicAssignment,
    TopicDescriptor,
    centroid_reassign,
    diagnostics,
    ensure_centroids,
    gap_fill,
    npmi_coherence,
    select_model,
    with_score,
)

rng = np.random.default_rng(0)
N_TOPICS = 12

# fake per-candidate assignments: smaller training blocks -> more, flatter topics
candidates = {}
documents = []
for block_size, skew in ((120, 1.0), (180, 2.0), (240, 4.0)):
    weights = np.array([skew ** -(t / N_TOPICS) for t in range(N_TOPICS)])
    weights /= weights.sum()
    assignments = []
    for i in range(240):
        topic = -1 if rng.random() < 0.1 else int(rng.choice(N_TOPICS, p=weights))
        emb = None if topic == -1 else topic_embedding(rng, topic)
        assignments.append(TopicAssignment(i, topic, emb))
        # documents mostly use their topic's words, with bleed-through noise
        words = [f"w{topic}a", f"w{topic}b"] if topic >= 0 else []
        words += [f"w{int(rng.integers(N_TOPICS))}{rng.choice(['a', 'b'])}"
                  for _ in range(2)]
        documents.append(words)
    descriptors = [TopicDescriptor(t, (f"w{t}a", f"w{t}b")) for t in range(N_TOPICS)]

    diag = diagnostics(assignments)
    coherence = npmi_coherence(descriptors, documents)
    candidates[block_size] = with_score(diag, coherence)
    print(f"block_size={block_size}: K={diag.k} s_max={diag.s_max:.3f} "
          f"H_norm={diag.h_norm:.3f} C_npmi={coherence:.3f} "
          f"S={candidates[block_size].score:.3f} valid={diag.valid}")

chosen = select_model(candidates)
print(f"\nselected training block size: {chosen} s")

# outlier cleanup on a small sequence
members = [TopicAssignment(i, t, topic_embedding(rng, t)) for i, t in enumerate([3, 3, 5, 5])]
descriptors = ensure_centroids(
    [TopicDescriptor(3, ("a", "b")), TopicDescriptor(5, ("c", "d"))], members
)
outlier = TopicAssignment(99, -1, topic_embedding(rng, 5))
(resolved,) = centroid_reassign([outlier], descriptors)
print(f"outlier near topic-5 centroid -> reassigned to topic {resolved.topic_id}")

sequence = [4, -1, 4, 7, -1, -1, 7, 2, -1, 5]
print(f"gap fill: {sequence} -> {gap_fill(sequence)}")
