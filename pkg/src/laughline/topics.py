"""Topic-assignment diagnostics, NPMI coherence, model selection, post-processing.

The topic model itself is external; this module consumes its outputs
(per-block assignments, top-word descriptors) and implements the
quality-diagnostics and outlier-reduction machinery around them.
"""

from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import LaughlineError, ParseError, StructuralError
from .timeline import EMBEDDING_DIM

logger = logging.getLogger(__name__)

OUTLIER_TOPIC = -1
DEFAULT_CENTROID_THRESHOLD = 0.30
# Validity gate for candidate topic models.
MIN_TOPICS = 10
MAX_TOP_SHARE = 0.35
TOP_WORDS_PER_TOPIC = 10
CANDIDATE_BLOCK_SIZES = (120, 150, 180, 210, 240)


class ModelSelectionError(LaughlineError):
    """No candidate topic model passed the validity constraints."""


def _check_unit(vec: Sequence[float], what: str) -> tuple[float, ...]:
    if len(vec) != EMBEDDING_DIM:
        raise StructuralError(f"{what} must have {EMBEDDING_DIM} dims, got {len(vec)}")
    norm = math.sqrt(math.fsum(float(v) * float(v) for v in vec))
    if abs(norm - 1.0) > 1e-6:
        raise StructuralError(f"{what} must have unit L2 norm, got {norm!r}")
    return tuple(float(v) for v in vec)


@dataclass(frozen=True)
class TopicAssignment:
    block_index: int
    topic_id: int
    embedding: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.embedding is not None:
            object.__setattr__(
                self, "embedding", _check_unit(self.embedding, f"assignment {self.block_index}")
            )

    @property
    def is_outlier(self) -> bool:
        return self.topic_id == OUTLIER_TOPIC


@dataclass(frozen=True)
class TopicDescriptor:
    topic_id: int
    top_words: tuple[str, ...]
    centroid: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "top_words", tuple(self.top_words))
        if self.centroid is not None:
            object.__setattr__(
                self, "centroid", _check_unit(self.centroid, f"topic {self.topic_id} centroid")
            )


@dataclass(frozen=True)
class TopicModelDiagnostics:
    k: int
    s_max: float
    h_norm: float
    c_npmi: float | None = None
    score: float | None = None

    @property
    def valid(self) -> bool:
        return self.k >= MIN_TOPICS and self.s_max <= MAX_TOP_SHARE

    def violations(self) -> list[str]:
        out = []
        if self.k < MIN_TOPICS:
            out.append(f"K={self.k} < {MIN_TOPICS}")
        if self.s_max > MAX_TOP_SHARE:
            out.append(f"s_max={self.s_max:.4f} > {MAX_TOP_SHARE}")
        return out


def normalize_embedding(v: Sequence[float]) -> np.ndarray:
    """Scale to unit L2 norm, preserving direction. A zero vector is an error."""
    arr = np.asarray(v, dtype=np.float64)
    norm = float(np.linalg.norm(arr))
    if norm == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return arr / norm


def diagnostics(assignments: Sequence[TopicAssignment]) -> TopicModelDiagnostics:
    """K, largest-topic share, and normalized entropy over non-outlier blocks.

    Natural log; a single-topic model has entropy 0 by definition.
    """
    counts: dict[int, int] = {}
    for a in assignments:
        if not a.is_outlier:
            counts[a.topic_id] = counts.get(a.topic_id, 0) + 1
    if not counts:
        raise ValueError("diagnostics need at least one non-outlier assignment")
    total = sum(counts.values())
    probs = [c / total for c in counts.values()]
    k = len(counts)
    s_max = max(probs)
    if k == 1:
        h_norm = 0.0
    else:
        h_norm = -sum(p * math.log(p) for p in probs) / math.log(k)
    return TopicModelDiagnostics(k=k, s_max=s_max, h_norm=h_norm)


def npmi_pair(df_i: int, df_j: int, co: int, n_docs: int) -> float | None:
    """NPMI for one word pair from document counts; None when unscoreable."""
    if df_i == 0 or df_j == 0:
        return None
    if co == 0:
        return -1.0
    p_ij = co / n_docs
    if p_ij >= 1.0:
        # both words occur in every document: 0/0 limit, defined as 0
        return 0.0
    p_i = df_i / n_docs
    p_j = df_j / n_docs
    return math.log(p_ij / (p_i * p_j)) / (-math.log(p_ij))


def npmi_coherence(
    topics: Sequence[TopicDescriptor],
    documents: Sequence[Sequence[str]],
    subsample: int | None = None,
    seed: int = 0,
) -> float:
    """Corpus coherence: mean over non-outlier topics of the mean pairwise NPMI.

    Word and pair probabilities are document frequencies. Pairs involving a
    word absent from every document are skipped (the per-topic denominator is
    reduced accordingly); pairs that never co-occur contribute the limit
    value -1. Topics left with no scoreable pair are skipped the same way.
    ``subsample`` caps the number of documents with a seeded uniform sample
    for reproducibility.
    """
    if not documents:
        raise ValueError("npmi_coherence needs a non-empty document list")
    docs = list(documents)
    if subsample is not None and len(docs) > subsample:
        rng = random.Random(seed)
        docs = rng.sample(docs, subsample)
    doc_sets = [set(d) for d in docs]
    n_docs = len(doc_sets)

    vocab = set()
    for t in topics:
        if t.topic_id != OUTLIER_TOPIC:
            vocab.update(t.top_words)
    occurrences = {w: {i for i, ds in enumerate(doc_sets) if w in ds} for w in vocab}

    topic_scores = []
    for t in topics:
        if t.topic_id == OUTLIER_TOPIC:
            continue
        words = list(dict.fromkeys(t.top_words))
        if len(words) < 2:
            raise ValueError(f"topic {t.topic_id} needs at least 2 top words")
        pair_scores = []
        for i in range(len(words)):
            for j in range(i + 1, len(words)):
                occ_i, occ_j = occurrences[words[i]], occurrences[words[j]]
                val = npmi_pair(len(occ_i), len(occ_j), len(occ_i & occ_j), n_docs)
                if val is not None:
                    pair_scores.append(val)
        if pair_scores:
            topic_scores.append(sum(pair_scores) / len(pair_scores))
    if not topic_scores:
        raise ValueError("no scoreable word pair in any topic")
    return sum(topic_scores) / len(topic_scores)


def composite_score(d: TopicModelDiagnostics) -> float:
    """Model-selection objective: entropy plus coherence, penalized by dominance."""
    if d.c_npmi is None:
        raise ValueError("composite_score needs diagnostics with c_npmi filled")
    return d.h_norm + d.c_npmi - 2.0 * d.s_max


def with_score(d: TopicModelDiagnostics, c_npmi: float) -> TopicModelDiagnostics:
    d = replace(d, c_npmi=c_npmi)
    return replace(d, score=composite_score(d))


def select_model(candidates: Mapping[int, object]) -> int:
    """Pick the block size whose valid candidate maximizes the composite score.

    Values may be TopicModelDiagnostics or (diagnostics, assignments) pairs.
    Ties break toward the smaller block size (finer granularity). If no
    candidate is valid, the error lists each candidate's violated constraints.
    """
    if not candidates:
        raise ModelSelectionError("no candidates given")
    diags = {
        size: (value[0] if isinstance(value, tuple) else value)
        for size, value in candidates.items()
    }
    scored = {}
    for size, diag in diags.items():
        if diag.valid:
            scored[size] = diag.score if diag.score is not None else composite_score(diag)
    if not scored:
        lines = [
            f"block_size={size}: {', '.join(diag.violations())}"
            for size, diag in sorted(diags.items())
        ]
        raise ModelSelectionError("no valid candidate:\n" + "\n".join(lines))
    return min(scored, key=lambda size: (-scored[size], size))


def compute_centroids(assignments: Sequence[TopicAssignment]) -> dict[int, np.ndarray]:
    """Per-topic centroid: renormalized mean of the member unit embeddings."""
    members: dict[int, list[np.ndarray]] = {}
    for a in assignments:
        if a.is_outlier or a.embedding is None:
            continue
        members.setdefault(a.topic_id, []).append(np.asarray(a.embedding))
    centroids = {}
    for topic_id, vecs in members.items():
        mean = np.mean(vecs, axis=0)
        norm = float(np.linalg.norm(mean))
        if norm == 0.0:
            raise StructuralError(f"topic {topic_id}: member embeddings sum to zero")
        centroids[topic_id] = mean / norm
    return centroids


def ensure_centroids(
    descriptors: Sequence[TopicDescriptor], assignments: Sequence[TopicAssignment]
) -> list[TopicDescriptor]:
    """Fill missing descriptor centroids from the assignments."""
    computed = None
    out = []
    for d in descriptors:
        if d.centroid is None and d.topic_id != OUTLIER_TOPIC:
            if computed is None:
                computed = compute_centroids(assignments)
            if d.topic_id not in computed:
                raise StructuralError(f"topic {d.topic_id}: no members to compute a centroid from")
            out.append(replace(d, centroid=tuple(computed[d.topic_id])))
        else:
            out.append(d)
    return out


def centroid_reassign(
    assignments: Sequence[TopicAssignment],
    descriptors: Sequence[TopicDescriptor],
    threshold: float = DEFAULT_CENTROID_THRESHOLD,
) -> list[TopicAssignment]:
    """Move outliers to their nearest topic centroid when similar enough.

    An outlier whose maximum cosine similarity against the centroids reaches
    the threshold takes that topic; everything else (non-outliers, outliers
    without an embedding, weak matches) passes through unchanged.
    """
    usable = [d for d in descriptors if d.topic_id != OUTLIER_TOPIC and d.centroid is not None]
    if not usable:
        raise ValueError("centroid_reassign needs at least one descriptor with a centroid")
    matrix = np.array([d.centroid for d in usable])
    topic_ids = [d.topic_id for d in usable]

    out = []
    for a in assignments:
        if not a.is_outlier or a.embedding is None:
            out.append(a)
            continue
        sims = matrix @ np.asarray(a.embedding)
        best = int(np.argmax(sims))
        if sims[best] >= threshold:
            out.append(replace(a, topic_id=topic_ids[best]))
        else:
            out.append(a)
    return out


def gap_fill(sequence: Sequence[int]) -> list[int]:
    """Replace a single outlier flanked by two identical non-outlier topics.

    One left-to-right pass over the original sequence; decisions never see
    earlier fills, so runs of two or more outliers are left untouched.
    """
    out = list(sequence)
    for i in range(1, len(sequence) - 1):
        if (
            sequence[i] == OUTLIER_TOPIC
            and sequence[i - 1] != OUTLIER_TOPIC
            and sequence[i - 1] == sequence[i + 1]
        ):
            out[i] = sequence[i - 1]
    return out


# ---------------------------------------------------------------------------
# External formats
# ---------------------------------------------------------------------------

def read_assignments_jsonl(data: bytes | str) -> list[TopicAssignment]:
    """Read assignments from JSON-lines ``{block_index, topic_id, embedding}``."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: not valid JSON: {exc}") from exc
        try:
            emb = obj.get("embedding")
            out.append(
                TopicAssignment(
                    block_index=int(obj["block_index"]),
                    topic_id=int(obj["topic_id"]),
                    embedding=None if emb is None else tuple(float(v) for v in emb),
                )
            )
        except (KeyError, TypeError, ValueError, StructuralError) as exc:
            raise ParseError(f"line {lineno}: bad assignment: {exc}") from exc
    out.sort(key=lambda a: a.block_index)
    return out


def write_assignments_jsonl(assignments: Sequence[TopicAssignment]) -> str:
    return "".join(
        json.dumps(
            {
                "block_index": a.block_index,
                "topic_id": a.topic_id,
                "embedding": None if a.embedding is None else list(a.embedding),
            }
        )
        + "\n"
        for a in assignments
    )


def read_descriptors_json(data: bytes | str) -> list[TopicDescriptor]:
    """Read descriptors from a JSON array of ``{topic_id, top_words, centroid?}``."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise ParseError("descriptors file must hold a JSON array")
    out = []
    for i, obj in enumerate(doc):
        try:
            cent = obj.get("centroid")
            out.append(
                TopicDescriptor(
                    topic_id=int(obj["topic_id"]),
                    top_words=tuple(str(w) for w in obj["top_words"]),
                    centroid=None if cent is None else tuple(float(v) for v in cent),
                )
            )
        except (KeyError, TypeError, ValueError, StructuralError) as exc:
            raise ParseError(f"descriptor[{i}]: {exc}") from exc
    return out
