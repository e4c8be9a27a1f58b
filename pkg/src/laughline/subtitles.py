"""SRT/VTT subtitle parsing, text normalization, and duration-targeted blocks.

Everything here is a pure function over file content; per-file runs are safe
to execute in parallel.
"""

from __future__ import annotations

import json
import logging
import re
import unicodedata
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence

from .errors import ParseError
from .timeline import TimedSpan

logger = logging.getLogger(__name__)

_TAG_RE = re.compile(r"<[^>]*>")           # HTML-like markup, e.g. <i>...</i>
_BRACE_RE = re.compile(r"\{[^}]*\}")       # ASS/SSA formatting codes, e.g. {\an8}
_WS_RE = re.compile(r"\s+")
_APOSTROPHES = str.maketrans({"’": "'", "‘": "'", "ʼ": "'", "`": "'", "´": "'"})

_SRT_TIME = r"(\d+):(\d{1,2}):(\d{1,2})[,.](\d{1,3})"
_SRT_CUE_TIMES = re.compile(rf"^\s*{_SRT_TIME}\s*-->\s*{_SRT_TIME}")
# VTT allows HH:MM:SS.mmm or MM:SS.mmm, with optional cue settings afterwards.
_VTT_TIME = r"(?:(\d+):)?(\d{1,2}):(\d{1,2})\.(\d{1,3})"
_VTT_CUE_TIMES = re.compile(rf"^\s*{_VTT_TIME}\s*-->\s*{_VTT_TIME}")


@dataclass(frozen=True)
class SubtitleCue:
    index: int
    span: TimedSpan
    raw_text: str
    clean_text: str


@dataclass(frozen=True)
class TextBlock:
    """Contiguous subtitle text covering roughly one target duration."""

    span: TimedSpan
    text: str
    token_list: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "token_list", tuple(self.token_list))


def clean_cue_text(raw: str) -> str:
    """Strip markup and formatting codes, standardize apostrophes, collapse whitespace."""
    s = _TAG_RE.sub(" ", raw)
    s = _BRACE_RE.sub(" ", s)
    s = s.translate(_APOSTROPHES)
    s = _WS_RE.sub(" ", s)
    return s.strip()


def _decode(data: bytes | str) -> str:
    if isinstance(data, str):
        return data.lstrip("﻿")
    try:
        return data.decode("utf-8-sig")
    except UnicodeDecodeError:
        logger.warning("input is not UTF-8; falling back to Latin-1")
        return data.decode("latin-1")


def _srt_seconds(h: str, m: str, s: str, ms: str) -> float:
    return int(h) * 3600 + int(m) * 60 + int(s) + int(ms.ljust(3, "0")) / 1000.0


def parse_srt(data: bytes | str) -> list[SubtitleCue]:
    """Parse SRT content into cues sorted by start time.

    Malformed cue blocks are skipped (one warning each); an empty file yields
    an empty list. If the file has content but not a single parseable cue,
    that is an irrecoverable parse error naming the first offending line.
    """
    text = _decode(data)
    lines = text.splitlines()
    cues: list[SubtitleCue] = []
    skipped = 0
    first_bad_line: int | None = None

    i = 0
    n = len(lines)
    while i < n:
        if not lines[i].strip():
            i += 1
            continue
        block_start = i
        block: list[str] = []
        while i < n and lines[i].strip():
            block.append(lines[i])
            i += 1
        cue = _parse_srt_block(block, block_start + 1)
        if cue is None:
            skipped += 1
            if first_bad_line is None:
                first_bad_line = block_start + 1
            logger.warning("skipping malformed SRT cue block at line %d", block_start + 1)
        else:
            cues.append(cue)

    if not cues and skipped:
        raise ParseError(f"line {first_bad_line}: no parseable SRT cue found")
    if skipped:
        logger.warning("skipped %d malformed SRT cue blocks", skipped)
    cues.sort(key=lambda c: c.span.start)
    return cues


def _parse_srt_block(block: list[str], lineno: int) -> SubtitleCue | None:
    idx: int | None = None
    pos = 0
    if pos < len(block) and block[pos].strip().isdigit():
        idx = int(block[pos].strip())
        pos += 1
    if pos >= len(block):
        return None
    m = _SRT_CUE_TIMES.match(block[pos])
    if not m:
        return None
    start = _srt_seconds(*m.groups()[:4])
    end = _srt_seconds(*m.groups()[4:])
    if not (start < end) or start < 0:
        return None
    raw = "\n".join(block[pos + 1:])
    return SubtitleCue(
        index=idx if idx is not None else lineno,
        span=TimedSpan(start, end),
        raw_text=raw,
        clean_text=clean_cue_text(raw),
    )


def _vtt_seconds(h: str | None, m: str, s: str, ms: str) -> float:
    hours = int(h) if h else 0
    return hours * 3600 + int(m) * 60 + int(s) + int(ms.ljust(3, "0")) / 1000.0


def parse_vtt(data: bytes | str) -> list[SubtitleCue]:
    """Parse WEBVTT content; same contract as parse_srt.

    Cue settings after the timestamp line are discarded; NOTE/STYLE/REGION
    blocks are skipped. A missing WEBVTT header is a parse error.
    """
    text = _decode(data)
    lines = text.splitlines()
    if not lines or not lines[0].strip().startswith("WEBVTT"):
        raise ParseError("line 1: missing WEBVTT header")

    cues: list[SubtitleCue] = []
    skipped = 0
    auto_index = 0

    i = 1
    n = len(lines)
    while i < n:
        if not lines[i].strip():
            i += 1
            continue
        block_start = i
        block: list[str] = []
        while i < n and lines[i].strip():
            block.append(lines[i])
            i += 1
        head = block[0].strip()
        if head.startswith(("NOTE", "STYLE", "REGION")):
            continue
        explicit_id: int | None = None
        pos = 0
        if "-->" not in block[0]:
            # optional cue identifier line
            if head.isdigit():
                explicit_id = int(head)
            pos = 1
        if pos >= len(block):
            skipped += 1
            logger.warning("skipping malformed VTT cue block at line %d", block_start + 1)
            continue
        m = _VTT_CUE_TIMES.match(block[pos])
        if not m:
            skipped += 1
            logger.warning("skipping malformed VTT cue block at line %d", block_start + 1)
            continue
        start = _vtt_seconds(*m.groups()[:4])
        end = _vtt_seconds(*m.groups()[4:])
        if not (start < end):
            skipped += 1
            logger.warning("skipping malformed VTT cue block at line %d", block_start + 1)
            continue
        auto_index += 1
        raw = "\n".join(block[pos + 1:])
        cues.append(
            SubtitleCue(
                index=explicit_id if explicit_id is not None else auto_index,
                span=TimedSpan(start, end),
                raw_text=raw,
                clean_text=clean_cue_text(raw),
            )
        )

    if skipped:
        logger.warning("skipped %d malformed VTT cue blocks", skipped)
    cues.sort(key=lambda c: c.span.start)
    return cues


def parse_subtitles(data: bytes | str, suffix: str) -> list[SubtitleCue]:
    suffix = suffix.lower().lstrip(".")
    if suffix == "srt":
        return parse_srt(data)
    if suffix == "vtt":
        return parse_vtt(data)
    raise ParseError(f"unsupported subtitle format: .{suffix}")


# ---------------------------------------------------------------------------
# Tokenization and stopwords
# ---------------------------------------------------------------------------

def _strip_punct(token: str) -> str:
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def tokenize(text: str) -> list[str]:
    """Lowercased whitespace tokens with leading/trailing punctuation stripped."""
    out = []
    for tok in text.lower().split():
        tok = _strip_punct(tok)
        if tok:
            out.append(tok)
    return out


def remove_stopwords(text: str, stopwords: Iterable[str]) -> list[str]:
    """Tokenize and drop stopwords, preserving token order.

    Stopword entries containing spaces are treated as phrases and removed
    from the lowercased text before tokenization (the curated filler list
    has entries like "you know"); single-word entries filter tokens.
    """
    words = set()
    phrases = []
    for entry in stopwords:
        entry = entry.strip().lower()
        if not entry:
            continue
        if " " in entry:
            phrases.append(entry)
        else:
            words.add(entry)
    lowered = text.lower()
    for phrase in phrases:
        lowered = re.sub(rf"\b{re.escape(phrase)}\b", " ", lowered)
    return [tok for tok in tokenize(lowered) if tok not in words]


def _load_wordlist(name: str) -> frozenset[str]:
    content = resources.files("laughline.data").joinpath(name).read_text("utf-8")
    entries = set()
    for line in content.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.add(line.lower())
    return frozenset(entries)


def english_stopwords() -> frozenset[str]:
    return _load_wordlist("english_stopwords.txt")


def filler_stopwords() -> frozenset[str]:
    """Curated fillers/discourse markers; ships as a versioned data file."""
    return _load_wordlist("filler_stopwords.txt")


def default_stopwords() -> frozenset[str]:
    return english_stopwords() | filler_stopwords()


def load_stopword_file(path: str) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return frozenset(
            line.strip().lower()
            for line in fh
            if line.strip() and not line.startswith("#")
        )


# ---------------------------------------------------------------------------
# Duration-targeted blocks
# ---------------------------------------------------------------------------

def build_blocks(
    cues: Sequence[SubtitleCue],
    target_duration: float = 60.0,
    stopwords: Iterable[str] | None = None,
) -> list[TextBlock]:
    """Group consecutive cues into blocks of roughly ``target_duration`` seconds.

    A cue joins the current block iff its start time does not exceed the
    block start plus the target duration (strictly later starts open a new
    block). Block spans are [start, start + target) on the anchor grid; a
    cue's audio may overrun the block end, and its text stays with the block
    that owns the cue start. The final block is truncated at its last cue's
    end when that ends earlier.
    """
    if target_duration <= 0:
        raise ValueError(f"target_duration must be positive, got {target_duration}")
    if not cues:
        return []
    for prev, curr in zip(cues, cues[1:]):
        if curr.span.start < prev.span.start:
            raise ValueError("cues must be sorted by start time")
    if stopwords is None:
        stopwords = default_stopwords()
    stopwords = frozenset(s.lower() for s in stopwords)

    groups: list[list[SubtitleCue]] = []
    current: list[SubtitleCue] = []
    limit = 0.0
    for cue in cues:
        if current and cue.span.start > limit:
            groups.append(current)
            current = []
        if not current:
            limit = cue.span.start + target_duration
        current.append(cue)
    groups.append(current)

    blocks = []
    for gi, group in enumerate(groups):
        start = group[0].span.start
        end = start + target_duration
        if gi == len(groups) - 1:
            end = min(end, max(c.span.end for c in group))
        text = " ".join(c.clean_text for c in group if c.clean_text)
        blocks.append(
            TextBlock(
                span=TimedSpan(start, end),
                text=text,
                token_list=tuple(remove_stopwords(text, stopwords)),
            )
        )
    return blocks


def write_blocks_jsonl(blocks: Iterable[TextBlock]) -> str:
    """One JSON object per line: {start, end, text, tokens}."""
    return "".join(
        json.dumps(
            {
                "start": b.span.start,
                "end": b.span.end,
                "text": b.text,
                "tokens": list(b.token_list),
            },
            ensure_ascii=False,
        )
        + "\n"
        for b in blocks
    )


def read_blocks_jsonl(data: bytes | str) -> list[TextBlock]:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    blocks = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: not valid JSON: {exc}") from exc
        try:
            blocks.append(
                TextBlock(
                    span=TimedSpan(float(obj["start"]), float(obj["end"])),
                    text=str(obj["text"]),
                    token_list=tuple(str(t) for t in obj.get("tokens", [])),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"line {lineno}: bad text block: {exc}") from exc
    return blocks
