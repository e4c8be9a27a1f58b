"""Shared pipeline configuration: defaults, key=value config files, flag overrides."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError
from .onset import DEFAULT_RATIOS


@dataclass
class PipelineConfig:
    corpus: str | None = None
    output: str | None = None
    target_duration: float = 60.0
    smoothing_window: float = 30.0
    laugh_threshold: float = 0.3
    centroid_threshold: float = 0.30
    delta: float = 2.0
    step: float = 1.0
    history_window: float = 10.0
    split_ratios: tuple[float, float, float] = DEFAULT_RATIOS
    seed: int = 0
    shot_filter: tuple[str, ...] = ("full_shot", "medium_long_shot")
    jobs: int = 1
    stopwords_path: str | None = None

    def __post_init__(self) -> None:
        for name in ("target_duration", "smoothing_window", "delta", "step", "history_window"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if abs(sum(self.split_ratios) - 1.0) > 1e-9:
            raise ValueError(f"split_ratios must sum to 1, got {self.split_ratios}")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")


def _coerce(name: str, raw: str, current):
    if isinstance(current, bool):
        return raw.lower() in ("1", "true", "yes")
    if isinstance(current, int):
        return int(raw)
    if isinstance(current, float):
        return float(raw)
    if isinstance(current, tuple):
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        if current and isinstance(current[0], float):
            return tuple(float(p) for p in parts)
        return tuple(parts)
    return raw


def load_config(path: str | Path) -> PipelineConfig:
    """Read a simple ``key = value`` config file ('#' starts a comment)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    defaults = PipelineConfig()
    values: dict = {}
    known = {f.name: f for f in dataclasses.fields(PipelineConfig)}
    for lineno, line in enumerate(path.read_text("utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{path}:{lineno}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ParseError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            values[key] = _coerce(key, raw, getattr(defaults, key))
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return dataclasses.replace(defaults, **values)


def apply_overrides(config: PipelineConfig, **overrides) -> PipelineConfig:
    """Return a copy with every non-None override applied (flags beat the file)."""
    actual = {k: v for k, v in overrides.items() if v is not None}
    return dataclasses.replace(config, **actual) if actual else config
