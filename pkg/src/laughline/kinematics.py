"""Kinematic signals from raw skeletal keypoints.

Three per-frame scalars describe performance dynamics: lateral arm spread
(wrist distance over shoulder distance, 1 = neutral stance), kinetic energy
(summed joint displacement between consecutive frames, normalized by
bounding-box height), and trunk lean (signed torso angle from vertical, in
degrees, image coordinates). Joints recorded as (0, 0) are invalid and never
contribute; a signal whose required joints are invalid is absent (None), not
zero.
"""

from __future__ import annotations

import json
import logging
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ParseError
from .timeline import (
    LEFT_HIP,
    LEFT_SHOULDER,
    LEFT_WRIST,
    RIGHT_HIP,
    RIGHT_SHOULDER,
    RIGHT_WRIST,
    PoseFrame,
    ShotFrame,
)

logger = logging.getLogger(__name__)

# Division guard: distances/offsets below this many pixels mark the sample
# absent instead of clamping.
EPS_PX = 1e-6

DEFAULT_SMOOTHING_WINDOW = 30.0
# Shot labels considered full-body/frontal enough for pose analysis.
DEFAULT_SHOT_FILTER = frozenset({"full_shot", "medium_long_shot"})
# E_t pairs a frame with the previous detected frame only if the gap is small.
MAX_ENERGY_GAP = 2.0


@dataclass(frozen=True)
class KinematicSample:
    time: float
    arm_spread: float | None = None
    kinetic_energy: float | None = None
    trunk_lean: float | None = None

    def any_present(self) -> bool:
        return (
            self.arm_spread is not None
            or self.kinetic_energy is not None
            or self.trunk_lean is not None
        )


def _dist(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def arm_spread(frame: PoseFrame) -> float | None:
    """Wrist-to-wrist distance over shoulder-to-shoulder distance."""
    if not frame.has_detection:
        return None
    joints = (LEFT_WRIST, RIGHT_WRIST, LEFT_SHOULDER, RIGHT_SHOULDER)
    if not all(frame.joint_valid(j) for j in joints):
        return None
    kp = frame.keypoints
    shoulder = _dist(kp[LEFT_SHOULDER], kp[RIGHT_SHOULDER])
    if shoulder < EPS_PX:
        return None
    return _dist(kp[LEFT_WRIST], kp[RIGHT_WRIST]) / shoulder


def kinetic_energy(curr: PoseFrame, prev: PoseFrame) -> float | None:
    """Summed displacement of jointly valid joints, over the current bbox height."""
    if curr.time <= prev.time:
        raise ValueError("current frame must be later than the previous frame")
    if not (curr.has_detection and prev.has_detection):
        return None
    if curr.bbox is None or curr.bbox.height <= 0:
        return None
    total = 0.0
    any_joint = False
    for j in range(len(curr.keypoints)):
        if curr.joint_valid(j) and prev.joint_valid(j):
            total += _dist(curr.keypoints[j], prev.keypoints[j])
            any_joint = True
    if not any_joint:
        return None
    return total / curr.bbox.height


def trunk_lean(frame: PoseFrame) -> float | None:
    """Signed torso angle in degrees: atan(dx/dy) of hip midpoint minus shoulder midpoint.

    Image coordinates (y grows downward); hips shifted toward +x relative to
    the shoulders give a positive angle.
    """
    if not frame.has_detection:
        return None
    joints = (LEFT_SHOULDER, RIGHT_SHOULDER, LEFT_HIP, RIGHT_HIP)
    if not all(frame.joint_valid(j) for j in joints):
        return None
    kp = frame.keypoints
    sho_x = (kp[LEFT_SHOULDER][0] + kp[RIGHT_SHOULDER][0]) / 2.0
    sho_y = (kp[LEFT_SHOULDER][1] + kp[RIGHT_SHOULDER][1]) / 2.0
    hip_x = (kp[LEFT_HIP][0] + kp[RIGHT_HIP][0]) / 2.0
    hip_y = (kp[LEFT_HIP][1] + kp[RIGHT_HIP][1]) / 2.0
    dy = hip_y - sho_y
    if abs(dy) < EPS_PX:
        return None
    return math.atan((hip_x - sho_x) / dy) * 180.0 / math.pi


def filter_by_shot(
    frames: Sequence[PoseFrame],
    shots: Sequence[ShotFrame],
    keep_labels: Iterable[str] = DEFAULT_SHOT_FILTER,
) -> list[PoseFrame]:
    """Keep pose frames whose shot label at the same timestamp is in ``keep_labels``.

    Frames with no shot prediction at their timestamp are kept (there is
    nothing to filter on).
    """
    keep = frozenset(keep_labels)
    label_at = {s.time: s.label for s in shots}
    out = []
    for f in frames:
        label = label_at.get(f.time)
        if label is None or label in keep:
            out.append(f)
    return out


def compute_samples(frames: Sequence[PoseFrame]) -> list[KinematicSample]:
    """Per-frame kinematics; frames must be time-sorted.

    Kinetic energy pairs each frame with the most recent detected frame when
    the gap is at most MAX_ENERGY_GAP seconds; larger gaps leave it absent.
    """
    for prev, curr in zip(frames, frames[1:]):
        if curr.time <= prev.time:
            raise ValueError("pose frames must be strictly increasing in time")
    samples = []
    prev_detected: PoseFrame | None = None
    for f in frames:
        energy = None
        if (
            f.has_detection
            and prev_detected is not None
            and f.time - prev_detected.time <= MAX_ENERGY_GAP
        ):
            energy = kinetic_energy(f, prev_detected)
        samples.append(
            KinematicSample(
                time=f.time,
                arm_spread=arm_spread(f),
                kinetic_energy=energy,
                trunk_lean=trunk_lean(f),
            )
        )
        if f.has_detection:
            prev_detected = f
    return samples


def smooth(
    samples: Sequence[KinematicSample], window: float = DEFAULT_SMOOTHING_WINDOW
) -> list[KinematicSample]:
    """Centered sliding-window mean over present values.

    Each present field becomes the mean of the present values whose timestamps
    lie in [t - window/2, t + window/2]; absent fields stay absent. A centered
    window avoids phase lag in cross-modal timing.
    """
    if window <= 0:
        raise ValueError(f"window must be positive, got {window}")
    times = [s.time for s in samples]
    for a, b in zip(times, times[1:]):
        if b < a:
            raise ValueError("samples must be time-sorted")
    half = window / 2.0
    fields = ("arm_spread", "kinetic_energy", "trunk_lean")
    columns = {name: [getattr(s, name) for s in samples] for name in fields}

    out = []
    for i, s in enumerate(samples):
        lo = bisect_left(times, s.time - half)
        hi = bisect_right(times, s.time + half)
        smoothed: dict[str, float | None] = {}
        for name in fields:
            if columns[name][i] is None:
                smoothed[name] = None
                continue
            vals = [v for v in columns[name][lo:hi] if v is not None]
            smoothed[name] = sum(vals) / len(vals)
        out.append(KinematicSample(time=s.time, **smoothed))
    return out


def compute_kinematics(
    frames: Sequence[PoseFrame],
    shots: Sequence[ShotFrame] | None = None,
    shot_filter: Iterable[str] = DEFAULT_SHOT_FILTER,
    window: float = DEFAULT_SMOOTHING_WINDOW,
) -> list[KinematicSample]:
    """Full pipeline: shot filtering, per-frame signals, smoothing."""
    if shots is not None:
        frames = filter_by_shot(frames, shots, shot_filter)
    return smooth(compute_samples(frames), window=window)


def write_samples_jsonl(samples: Iterable[KinematicSample]) -> str:
    """One JSON object per line with nulls for absent values."""
    return "".join(
        json.dumps(
            {
                "time": s.time,
                "arm_spread": s.arm_spread,
                "kinetic_energy": s.kinetic_energy,
                "trunk_lean": s.trunk_lean,
            }
        )
        + "\n"
        for s in samples
    )


def read_samples_jsonl(data: bytes | str) -> list[KinematicSample]:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    samples = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: not valid JSON: {exc}") from exc
        try:
            samples.append(
                KinematicSample(
                    time=float(obj["time"]),
                    arm_spread=None if obj.get("arm_spread") is None else float(obj["arm_spread"]),
                    kinetic_energy=(
                        None if obj.get("kinetic_energy") is None else float(obj["kinetic_energy"])
                    ),
                    trunk_lean=None if obj.get("trunk_lean") is None else float(obj["trunk_lean"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"line {lineno}: bad kinematic sample: {exc}") from exc
    samples.sort(key=lambda s: s.time)
    return samples
