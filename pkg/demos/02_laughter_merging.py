"""Stride windows to merged laughter events, and span coverage.

The upstream audio tagger scores 0.8 s windows; contiguous positive windows
of one label merge into continuous events. Coverage then measures the share
of any span occupied by laughter, clipping events at the span bounds.
"""

from laughline.laughter import LaughWindow, coverage, merge_windows
from laughline.timeline import TimedSpan

windows = [
    LaughWindow(start=10.0, stride=0.8, label="laughter", probability=0.85),
    LaughWindow(start=10.8, stride=0.8, label="laughter", probability=0.95),
    LaughWindow(start=11.6, stride=0.8, label="laughter", probability=0.60),
    LaughWindow(start=12.4, stride=0.8, label="laughter", probability=0.10),  # below threshold
    LaughWindow(start=14.4, stride=0.8, label="giggle", probability=0.70),
    LaughWindow(start=15.2, stride=0.8, label="giggle", probability=0.55),
    LaughWindow(start=30.4, stride=0.8, label="belly_laugh", probability=0.90),
]

events = merge_windows(windows, threshold=0.3)
print("merged events (confidence = max member probability):")
for e in events:
    print(f"  [{e.start:5.1f}, {e.end:5.1f})  {e.label:<12} conf={e.confidence:.2f}")

block = TimedSpan(0.0, 60.0)
print(f"\nlaughter coverage of [0, 60): {coverage(events, block):.4f}")
print(f"coverage of [10, 16):        {coverage(events, TimedSpan(10.0, 16.0)):.4f}")

# raising the threshold never increases total merged duration
for thr in (0.3, 0.6, 0.9):
    total = sum(e.span.duration for e in merge_windows(windows, thr))
    print(f"threshold {thr:.1f} -> total merged duration {total:4.1f} s")
