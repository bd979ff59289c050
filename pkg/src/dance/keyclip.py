"""Keyframe detection from frame differences and fixed-length key-clip windows.

The detector is deliberately simple and fully deterministic: mean absolute
per-pixel difference between consecutive luminance frames, moving-average
smoothing, then strict local maxima above mean + k * std of the smoothed
signal, keeping the strongest peaks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputTooShort, ValidationError

DEFAULT_SMOOTH_WINDOW = 5
DEFAULT_THRESHOLD_K = 1.0
DEFAULT_MAX_KEYFRAMES = 5


@dataclass(frozen=True)
class KeyClipWindow:
    """Half-open frame window [start, end) of fixed length, centered on a keyframe."""

    video_id: str
    start: int
    end: int
    center: int

    def to_dict(self) -> dict:
        return {"video_id": self.video_id, "start": self.start, "end": self.end, "center": self.center}


def luminance_diff_signal(frames: np.ndarray) -> np.ndarray:
    """Mean absolute pixel difference between consecutive frames.

    Args:
        frames: T x H x W luminance grids.

    Returns:
        Length T-1 non-negative series; element t compares frames t and t+1.
    """
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 3:
        raise ValidationError(f"frames must be T x H x W, got shape {frames.shape}")
    if frames.shape[0] < 2:
        raise InputTooShort("need at least 2 frames to form a difference signal")
    return np.abs(np.diff(frames, axis=0)).mean(axis=(1, 2))


def moving_average(signal: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average; the window is truncated at the boundaries."""
    if window < 1 or window % 2 == 0:
        raise ValidationError(f"smooth window must be odd and >= 1, got {window}")
    signal = np.asarray(signal, dtype=np.float64)
    if window == 1:
        return signal.copy()
    half = window // 2
    csum = np.cumsum(np.concatenate(([0.0], signal)))
    n = len(signal)
    lo = np.maximum(np.arange(n) - half, 0)
    hi = np.minimum(np.arange(n) + half + 1, n)
    return (csum[hi] - csum[lo]) / (hi - lo)


def detect_keyframes(
    signal: np.ndarray,
    smooth_window: int = DEFAULT_SMOOTH_WINDOW,
    threshold_k: float = DEFAULT_THRESHOLD_K,
    max_keyframes: int = DEFAULT_MAX_KEYFRAMES,
) -> list[int]:
    """Pick peak indices of the smoothed difference signal.

    A keyframe is a strict interior local maximum of the smoothed signal whose
    value exceeds mean + threshold_k * std (population std) of the smoothed
    signal.  At most *max_keyframes* indices are kept, preferring larger peak
    values with ties broken by the earlier index; the result is ascending.
    """
    signal = np.asarray(signal, dtype=np.float64)
    if signal.size < 1:
        raise InputTooShort("empty difference signal")
    smoothed = moving_average(signal, smooth_window)
    threshold = smoothed.mean() + threshold_k * smoothed.std()
    peaks = [
        t
        for t in range(1, len(smoothed) - 1)
        if smoothed[t] > smoothed[t - 1] and smoothed[t] > smoothed[t + 1] and smoothed[t] > threshold
    ]
    peaks.sort(key=lambda t: (-smoothed[t], t))
    return sorted(peaks[:max_keyframes])


def extract_key_clips(keyframes: list[int], length: int, num_frames: int, video_id: str) -> list[KeyClipWindow]:
    """Turn keyframe indices into length-L windows clamped inside [0, num_frames).

    Windows are centered at each keyframe and shifted (never shortened) to fit;
    duplicates after clamping are removed, keeping keyframe order.
    """
    if length < 1:
        raise ValidationError(f"clip length must be >= 1, got {length}")
    if length > num_frames:
        raise InputTooShort(f"clip length {length} exceeds video length {num_frames}")
    windows: list[KeyClipWindow] = []
    seen: set[int] = set()
    for c in keyframes:
        start = min(max(c - length // 2, 0), num_frames - length)
        if start in seen:
            continue
        seen.add(start)
        windows.append(KeyClipWindow(video_id=video_id, start=start, end=start + length, center=int(c)))
    return windows
