"""Onset detection: detection functions over frames plus peak picking.

Two detection functions are provided. HFC (the default) weights each
magnitude bin by its index and responds well to broadband vocal
plosives; spectral flux sums positive magnitude increases between
consecutive frames. Peak picking uses a median-based adaptive threshold
over a mostly causal window (8 past frames, 1 future), a strict local
maximum test over +-3 frames, a silence gate, and a minimum
inter-onset interval.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import (
    DEFAULT_HOP,
    DEFAULT_WINDOW,
    AudioClip,
    Frame,
    frame_levels_db,
    frames,
)

ODF_METHODS = ("hfc", "spectral_flux")

# Peak picking window geometry: strict local max over [i-3, i+3], median
# over [i-8, i+1]. LOOKAHEAD is how many future ODF values a decision for
# frame i can require; the streaming path relies on this constant.
LOOKAHEAD_FRAMES = 3
_LOCALMAX_HALF = 3
_MEDIAN_PAST = 8
_MEDIAN_FUTURE = 1


@dataclass(frozen=True)
class OnsetParams:
    method: str = "hfc"
    threshold: float = 1.5
    min_ioi: float = 0.050
    silence_gate_db: float = -60.0

    def __post_init__(self) -> None:
        if self.method not in ODF_METHODS:
            raise ValueError(f"unknown onset method {self.method!r}, expected one of {ODF_METHODS}")
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")
        if self.min_ioi < 0:
            raise ValueError("min_ioi must be non-negative")


@dataclass(frozen=True)
class OnsetEvent:
    time: float
    strength: float


@dataclass
class OnsetCurve:
    """One non-negative detection value per frame."""

    values: np.ndarray
    hop: int
    sample_rate: int

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)


def odf_hfc(frame_seq: list[Frame], hop: int = DEFAULT_HOP,
            sample_rate: int = 44100) -> OnsetCurve:
    """High frequency content: sum over bins of (b+1) * |X[b]|."""
    if not frame_seq:
        raise ValueError("odf_hfc needs at least one frame")
    weights = np.arange(1, len(frame_seq[0].magnitude_spectrum) + 1, dtype=np.float64)
    values = np.array([float(np.dot(weights, f.magnitude_spectrum)) for f in frame_seq])
    return OnsetCurve(values, hop, sample_rate)


def odf_spectral_flux(frame_seq: list[Frame], hop: int = DEFAULT_HOP,
                      sample_rate: int = 44100) -> OnsetCurve:
    """Positive spectral difference; the first frame compares against zeros."""
    if not frame_seq:
        raise ValueError("odf_spectral_flux needs at least one frame")
    prev = np.zeros_like(frame_seq[0].magnitude_spectrum)
    values = np.empty(len(frame_seq))
    for i, f in enumerate(frame_seq):
        diff = f.magnitude_spectrum - prev
        values[i] = float(np.sum(diff[diff > 0]))
        prev = f.magnitude_spectrum
    return OnsetCurve(values, hop, sample_rate)


def hfc_value(frame: Frame) -> float:
    """Single-frame HFC, for incremental (streaming) evaluation."""
    weights = np.arange(1, len(frame.magnitude_spectrum) + 1, dtype=np.float64)
    return float(np.dot(weights, frame.magnitude_spectrum))


def flux_value(frame: Frame, prev_magnitude: np.ndarray | None) -> float:
    """Single-frame spectral flux against the previous magnitude spectrum."""
    if prev_magnitude is None:
        prev_magnitude = np.zeros_like(frame.magnitude_spectrum)
    diff = frame.magnitude_spectrum - prev_magnitude
    return float(np.sum(diff[diff > 0]))


def _is_onset_frame(values: np.ndarray, levels: np.ndarray | None, i: int,
                    params: OnsetParams, last_index: int) -> bool:
    """Decide frame i given ODF values up to at least min(i+3, last_index).

    last_index is the final frame index of the curve; the streaming path
    calls this with a growing array once i+3 values exist (or the stream
    has ended), which makes its decisions identical to the offline ones.
    """
    v = values[i]
    lo = max(0, i - _LOCALMAX_HALF)
    hi = min(last_index, i + _LOCALMAX_HALF)
    window = values[lo:hi + 1]
    if not np.all(v > np.delete(window, i - lo)):
        return False
    med_lo = max(0, i - _MEDIAN_PAST)
    med_hi = min(last_index, i + _MEDIAN_FUTURE)
    if not v > params.threshold * float(np.median(values[med_lo:med_hi + 1])):
        return False
    if levels is not None and not levels[i] > params.silence_gate_db:
        return False
    return True


def pick_onsets(curve: OnsetCurve, params: OnsetParams,
                clip_rms_db: np.ndarray | None = None) -> list[OnsetEvent]:
    """Select onset frames from a detection curve.

    A frame is an onset when it is a strict local maximum over +-3
    frames, exceeds threshold times the median of the mostly causal
    window [i-8, i+1], its level passes the silence gate, and it is at
    least min_ioi after the previously accepted onset. Passing
    clip_rms_db=None disables the gate.
    """
    values = curve.values
    if len(values) == 0:
        raise ValueError("empty onset curve")
    if clip_rms_db is not None and len(clip_rms_db) != len(values):
        raise ValueError("per-frame level array must match the curve length")
    events: list[OnsetEvent] = []
    last_time = -np.inf
    last_index = len(values) - 1
    for i in range(len(values)):
        if not _is_onset_frame(values, clip_rms_db, i, params, last_index):
            continue
        # i * hop / sr, evaluated in this exact order: the streaming path
        # computes times the same way and must match bit for bit.
        t = i * curve.hop / curve.sample_rate
        if t - last_time < params.min_ioi:
            continue
        events.append(OnsetEvent(time=t, strength=float(values[i])))
        last_time = t
    return events


def detect_onsets(clip: AudioClip, params: OnsetParams = OnsetParams(),
                  window_size: int = DEFAULT_WINDOW, hop: int = DEFAULT_HOP) -> list[OnsetEvent]:
    """frames -> ODF -> peak picking, deterministic for identical inputs."""
    frame_seq = frames(clip, window_size, hop)
    odf = odf_hfc if params.method == "hfc" else odf_spectral_flux
    curve = odf(frame_seq, hop, clip.sample_rate)
    levels = frame_levels_db(clip, window_size, hop)
    return pick_onsets(curve, params, levels)
