"""Timbral descriptor extraction for percussive events.

Each detected onset yields one 20-dimensional vector in a fixed order
that is part of the model file contract:

    mfcc_0 .. mfcc_12, centroid_hz, spread_hz, slope, decrease,
    rolloff_hz, zcr_per_s, zc_count

MFCCs are the orthonormal DCT-II of log mel-band energies (coefficient 0
retained; it carries loudness, useful for kick/hat separation). The five
spectral shape descriptors treat the magnitude spectrum as a
distribution over frequency. An all-zero spectrum maps to all-zero
descriptors rather than NaN so silence never poisons the classifier.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dct

from .audio import (
    AudioClip,
    analyze_window,
    bin_frequencies,
    frame_segment,
    hann_window,
)
from .onset import OnsetEvent

N_FEATURES = 20
FEATURE_NAMES = tuple(
    [f"mfcc_{i}" for i in range(13)]
    + ["centroid_hz", "spread_hz", "slope", "decrease", "rolloff_hz", "zcr_per_s", "zc_count"]
)

_LOG_EPS = 1e-10


class FeatureError(Exception):
    pass


@dataclass(frozen=True)
class FeatureConfig:
    window_size: int = 1024
    hop: int = 512
    frames_per_event: int = 4
    n_mels: int = 40
    n_mfcc: int = 13
    rolloff_fraction: float = 0.95

    def __post_init__(self) -> None:
        if self.frames_per_event < 1:
            raise ValueError("frames_per_event must be >= 1")
        if self.n_mfcc > self.n_mels:
            raise ValueError("n_mfcc cannot exceed n_mels")

    @property
    def event_span(self) -> int:
        """Samples covered by one event's analysis segment."""
        return (self.frames_per_event - 1) * self.hop + self.window_size


@dataclass(frozen=True)
class FeatureVector:
    """One event's descriptor in canonical order; exactly 20 finite values."""

    values: np.ndarray
    onset_time: float

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (N_FEATURES,):
            raise FeatureError(f"expected {N_FEATURES} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise FeatureError("feature values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (np.power(10.0, np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(sample_rate: int, n_fft_bins: int, n_mels: int) -> np.ndarray:
    """Triangular filters with centers equally spaced on the mel scale.

    Filter m rises linearly from center m-1 to center m and falls to
    center m+1 (edge points 0 Hz and sample_rate/2 included), sampled at
    the rfft bin frequencies. Adjacent filters therefore overlap exactly
    at each other's centers.
    """
    if n_mels < 2:
        raise ValueError("n_mels must be >= 2")
    window_size = (n_fft_bins - 1) * 2
    freqs = bin_frequencies(window_size, sample_rate)
    mel_points = np.linspace(0.0, float(hz_to_mel(sample_rate / 2)), n_mels + 2)
    hz_points = mel_to_hz(mel_points)
    bank = np.zeros((n_mels, n_fft_bins))
    for m in range(n_mels):
        left, center, right = hz_points[m], hz_points[m + 1], hz_points[m + 2]
        rising = (freqs - left) / (center - left)
        falling = (right - freqs) / (right - center)
        bank[m] = np.maximum(0.0, np.minimum(rising, falling))
        if not np.any(bank[m] > 0):
            raise ValueError(
                f"mel filter {m} is empty: n_mels={n_mels} too large for {n_fft_bins} bins"
            )
    return bank


_FILTERBANK_CACHE: dict[tuple[int, int, int], np.ndarray] = {}


def default_filterbank(sample_rate: int, config: FeatureConfig) -> np.ndarray:
    key = (sample_rate, config.window_size // 2 + 1, config.n_mels)
    bank = _FILTERBANK_CACHE.get(key)
    if bank is None:
        bank = mel_filterbank(*key)
        bank.flags.writeable = False
        _FILTERBANK_CACHE[key] = bank
    return bank


def mfcc(power_spectrum: np.ndarray, filterbank: np.ndarray, n_mfcc: int = 13) -> np.ndarray:
    """First n_mfcc orthonormal DCT-II coefficients of log band energies."""
    power_spectrum = np.asarray(power_spectrum, dtype=np.float64)
    if filterbank.shape[1] != len(power_spectrum):
        raise FeatureError(
            f"spectrum length {len(power_spectrum)} does not match filterbank {filterbank.shape}"
        )
    energies = np.log(np.maximum(_LOG_EPS, filterbank @ power_spectrum))
    return dct(energies, type=2, norm="ortho")[:n_mfcc]


def spectral_descriptors(magnitude_spectrum: np.ndarray, bin_freqs: np.ndarray,
                         rolloff_fraction: float = 0.95) -> dict[str, float]:
    """Centroid, spread, slope, decrease and rolloff of one spectrum.

    Weights are the normalized magnitudes. Slope is the least-squares
    slope of |X[b]| against frequency; decrease averages the per-bin
    magnitude drop relative to bin 0, weighted by 1/b; rolloff is the
    lowest bin frequency below which 95 percent of the spectral energy
    lies. An all-zero spectrum returns zeros by convention.
    """
    mag = np.asarray(magnitude_spectrum, dtype=np.float64)
    freqs = np.asarray(bin_freqs, dtype=np.float64)
    if np.any(mag < 0):
        raise FeatureError("magnitude spectrum must be non-negative")
    total = float(np.sum(mag))
    if total == 0.0:
        return {"centroid_hz": 0.0, "spread_hz": 0.0, "slope": 0.0,
                "decrease": 0.0, "rolloff_hz": 0.0}
    p = mag / total
    centroid = float(np.sum(freqs * p))
    spread = float(np.sqrt(np.sum((freqs - centroid) ** 2 * p)))
    fbar = float(np.mean(freqs))
    denom = float(np.sum((freqs - fbar) ** 2))
    slope = float(np.sum((freqs - fbar) * (mag - np.mean(mag))) / denom) if denom > 0 else 0.0
    tail = float(np.sum(mag[1:]))
    if tail > 0:
        b = np.arange(1, len(mag))
        decrease = float(np.sum((mag[1:] - mag[0]) / b) / tail)
    else:
        decrease = 0.0
    energy = mag * mag
    cumulative = np.cumsum(energy)
    target = rolloff_fraction * cumulative[-1]
    rolloff = float(freqs[int(np.searchsorted(cumulative, target))])
    return {"centroid_hz": centroid, "spread_hz": spread, "slope": slope,
            "decrease": decrease, "rolloff_hz": rolloff}


def zero_crossing_stats(segment: np.ndarray, sample_rate: int) -> dict[str, float]:
    """Sign-change count and rate; exact zeros count as positive."""
    segment = np.asarray(segment, dtype=np.float64)
    if len(segment) == 0:
        raise FeatureError("zero_crossing_stats needs a non-empty segment")
    signs = np.where(segment >= 0, 1, -1)
    count = int(np.sum(signs[1:] != signs[:-1]))
    return {"zc_count": float(count), "zcr_per_s": count * sample_rate / len(segment)}


def event_segment(clip: AudioClip, onset: OnsetEvent, config: FeatureConfig) -> tuple[np.ndarray, int]:
    """The contiguous samples spanned by an event's analysis frames.

    Returns (segment, start_sample); the segment is zero padded past the
    clip end so late events keep their full span.
    """
    onset_sample = int(round(onset.time * clip.sample_rate))
    if onset_sample >= len(clip) or onset_sample < 0:
        raise FeatureError(f"onset at {onset.time:.3f}s lies outside the clip")
    start = (onset_sample // config.hop) * config.hop
    return frame_segment(clip.samples, start, config.event_span), start


def features_from_segment(segment: np.ndarray, sample_rate: int, config: FeatureConfig,
                          filterbank: np.ndarray | None = None) -> np.ndarray:
    """Canonical 20-value descriptor of one event segment.

    MFCCs and spectral descriptors are computed per frame within the
    segment and averaged; zero-crossing statistics are computed once over
    the whole segment.
    """
    if len(segment) != config.event_span:
        raise FeatureError(f"segment must have {config.event_span} samples, got {len(segment)}")
    if filterbank is None:
        filterbank = default_filterbank(sample_rate, config)
    freqs = bin_frequencies(config.window_size, sample_rate)
    mfcc_acc = np.zeros(config.n_mfcc)
    desc_acc = np.zeros(5)
    for j in range(config.frames_per_event):
        frame = analyze_window(segment[j * config.hop:j * config.hop + config.window_size])
        mfcc_acc += mfcc(frame.power_spectrum, filterbank, config.n_mfcc)
        d = spectral_descriptors(frame.magnitude_spectrum, freqs, config.rolloff_fraction)
        desc_acc += (d["centroid_hz"], d["spread_hz"], d["slope"], d["decrease"], d["rolloff_hz"])
    mfcc_acc /= config.frames_per_event
    desc_acc /= config.frames_per_event
    zc = zero_crossing_stats(segment, sample_rate)
    return np.concatenate([mfcc_acc, desc_acc, [zc["zcr_per_s"], zc["zc_count"]]])


def event_features(clip: AudioClip, onset: OnsetEvent, config: FeatureConfig = FeatureConfig(),
                   filterbank: np.ndarray | None = None) -> FeatureVector:
    """Descriptor for the event starting at the frame containing the onset."""
    segment, _ = event_segment(clip, onset, config)
    values = features_from_segment(segment, clip.sample_rate, config, filterbank)
    return FeatureVector(values, onset.time)


# hann_window is re-exported for oracle tests that reproduce the framing.
__all__ = [
    "FEATURE_NAMES",
    "N_FEATURES",
    "FeatureConfig",
    "FeatureError",
    "FeatureVector",
    "default_filterbank",
    "event_features",
    "event_segment",
    "features_from_segment",
    "hann_window",
    "hz_to_mel",
    "mel_filterbank",
    "mel_to_hz",
    "mfcc",
    "spectral_descriptors",
    "zero_crossing_stats",
]
