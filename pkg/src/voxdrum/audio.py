"""Audio ingestion and frame decomposition.

Everything downstream works on mono float64 signals at a canonical rate
(44100 Hz by default) cut into Hann-windowed, power-of-two frames. WAV
reading is delegated to scipy; frames are analysed one at a time through
a single helper so that offline and streaming paths produce bit-identical
spectra.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.io import wavfile

CANONICAL_SR = 44100
DEFAULT_WINDOW = 1024
DEFAULT_HOP = 512

# Floor for RMS before converting to dB, keeps log10 finite on silence.
_RMS_FLOOR = 1e-12


class AudioError(Exception):
    """Unreadable, unsupported or degenerate audio input."""


@dataclass(frozen=True)
class AudioClip:
    """Immutable mono sample buffer.

    samples are float64 in [-1, 1]; sample_rate is a positive integer.
    Clips produced by the synth module carry their true onset times in
    ``onsets`` for use as ground truth.
    """

    samples: np.ndarray
    sample_rate: int
    onsets: tuple[float, ...] | None = field(default=None)

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise AudioError("AudioClip requires a 1-D sample buffer")
        if self.sample_rate <= 0:
            raise AudioError("sample_rate must be positive")
        if not np.all(np.isfinite(samples)):
            raise AudioError("samples must be finite")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass
class Frame:
    """One analysis window of a clip.

    magnitude_spectrum is |X| over the window_size/2 + 1 rfft bins;
    power_spectrum is |X|^2 / window_size, a scaling under which the sum
    over bins (symmetric bins doubled) equals sum(windowed^2).
    """

    index: int
    start_sample: int
    windowed: np.ndarray
    magnitude_spectrum: np.ndarray
    power_spectrum: np.ndarray


_HANN_CACHE: dict[int, np.ndarray] = {}


def hann_window(n: int) -> np.ndarray:
    """Periodic Hann window of length n."""
    win = _HANN_CACHE.get(n)
    if win is None:
        win = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)
        win.flags.writeable = False
        _HANN_CACHE[n] = win
    return win


def analyze_window(segment: np.ndarray, index: int = 0, start_sample: int = 0) -> Frame:
    """Window one segment and attach its spectra.

    The segment must already have the full window length; both the batch
    framing below and the incremental streaming path call this, which is
    what keeps their spectra identical.
    """
    n = len(segment)
    windowed = segment * hann_window(n)
    spectrum = np.fft.rfft(windowed)
    magnitude = np.abs(spectrum)
    power = magnitude * magnitude / n
    return Frame(index, start_sample, windowed, magnitude, power)


def _validate_framing(window_size: int, hop: int) -> None:
    if window_size <= 0 or window_size & (window_size - 1):
        raise ValueError(f"window_size must be a power of two, got {window_size}")
    if not 0 < hop <= window_size:
        raise ValueError(f"hop must satisfy 0 < hop <= window_size, got {hop}")


def frame_count(n_samples: int, hop: int) -> int:
    return -(-n_samples // hop)


def frame_segment(samples: np.ndarray, start: int, window_size: int) -> np.ndarray:
    """Samples [start, start + window_size), zero padded past the end."""
    seg = samples[start:start + window_size]
    if len(seg) < window_size:
        seg = np.concatenate([seg, np.zeros(window_size - len(seg))])
    return seg


def frames(clip: AudioClip, window_size: int = DEFAULT_WINDOW, hop: int = DEFAULT_HOP) -> list[Frame]:
    """Decompose a clip into ceil(len/hop) Hann-windowed frames.

    Frame i covers samples [i*hop, i*hop + window_size); tail frames are
    zero padded so events near the clip end stay analysable.
    """
    _validate_framing(window_size, hop)
    if len(clip) == 0:
        raise AudioError("cannot frame an empty clip")
    out = []
    for i in range(frame_count(len(clip), hop)):
        start = i * hop
        out.append(analyze_window(frame_segment(clip.samples, start, window_size), i, start))
    return out


def frame_levels_db(clip: AudioClip, window_size: int = DEFAULT_WINDOW, hop: int = DEFAULT_HOP) -> np.ndarray:
    """Per-frame RMS level in dBFS over the raw (pre-window) segment.

    Tail padding counts toward the divisor, matching frames().
    """
    _validate_framing(window_size, hop)
    if len(clip) == 0:
        raise AudioError("cannot frame an empty clip")
    x2 = clip.samples * clip.samples
    levels = np.empty(frame_count(len(clip), hop))
    for i in range(len(levels)):
        start = i * hop
        energy = float(np.sum(x2[start:start + window_size]))
        rms = np.sqrt(energy / window_size)
        levels[i] = 20.0 * np.log10(max(rms, _RMS_FLOOR))
    return levels


def bin_frequencies(window_size: int, sample_rate: int) -> np.ndarray:
    """Center frequency in Hz of each rfft bin."""
    return np.arange(window_size // 2 + 1) * (sample_rate / window_size)


def resample_linear(samples: np.ndarray, src_rate: int, dst_rate: int) -> np.ndarray:
    """Linear-interpolation resampling.

    Not band limited; acceptable here because the events of interest are
    broadband percussive bursts. Preserves constants exactly and duration
    to within one sample period.
    """
    if src_rate == dst_rate:
        return samples
    n_out = max(1, int(round(len(samples) * dst_rate / src_rate)))
    positions = np.arange(n_out) * (src_rate / dst_rate)
    return np.interp(positions, np.arange(len(samples)), samples)


def _to_float(data: np.ndarray) -> np.ndarray:
    if data.dtype == np.int16:
        return data.astype(np.float64) / 32768.0
    if data.dtype == np.int32:
        # scipy delivers 24-bit PCM left-justified in int32.
        return data.astype(np.float64) / 2147483648.0
    if data.dtype in (np.float32, np.float64):
        return data.astype(np.float64)
    raise AudioError(f"unsupported WAV sample format: {data.dtype}")


def load_wav(path, target_sr: int = CANONICAL_SR) -> AudioClip:
    """Load a PCM WAV file as a mono clip at target_sr.

    Stereo is downmixed by channel mean; rate conversion is linear. 16/24
    bit integer and 32 bit float PCM are supported.
    """
    try:
        src_rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise AudioError(f"no such file: {path}") from None
    except Exception as exc:
        raise AudioError(f"unreadable WAV file {path}: {exc}") from exc
    if data.size == 0:
        raise AudioError(f"zero-length audio: {path}")
    if data.ndim == 2:
        if data.shape[1] > 2:
            raise AudioError(f"more than 2 channels not supported: {path}")
        data = _to_float(data).mean(axis=1)
    elif data.ndim == 1:
        data = _to_float(data)
    else:
        raise AudioError(f"unsupported channel layout in {path}")
    data = np.clip(data, -1.0, 1.0)
    if src_rate != target_sr:
        data = resample_linear(data, src_rate, target_sr)
    return AudioClip(data, target_sr)


def load_wav_bytes(data: bytes, target_sr: int = CANONICAL_SR) -> AudioClip:
    """load_wav for an in-memory WAV payload (service uploads)."""
    import io

    return load_wav(io.BytesIO(data), target_sr)


def save_wav(path, clip: AudioClip) -> None:
    """Write a clip as 16-bit PCM WAV."""
    pcm = np.clip(np.floor(clip.samples * 32768.0 + 0.5), -32768, 32767).astype(np.int16)
    wavfile.write(path, clip.sample_rate, pcm)
