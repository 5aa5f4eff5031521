"""Incremental transcription for the live service.

The streaming path reuses the exact per-frame analysis, peak-picking
decision and feature code of the offline pipeline, holding each decision
back until its lookahead is available (or the stream has ended). Given
the same total PCM, it therefore produces bit-identical events to the
offline transcriber regardless of how the stream is chunked.

A decision for frame i needs ODF values up to frame i+3; an accepted
onset needs its analysis segment, which with the default config ends at
the same sample. An event is thus emitted no later than
(frames_per_event * hop + window)/sr plus one lookahead frame after its
onset sample arrives.
"""

from __future__ import annotations

import numpy as np

from .audio import analyze_window, frame_count, frame_segment
from .features import default_filterbank, features_from_segment
from .onset import LOOKAHEAD_FRAMES, _is_onset_frame, flux_value, hfc_value
from .pipeline import DrumEvent, Transcription, UserModel, classify_event, velocity_from_peak

_RMS_FLOOR = 1e-12


class _GrowBuffer:
    """Amortized append-only float64 sample buffer."""

    def __init__(self) -> None:
        self._data = np.empty(1 << 14)
        self.n = 0

    def append(self, samples: np.ndarray) -> None:
        needed = self.n + len(samples)
        if needed > len(self._data):
            capacity = len(self._data)
            while capacity < needed:
                capacity *= 2
            grown = np.empty(capacity)
            grown[:self.n] = self._data[:self.n]
            self._data = grown
        self._data[self.n:needed] = samples
        self.n = needed

    def view(self) -> np.ndarray:
        return self._data[:self.n]


class StreamingTranscriber:
    """Push PCM in, get classified drum events out as they complete."""

    def __init__(self, model: UserModel, sample_rate: int = 44100):
        self.model = model
        self.sample_rate = sample_rate
        config = model.feature_config
        self._window = config.window_size
        self._hop = config.hop
        self._span = config.event_span
        self._filterbank = default_filterbank(sample_rate, config)
        self._buf = _GrowBuffer()
        self._values = np.empty(256)
        self._levels = np.empty(256)
        self._n_frames = 0
        self._prev_magnitude: np.ndarray | None = None
        self._decide_at = 0
        self._last_onset_time = -np.inf
        self._pending: list[tuple[int, float]] = []  # (frame index, onset time)
        self.events: list[DrumEvent] = []
        self._final = False

    def push(self, samples: np.ndarray) -> list[DrumEvent]:
        if self._final:
            raise RuntimeError("stream already finalized")
        samples = np.asarray(samples, dtype=np.float64)
        if samples.size:
            self._buf.append(samples)
        return self._advance()

    def finalize(self) -> list[DrumEvent]:
        """Process tail frames (zero padded, as offline framing does)."""
        if self._final:
            return []
        self._final = True
        return self._advance()

    def transcription(self) -> Transcription:
        if not self._final:
            raise RuntimeError("finalize the stream before asking for a transcription")
        return Transcription(list(self.events), self._buf.n / self.sample_rate,
                             list(self.model.class_names))

    # internal machinery

    def _grow_curves(self) -> None:
        if self._n_frames == len(self._values):
            self._values = np.concatenate([self._values, np.empty(len(self._values))])
            self._levels = np.concatenate([self._levels, np.empty(len(self._levels))])

    def _add_frame(self, start: int) -> None:
        buf = self._buf.view()
        frame = analyze_window(frame_segment(buf, start, self._window), self._n_frames, start)
        if self.model.onset_params.method == "hfc":
            value = hfc_value(frame)
        else:
            value = flux_value(frame, self._prev_magnitude)
        self._prev_magnitude = frame.magnitude_spectrum
        energy = float(np.sum(np.square(buf[start:start + self._window])))
        rms = np.sqrt(energy / self._window)
        self._grow_curves()
        self._values[self._n_frames] = value
        self._levels[self._n_frames] = 20.0 * np.log10(max(rms, _RMS_FLOOR))
        self._n_frames += 1

    def _advance(self) -> list[DrumEvent]:
        n = self._buf.n
        # Frames with a full window; at finalize, the zero-padded tail too.
        while self._n_frames * self._hop + self._window <= n:
            self._add_frame(self._n_frames * self._hop)
        if self._final:
            while self._n_frames < frame_count(n, self._hop):
                self._add_frame(self._n_frames * self._hop)

        # Decide frames whose lookahead window is complete (or will never grow).
        params = self.model.onset_params
        last_index = self._n_frames - 1
        while self._decide_at <= last_index:
            i = self._decide_at
            if not self._final and i + LOOKAHEAD_FRAMES > last_index:
                break
            if _is_onset_frame(self._values[:self._n_frames], self._levels[:self._n_frames],
                               i, params, last_index):
                t = i * self._hop / self.sample_rate
                if t - self._last_onset_time >= params.min_ioi:
                    self._pending.append((i, t))
                    self._last_onset_time = t
            self._decide_at += 1

        # Emit pending events whose analysis segment is complete.
        emitted = []
        while self._pending:
            frame_index, t = self._pending[0]
            start = frame_index * self._hop
            if not self._final and start + self._span > n:
                break
            self._pending.pop(0)
            segment = frame_segment(self._buf.view(), start, self._span)
            values = features_from_segment(segment, self.sample_rate,
                                           self.model.feature_config, self._filterbank)
            event = DrumEvent(
                time=t,
                label=classify_event(self.model, values),
                velocity=velocity_from_peak(np.max(np.abs(segment))),
            )
            self.events.append(event)
            emitted.append(event)
        return emitted
