"""Deterministic test-signal generation.

Every generator returns an AudioClip whose ``onsets`` field carries the
true event times, so synthetic clips double as labeled ground truth for
the onset detector and the end-to-end tests. Noise uses a seeded
generator: the same seed always reproduces the same samples.
"""

from __future__ import annotations

import re

import numpy as np

from .audio import CANONICAL_SR, AudioClip


class SynthError(Exception):
    """Invalid synthesis parameters or spec text."""


def _n_samples(duration: float, sample_rate: int) -> int:
    if duration <= 0:
        raise SynthError(f"duration must be positive, got {duration}")
    return int(round(duration * sample_rate))


def _envelope(n: int, sample_rate: int, decay: float | None,
              fade_out: float = 0.002) -> np.ndarray | float:
    """Optional exponential decay plus a short raised-cosine fade-out.

    The fade keeps truncated bursts from ending in a step, which would
    read as a second broadband attack to an onset detector.
    """
    if decay is not None and decay <= 0:
        raise SynthError(f"decay time constant must be positive, got {decay}")
    env = np.exp(-np.arange(n) / (decay * sample_rate)) if decay is not None else np.ones(n)
    n_fade = min(n, int(round(fade_out * sample_rate)))
    if n_fade > 1:
        ramp = 0.5 + 0.5 * np.cos(np.pi * np.arange(n_fade) / (n_fade - 1))
        env[n - n_fade:] *= ramp
    return env


def silence(duration: float, sample_rate: int = CANONICAL_SR) -> AudioClip:
    return AudioClip(np.zeros(_n_samples(duration, sample_rate)), sample_rate, onsets=())


def sine(freq: float, duration: float, amp: float = 0.8,
         sample_rate: int = CANONICAL_SR, decay: float | None = None) -> AudioClip:
    """Sine burst; onset at t=0. Optional exponential decay (seconds)."""
    if freq >= sample_rate / 2:
        raise SynthError(f"frequency {freq} is at or above Nyquist for sr {sample_rate}")
    n = _n_samples(duration, sample_rate)
    t = np.arange(n) / sample_rate
    x = amp * np.sin(2.0 * np.pi * freq * t) * _envelope(n, sample_rate, decay)
    return AudioClip(x, sample_rate, onsets=(0.0,))


def noise_burst(duration: float, amp: float = 0.8, seed: int = 0,
                band: tuple[float | None, float | None] | None = None,
                sample_rate: int = CANONICAL_SR, decay: float | None = None) -> AudioClip:
    """Seeded white-noise burst, optionally band limited, onset at t=0.

    band is (low_hz, high_hz); either edge may be None. Band limiting is
    done by zeroing rfft bins outside the band, which keeps the result a
    pure function of (duration, amp, seed, band).
    """
    n = _n_samples(duration, sample_rate)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    if band is not None:
        lo, hi = band
        spectrum = np.fft.rfft(x)
        freqs = np.fft.rfftfreq(n, 1.0 / sample_rate)
        keep = np.ones(len(freqs), dtype=bool)
        if lo is not None:
            keep &= freqs >= lo
        if hi is not None:
            keep &= freqs <= hi
        spectrum[~keep] = 0.0
        x = np.fft.irfft(spectrum, n)
    peak = np.max(np.abs(x))
    if peak > 0:
        x = x / peak * amp
    x = x * _envelope(n, sample_rate, decay)
    return AudioClip(x, sample_rate, onsets=(0.0,))


def click_track(times, sample_rate: int = CANONICAL_SR, amp: float = 1.0) -> AudioClip:
    """Unit impulses at the given times; clip ends 0.1 s after the last."""
    times = sorted(float(t) for t in times)
    if not times:
        raise SynthError("click_track needs at least one time")
    if times[0] < 0:
        raise SynthError("click times must be non-negative")
    n = int(round((times[-1] + 0.1) * sample_rate))
    x = np.zeros(n)
    for t in times:
        x[int(round(t * sample_rate))] = amp
    return AudioClip(x, sample_rate, onsets=tuple(times))


def sequence(events, duration: float | None = None,
             sample_rate: int = CANONICAL_SR) -> AudioClip:
    """Mix (time, clip) pairs onto one canvas.

    Each component clip's own onsets are shifted by its placement time and
    merged into the result's ground truth. Overlapping audio is summed and
    hard clipped to [-1, 1].
    """
    events = [(float(t), clip) for t, clip in events]
    if any(t < 0 for t, _ in events):
        raise SynthError("placement times must be non-negative")
    for _, clip in events:
        if clip.sample_rate != sample_rate:
            raise SynthError("all clips in a sequence must share the sample rate")
    end = max((t + c.duration for t, c in events), default=0.0)
    if duration is not None:
        end = max(end, duration)
    n = max(1, int(round(end * sample_rate)))
    x = np.zeros(n)
    onsets: list[float] = []
    for t, clip in events:
        start = int(round(t * sample_rate))
        stop = min(n, start + len(clip))
        x[start:stop] += clip.samples[:stop - start]
        if clip.onsets:
            onsets.extend(t + o for o in clip.onsets)
    return AudioClip(np.clip(x, -1.0, 1.0), sample_rate, onsets=tuple(sorted(onsets)))


# CLI synth spec grammar: statements separated by ';', each
#   silence(dur) | sine(freq,dur,amp[,decay]) | click(t1,t2,...)
#   | burst(dur,amp,seed[,lo,hi[,decay]])        (0 for an open band edge)
# optionally suffixed with @time for placement.
_STMT = re.compile(r"^\s*(\w+)\s*\(([^)]*)\)\s*(?:@\s*([0-9.eE+-]+))?\s*$")


def parse_spec(text: str, sample_rate: int = CANONICAL_SR) -> AudioClip:
    """Build a clip from a small text description (CLI front end)."""
    events = []
    statements = [s for s in text.split(";") if s.strip()]
    if not statements:
        raise SynthError("empty synth spec")
    for stmt in statements:
        m = _STMT.match(stmt)
        if not m:
            raise SynthError(f"cannot parse synth statement: {stmt.strip()!r}")
        name, arg_text, at = m.group(1).lower(), m.group(2), m.group(3)
        try:
            args = [float(a) for a in arg_text.split(",")] if arg_text.strip() else []
        except ValueError:
            raise SynthError(f"non-numeric argument in: {stmt.strip()!r}") from None
        t = float(at) if at is not None else 0.0
        if name == "silence":
            if len(args) != 1:
                raise SynthError("silence takes (dur)")
            clip = silence(args[0], sample_rate)
        elif name == "sine":
            if len(args) not in (3, 4):
                raise SynthError("sine takes (freq,dur,amp[,decay])")
            decay = args[3] if len(args) == 4 else None
            clip = sine(args[0], args[1], args[2], sample_rate, decay)
        elif name == "click":
            if not args:
                raise SynthError("click takes (t1,t2,...)")
            clip = click_track(args, sample_rate)
        elif name == "burst":
            if len(args) not in (3, 5, 6):
                raise SynthError("burst takes (dur,amp,seed[,lo,hi[,decay]])")
            band = None
            decay = None
            if len(args) >= 5:
                lo = args[3] if args[3] > 0 else None
                hi = args[4] if args[4] > 0 else None
                if lo is not None or hi is not None:
                    band = (lo, hi)
            if len(args) == 6:
                decay = args[5]
            clip = noise_burst(args[0], args[1], int(args[2]), band, sample_rate, decay)
        else:
            raise SynthError(f"unknown synth generator: {name!r}")
        events.append((t, clip))
    return sequence(events, sample_rate=sample_rate)
