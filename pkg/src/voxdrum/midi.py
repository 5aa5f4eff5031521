"""Standard MIDI File writing and parsing.

Writes the smallest artifact every DAW imports: format 0, one track, a
single initial tempo, explicit status bytes (running status is accepted
on read but never written). The reader exists for round-trip tests and
to bring externally produced transcriptions into the evaluator.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

from .pipeline import DrumEvent, Transcription

VLQ_MAX = (1 << 28) - 1

GM_DRUM_NOTES = {"kick": 36, "snare": 38, "hihat": 42}
# Fallback palette for classes without a conventional GM note.
_EXTRA_NOTES = (46, 41, 43, 45, 47, 49, 51, 39, 37, 56)


class MidiError(Exception):
    pass


@dataclass(frozen=True)
class MidiMapping:
    """Class name to note number, played on the drum channel."""

    note_for: dict[str, int] = field(default_factory=lambda: dict(GM_DRUM_NOTES))
    channel: int = 9  # wire value; channel 10 in 1-based MIDI speak
    note_duration: float = 0.1

    def __post_init__(self) -> None:
        notes = list(self.note_for.values())
        if any(not 0 <= n <= 127 for n in notes):
            raise MidiError("note numbers must lie in [0, 127]")
        if len(set(notes)) != len(notes):
            raise MidiError("distinct classes must map to distinct notes")
        if not 0 <= self.channel <= 15:
            raise MidiError("channel must lie in [0, 15]")

    @classmethod
    def for_classes(cls, class_names, **kwargs) -> "MidiMapping":
        """Default mapping covering arbitrary class names.

        Known names get their GM drum note; the rest draw from a fixed
        palette in class order.
        """
        note_for: dict[str, int] = {}
        spare = [n for n in _EXTRA_NOTES if n not in GM_DRUM_NOTES.values()]
        for name in class_names:
            if name in GM_DRUM_NOTES:
                note_for[name] = GM_DRUM_NOTES[name]
            else:
                while spare and spare[0] in note_for.values():
                    spare.pop(0)
                if not spare:
                    raise MidiError("ran out of default drum notes; provide an explicit mapping")
                note_for[name] = spare.pop(0)
        return cls(note_for, **kwargs)

    def label_for(self, note: int) -> str:
        for name, n in self.note_for.items():
            if n == note:
                return name
        return str(note)


def vlq_encode(value: int) -> bytes:
    """MIDI variable-length quantity, 1 to 4 bytes."""
    if not 0 <= value <= VLQ_MAX:
        raise MidiError(f"value {value} outside VLQ range [0, {VLQ_MAX}]")
    out = [value & 0x7F]
    value >>= 7
    while value:
        out.append(0x80 | (value & 0x7F))
        value >>= 7
    return bytes(reversed(out))


def vlq_decode(data: bytes, offset: int = 0) -> tuple[int, int]:
    """Decode one VLQ, returning (value, next offset)."""
    value = 0
    for i in range(4):
        if offset >= len(data):
            raise MidiError("truncated variable-length quantity")
        byte = data[offset]
        offset += 1
        value = (value << 7) | (byte & 0x7F)
        if not byte & 0x80:
            return value, offset
    raise MidiError("variable-length quantity longer than 4 bytes")


def _seconds_to_ticks(seconds: float, tempo_bpm: float, ppq: int) -> int:
    return int(math.floor(seconds * tempo_bpm / 60.0 * ppq + 0.5))


def write_smf(t: Transcription, mapping: MidiMapping | None = None,
              tempo_bpm: float = 120.0, ppq: int = 480) -> bytes:
    """Render a transcription as a format-0 SMF byte string."""
    if tempo_bpm <= 0:
        raise MidiError("tempo must be positive")
    if not 0 < ppq <= 0x7FFF:
        raise MidiError("ppq must lie in [1, 32767]")
    if mapping is None:
        mapping = MidiMapping.for_classes(t.class_names or
                                          sorted({e.label for e in t.events}))
    # (tick, sort_kind, order, message); note-offs precede note-ons on ties.
    messages: list[tuple[int, int, int, bytes]] = []
    for i, event in enumerate(t.events):
        if event.label not in mapping.note_for:
            raise MidiError(f"no note mapped for class {event.label!r}")
        note = mapping.note_for[event.label]
        velocity = min(127, max(1, int(event.velocity)))
        on = _seconds_to_ticks(event.time, tempo_bpm, ppq)
        off = max(on, _seconds_to_ticks(event.time + mapping.note_duration, tempo_bpm, ppq))
        if off > VLQ_MAX:
            raise MidiError(f"event at {event.time:.3f}s overflows the tick range")
        messages.append((on, 1, i, bytes((0x90 | mapping.channel, note, velocity))))
        messages.append((off, 0, i, bytes((0x80 | mapping.channel, note, 0))))
    messages.sort(key=lambda m: m[:3])

    track = bytearray()
    track += vlq_encode(0)
    track += bytes((0xFF, 0x51, 0x03)) + round(60_000_000 / tempo_bpm).to_bytes(3, "big")
    tick = 0
    for msg_tick, _, _, payload in messages:
        track += vlq_encode(msg_tick - tick)
        track += payload
        tick = msg_tick
    track += vlq_encode(0)
    track += bytes((0xFF, 0x2F, 0x00))

    header = b"MThd" + struct.pack(">IHHH", 6, 0, 1, ppq)
    return header + b"MTrk" + struct.pack(">I", len(track)) + bytes(track)


@dataclass(frozen=True)
class MidiNote:
    time: float
    label: str
    note: int
    velocity: int

    def as_drum_event(self) -> DrumEvent:
        return DrumEvent(self.time, self.label, self.velocity)


class _TempoMap:
    """Piecewise tick-to-seconds conversion from set-tempo events."""

    def __init__(self, changes: list[tuple[int, int]], ppq: int):
        self.ppq = ppq
        self.changes = sorted(changes)
        if not self.changes or self.changes[0][0] != 0:
            self.changes.insert(0, (0, 500_000))  # 120 bpm default

    def seconds_at(self, tick: int) -> float:
        seconds = 0.0
        prev_tick, tempo = self.changes[0]
        for change_tick, next_tempo in self.changes[1:]:
            if change_tick >= tick:
                break
            seconds += (change_tick - prev_tick) * tempo / (self.ppq * 1e6)
            prev_tick, tempo = change_tick, next_tempo
        return seconds + (tick - prev_tick) * tempo / (self.ppq * 1e6)


def _parse_track(data: bytes) -> list[tuple[int, int, bytes]]:
    """Decode one MTrk payload into (tick, status, data_bytes) messages."""
    messages = []
    offset = 0
    tick = 0
    running_status = None
    while offset < len(data):
        delta, offset = vlq_decode(data, offset)
        tick += delta
        if offset >= len(data):
            raise MidiError("truncated track: delta time without an event")
        status = data[offset]
        if status == 0xFF:
            if offset + 1 >= len(data):
                raise MidiError("truncated meta event")
            meta_type = data[offset + 1]
            length, body_start = vlq_decode(data, offset + 2)
            if body_start + length > len(data):
                raise MidiError("truncated meta event body")
            messages.append((tick, 0xFF, bytes((meta_type,)) + data[body_start:body_start + length]))
            offset = body_start + length
            running_status = None
        elif status in (0xF0, 0xF7):
            length, body_start = vlq_decode(data, offset + 1)
            offset = body_start + length
            if offset > len(data):
                raise MidiError("truncated sysex event")
            running_status = None
        else:
            if status & 0x80:
                offset += 1
                running_status = status
            elif running_status is not None:
                status = running_status
            else:
                raise MidiError(f"data byte 0x{status:02x} without a running status")
            n_data = 1 if (status & 0xF0) in (0xC0, 0xD0) else 2
            if offset + n_data > len(data):
                raise MidiError("truncated channel event")
            messages.append((tick, status, data[offset:offset + n_data]))
            offset += n_data
    return messages


def read_smf(data: bytes, mapping: MidiMapping | None = None) -> list[MidiNote]:
    """Extract note-on events (velocity > 0) from a format 0 or 1 SMF.

    Ticks are converted to seconds through the file's tempo map; note
    numbers become class names through the mapping's inverse, unknown
    notes are labeled by their number.
    """
    if mapping is None:
        mapping = MidiMapping()
    if len(data) < 14 or data[:4] != b"MThd":
        raise MidiError("not a Standard MIDI File: missing MThd header")
    header_len, fmt, ntrks, division = struct.unpack(">IHHH", data[4:14])
    if header_len < 6:
        raise MidiError(f"bad MThd length {header_len}")
    if fmt not in (0, 1):
        raise MidiError(f"unsupported SMF format {fmt}")
    if division & 0x8000:
        raise MidiError("SMPTE division is not supported")
    if division == 0:
        raise MidiError("division must be positive")

    offset = 8 + header_len
    tracks = []
    for _ in range(ntrks):
        if offset + 8 > len(data):
            raise MidiError("truncated file: missing track chunk")
        if data[offset:offset + 4] != b"MTrk":
            raise MidiError(f"expected MTrk chunk at byte {offset}")
        (length,) = struct.unpack(">I", data[offset + 4:offset + 8])
        if offset + 8 + length > len(data):
            raise MidiError("truncated track chunk")
        tracks.append(data[offset + 8:offset + 8 + length])
        offset += 8 + length

    parsed = [_parse_track(t) for t in tracks]
    tempo_changes = []
    for messages in parsed:
        for tick, status, body in messages:
            if status == 0xFF and len(body) >= 1 and body[0] == 0x51:
                if len(body) != 4:
                    raise MidiError("malformed set-tempo event")
                tempo_changes.append((tick, int.from_bytes(body[1:4], "big")))
    tempo_map = _TempoMap(tempo_changes, division)

    notes = []
    for messages in parsed:
        for tick, status, body in messages:
            if (status & 0xF0) == 0x90 and body[1] > 0:
                notes.append(MidiNote(
                    time=tempo_map.seconds_at(tick),
                    label=mapping.label_for(body[0]),
                    note=body[0],
                    velocity=body[1],
                ))
    notes.sort(key=lambda n: (n.time, n.note))
    return notes
