"""
Live mode: events appear while the audio is still arriving
==========================================================

Feed a performance to the streaming transcriber in 20 ms chunks (the
size a browser capture callback might deliver) and report how long
after each onset its classified event was emitted. The streaming path
runs the exact offline math with held-back decisions, so the final
event list is identical to an offline transcription of the same PCM.
"""

from voxdrum import synth
from voxdrum.audio import AudioClip
from voxdrum.pipeline import ClassSpec, train_user_model, transcribe
from voxdrum.streaming import StreamingTranscriber

AMPS = [0.9, 0.5, 0.75, 0.4, 0.62]


def kick(i):
    amp = AMPS[i % 5]
    attack = synth.noise_burst(0.012, 0.6 * amp, seed=700 + i, decay=0.004)
    return synth.sequence([(0.0, attack), (0.0, synth.sine(80, 0.15, amp, decay=0.035))])


def snare(i):
    return synth.noise_burst(0.12, AMPS[(i + 2) % 5], seed=100 + i, decay=0.05)


def hihat(i):
    return synth.noise_burst(0.08, AMPS[(i + 4) % 5], seed=200 + i,
                             band=(6000, None), decay=0.03)


makers = {"kick": kick, "snare": snare, "hihat": hihat}
enrolment = synth.sequence(
    [(0.3 + 0.35 * (5 * j + i), maker(i))
     for j, maker in enumerate(makers.values()) for i in range(5)])
model = train_user_model(enrolment, ClassSpec.parse("kick:5,snare:5,hihat:5"))

pattern = ["kick", "hihat", "snare", "hihat", "kick", "kick", "snare", "hihat"]
t, events = 0.3, []
for step, name in enumerate(pattern):
    events.append((t, makers[name](step + 60)))
    t += 0.3
performance = synth.sequence(events, duration=t + 0.3)

chunk = 882  # 20 ms at 44.1 kHz
stream = StreamingTranscriber(model)
samples = performance.samples
print(f"streaming {performance.duration:.2f} s of audio in {chunk}-sample chunks\n")
print(f"{'event time':>10s} {'label':>6s} {'vel':>4s} {'emitted after onset':>20s}")
live_events = []
for start in range(0, len(samples), chunk):
    pushed = min(len(samples), start + chunk)
    for event in stream.push(samples[start:start + chunk]):
        latency_ms = (pushed - int(round(event.time * 44100))) / 44.1
        live_events.append(event)
        print(f"{event.time:9.3f}s {event.label:>6s} {event.velocity:4d} {latency_ms:17.1f} ms")
live_events.extend(stream.finalize())

offline = transcribe(AudioClip(samples, 44100), model)
print(f"\nstream produced {len(live_events)} events; "
      f"identical to offline transcription: {live_events == offline.events}")
