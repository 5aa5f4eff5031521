"""
Why per-user training matters
=============================

Two synthetic users vocalise the same three drum classes with permuted
timbres: user A's kick lives where user B's hihat does in feature
space. Each user's model transcribes their own performance almost
perfectly; swap the models and the same audio comes out mislabeled.
"""

import random

import numpy as np

from voxdrum import synth
from voxdrum.evaluation import RefEvent, evaluate
from voxdrum.pipeline import ClassSpec, train_user_model, transcribe

AMPS = [0.9, 0.5, 0.75, 0.4, 0.62]


def plosive_sine(freq, i, base):
    amp = AMPS[i % 5]
    attack = synth.noise_burst(0.012, 0.6 * amp, seed=base + 700 + i, decay=0.004)
    return synth.sequence([(0.0, attack), (0.0, synth.sine(freq, 0.15, amp, decay=0.035))])


def broadband(i, base):
    return synth.noise_burst(0.12, AMPS[(i + 2) % 5], seed=base + 100 + i, decay=0.05)


def highpass(cut, i, base):
    return synth.noise_burst(0.08, AMPS[(i + 4) % 5], seed=base + 200 + i,
                             band=(cut, None), decay=0.03)


USERS = {
    "A": {"kick": lambda i: plosive_sine(80, i, 0),
          "snare": lambda i: broadband(i, 0),
          "hihat": lambda i: highpass(6000, i, 0)},
    "B": {"kick": lambda i: broadband(i, 50000),
          "snare": lambda i: highpass(6500, i, 50000),
          "hihat": lambda i: plosive_sine(90, i, 50000)},
}


def enrolment(timbres):
    return synth.sequence(
        [(0.3 + 0.35 * (5 * j + i), timbres[name](i))
         for j, name in enumerate(("kick", "snare", "hihat")) for i in range(5)])


def performance(timbres, pattern, base):
    t, events, truth = 0.3, [], []
    for step, name in enumerate(pattern):
        events.append((t, timbres[name](base + step)))
        truth.append(RefEvent(t, name))
        t += 0.28
    return synth.sequence(events, duration=t + 0.3), truth


spec = ClassSpec.parse("kick:5,snare:5,hihat:5")
models = {name: train_user_model(enrolment(timbres), spec)
          for name, timbres in USERS.items()}

rng = random.Random(2)
pattern = [rng.choice(["kick", "snare", "hihat"]) for _ in range(12)]
print("pattern:", " ".join(pattern), "\n")

print(f"{'audio':>6s} {'model':>6s} {'mean F':>8s}   per-class F")
for audio_user in USERS:
    clip, truth = performance(USERS[audio_user], pattern, 3000)
    for model_user in USERS:
        report = evaluate(transcribe(clip, models[model_user]).events, truth)
        per_class = {c: s.f_measure for c, s in report.per_class.items()}
        mean_f = np.mean(list(per_class.values()))
        tag = "matched" if audio_user == model_user else "swapped"
        detail = "  ".join(f"{c}={f:.2f}" for c, f in per_class.items())
        print(f"{audio_user:>6s} {model_user:>6s} {mean_f:8.3f}   {detail}   ({tag})")
