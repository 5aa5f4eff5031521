"""Shared synthetic fixtures.

A SyntheticUser stands in for one person's vocalised drum timbres:
kick = plosive attack into a decaying low sine, snare = broadband noise
burst, hihat = high-passed noise burst, all over a -35 dB breath-noise
floor with loudness varying across exemplars. User "b" permutes and
shifts the same recipes so cross-applying models degrades, mirroring a
two-user swap.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

import numpy as np
import pytest

from voxdrum import ClassSpec, synth, train_user_model
from voxdrum.audio import AudioClip

AMPS = (0.9, 0.5, 0.75, 0.4, 0.62)


def _with_floor(clip: AudioClip, seed: int, rel_db: float = -35.0) -> AudioClip:
    peak = float(np.max(np.abs(clip.samples)))
    floor = synth.noise_burst(clip.duration, peak * 10 ** (rel_db / 20), seed=9000 + seed)
    return synth.sequence([(0.0, clip), (0.0, floor)])


def _plosive_sine(freq: float, i: int, seed_base: int) -> AudioClip:
    amp = AMPS[i % 5]
    attack = synth.noise_burst(0.012, 0.6 * amp, seed=seed_base + 700 + i, decay=0.004)
    body = synth.sine(freq, 0.15, amp, decay=0.035)
    return _with_floor(synth.sequence([(0.0, attack), (0.0, body)]), seed_base + i)


def _broadband(i: int, seed_base: int) -> AudioClip:
    return _with_floor(
        synth.noise_burst(0.12, AMPS[(i + 2) % 5], seed=seed_base + 100 + i, decay=0.05),
        seed_base + 300 + i)


def _highpass(cutoff: float, i: int, seed_base: int) -> AudioClip:
    return _with_floor(
        synth.noise_burst(0.08, AMPS[(i + 4) % 5], seed=seed_base + 200 + i,
                          band=(cutoff, None), decay=0.03),
        seed_base + 600 + i)


@dataclass
class SyntheticUser:
    name: str
    timbres: dict[str, Callable[[int], AudioClip]]
    class_names: tuple[str, ...] = ("kick", "snare", "hihat")
    exemplars_per_class: int = 5

    def class_spec(self) -> ClassSpec:
        return ClassSpec(tuple((n, self.exemplars_per_class) for n in self.class_names))

    def enrolment_clip(self, spacing: float = 0.35, lead: float = 0.3) -> AudioClip:
        events = []
        t = lead
        for name in self.class_names:
            for i in range(self.exemplars_per_class):
                events.append((t, self.timbres[name](i)))
                t += spacing
        return synth.sequence(events, duration=t + 0.3)

    def performance(self, pattern: list[str], spacing: float = 0.28,
                    lead: float = 0.3, variant: int = 0) -> tuple[AudioClip, list[float]]:
        """Audio for a label pattern plus its true event times.

        variant picks a disjoint family of exemplar seeds so performances
        never reuse the enrolment takes.
        """
        events, times = [], []
        t = lead
        for j, label in enumerate(pattern):
            events.append((t, self.timbres[label](1000 * (variant + 1) + j)))
            times.append(t)
            t += spacing
        return synth.sequence(events, duration=t + 0.3), times

    def train(self, **kwargs):
        return train_user_model(self.enrolment_clip(), self.class_spec(), **kwargs)


def make_user(which: str = "a") -> SyntheticUser:
    if which == "a":
        return SyntheticUser("a", {
            "kick": lambda i: _plosive_sine(80, i, 0),
            "snare": lambda i: _broadband(i, 0),
            "hihat": lambda i: _highpass(6000, i, 0),
        })
    if which == "b":
        # Permuted relative to user a: b's hihat sits where a's kick does
        # in feature space, and so on.
        return SyntheticUser("b", {
            "kick": lambda i: _broadband(i, 50_000),
            "snare": lambda i: _highpass(6500, i, 50_000),
            "hihat": lambda i: _plosive_sine(90, i, 50_000),
        })
    raise ValueError(which)


def random_pattern(rng: random.Random, n: int,
                   classes=("kick", "snare", "hihat")) -> list[str]:
    return [rng.choice(classes) for _ in range(n)]


@pytest.fixture(scope="session")
def user_a() -> SyntheticUser:
    return make_user("a")


@pytest.fixture(scope="session")
def user_b() -> SyntheticUser:
    return make_user("b")


@pytest.fixture(scope="session")
def model_a(user_a):
    return user_a.train()


@pytest.fixture(scope="session")
def model_b(user_b):
    return user_b.train()
