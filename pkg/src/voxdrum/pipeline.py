"""Training and transcription workflow.

A user records one structured enrolment clip (for example five kicks,
then five snares, then five hi-hats), declared up front as a ClassSpec.
Detected onsets are labeled positionally against that declaration; a
count mismatch aborts with the found/expected pair rather than guessing
an alignment, which is the retry signal surfaced by the CLI and UI.
Trained models transcribe performance clips into labeled, time-stamped
drum events with velocities taken from the segment peak.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .audio import AudioClip
from .features import FEATURE_NAMES, FeatureConfig, default_filterbank, event_features, event_segment
from .learn import (
    LabeledDataset,
    LearnError,
    Normalizer,
    fit_normalizer,
    knn_classify,
    sfs_select,
)
from .onset import OnsetParams, detect_onsets

MODEL_VERSION = 1


class PipelineError(Exception):
    pass


class OnsetCountError(PipelineError):
    """Enrolment clip produced the wrong number of onsets."""

    def __init__(self, found: int, expected: int):
        super().__init__(f"expected {expected} onsets, found {found}")
        self.found = found
        self.expected = expected


class ModelFormatError(PipelineError):
    pass


class ModelVersionError(ModelFormatError):
    pass


@dataclass(frozen=True)
class ClassSpec:
    """Ordered (class_name, exemplar_count) pairs."""

    classes: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        if not self.classes:
            raise PipelineError("class spec must not be empty")
        names = [name for name, _ in self.classes]
        if len(names) != len(set(names)):
            raise PipelineError("class names must be unique")
        if any(count < 1 for _, count in self.classes):
            raise PipelineError("exemplar counts must be >= 1")

    @classmethod
    def parse(cls, text: str) -> "ClassSpec":
        """Parse 'name:count[,name:count...]' as used by the CLI and service."""
        pairs = []
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            name, sep, count = part.partition(":")
            if not sep or not name.strip():
                raise PipelineError(f"bad class spec entry {part!r}, expected name:count")
            try:
                pairs.append((name.strip(), int(count)))
            except ValueError:
                raise PipelineError(f"bad exemplar count in {part!r}") from None
        if not pairs:
            raise PipelineError("empty class spec")
        return cls(tuple(pairs))

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.classes]

    @property
    def total(self) -> int:
        return sum(count for _, count in self.classes)

    def positional_labels(self) -> list[str]:
        labels = []
        for name, count in self.classes:
            labels.extend([name] * count)
        return labels


@dataclass
class UserModel:
    version: int
    class_names: list[str]
    dataset: LabeledDataset
    normalizer: Normalizer
    mask: list[int]
    k: int
    feature_config: FeatureConfig
    onset_params: OnsetParams
    training_accuracy: float


@dataclass(frozen=True)
class DrumEvent:
    time: float
    label: str
    velocity: int


@dataclass
class Transcription:
    events: list[DrumEvent]
    duration: float
    class_names: list[str] = field(default_factory=list)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def velocity_from_peak(peak: float) -> int:
    """Linear [0, 1] -> [1, 127], rounded half up. Non-normative choice;
    the enrolment protocol never measures dynamics."""
    return max(1, min(127, _round_half_up(1.0 + float(peak) * 126.0)))


def train_user_model(clip: AudioClip, spec: ClassSpec,
                     config: FeatureConfig = FeatureConfig(),
                     onset_params: OnsetParams = OnsetParams(),
                     k: int = 1) -> UserModel:
    """Detect, label positionally, extract features, select and assemble."""
    if len(spec.classes) < 2:
        raise PipelineError("training needs at least 2 classes")
    onsets = detect_onsets(clip, onset_params, config.window_size, config.hop)
    if len(onsets) != spec.total:
        raise OnsetCountError(found=len(onsets), expected=spec.total)
    bank = default_filterbank(clip.sample_rate, config)
    vectors = [event_features(clip, onset, config, bank) for onset in onsets]
    dataset = LabeledDataset.from_feature_vectors(vectors, spec.positional_labels(), spec.names)
    normalizer = fit_normalizer(dataset)
    selection = sfs_select(dataset, k)
    return UserModel(
        version=MODEL_VERSION,
        class_names=spec.names,
        dataset=dataset,
        normalizer=normalizer,
        mask=selection.selected,
        k=k,
        feature_config=config,
        onset_params=onset_params,
        training_accuracy=selection.final_accuracy,
    )


def classify_event(model: UserModel, values: np.ndarray) -> str:
    return knn_classify(model.dataset, model.normalizer, model.mask, model.k, values).label


def transcribe(clip: AudioClip, model: UserModel) -> Transcription:
    """Classify every detected onset; times come straight from the detector."""
    config = model.feature_config
    onsets = detect_onsets(clip, model.onset_params, config.window_size, config.hop)
    bank = default_filterbank(clip.sample_rate, config)
    events = []
    for onset in onsets:
        fv = event_features(clip, onset, config, bank)
        segment, _ = event_segment(clip, onset, config)
        events.append(DrumEvent(
            time=onset.time,
            label=classify_event(model, fv.values),
            velocity=velocity_from_peak(np.max(np.abs(segment))),
        ))
    return Transcription(events, clip.duration, list(model.class_names))


def save_model(model: UserModel) -> str:
    """Serialize to a versioned JSON document with full float precision."""
    doc = {
        "version": model.version,
        "class_names": list(model.class_names),
        "feature_names": list(FEATURE_NAMES),
        "feature_config": {
            "window_size": model.feature_config.window_size,
            "hop": model.feature_config.hop,
            "frames_per_event": model.feature_config.frames_per_event,
            "n_mels": model.feature_config.n_mels,
            "n_mfcc": model.feature_config.n_mfcc,
            "rolloff_fraction": model.feature_config.rolloff_fraction,
        },
        "onset_params": {
            "method": model.onset_params.method,
            "threshold": model.onset_params.threshold,
            "min_ioi": model.onset_params.min_ioi,
            "silence_gate_db": model.onset_params.silence_gate_db,
        },
        "k": model.k,
        "mask": list(map(int, model.mask)),
        "normalizer": {
            "mean": model.normalizer.mean.tolist(),
            "std": model.normalizer.std.tolist(),
        },
        "training": {
            "vectors": model.dataset.vectors.tolist(),
            "labels": list(model.dataset.labels),
        },
        "training_accuracy": model.training_accuracy,
    }
    return json.dumps(doc, indent=2) + "\n"


def _require(doc: dict, key: str, kind) -> object:
    if key not in doc:
        raise ModelFormatError(f"model document missing key {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise ModelFormatError(f"model key {key!r} has wrong type {type(value).__name__}")
    return value


def load_model(document: str) -> UserModel:
    """Parse and validate a model document; rejects partial or alien files."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    version = _require(doc, "version", int)
    if version != MODEL_VERSION:
        raise ModelVersionError(f"unsupported model version {version}, expected {MODEL_VERSION}")
    class_names = list(_require(doc, "class_names", list))
    feature_names = list(_require(doc, "feature_names", list))
    if feature_names != list(FEATURE_NAMES):
        raise ModelFormatError("model feature_names do not match the canonical order")
    fc = _require(doc, "feature_config", dict)
    op = _require(doc, "onset_params", dict)
    try:
        config = FeatureConfig(**fc)
        onset_params = OnsetParams(**op)
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(f"bad feature_config or onset_params: {exc}") from exc
    norm_doc = _require(doc, "normalizer", dict)
    training = _require(doc, "training", dict)
    try:
        normalizer = Normalizer(np.array(norm_doc["mean"]), np.array(norm_doc["std"]))
        dataset = LabeledDataset(np.array(training["vectors"], dtype=np.float64),
                                 list(training["labels"]), class_names)
    except (KeyError, ValueError, LearnError) as exc:
        raise ModelFormatError(f"bad normalizer or training data: {exc}") from exc
    if dataset.n_features != len(FEATURE_NAMES) or len(normalizer.mean) != len(FEATURE_NAMES):
        raise ModelFormatError("model arrays do not have the canonical feature width")
    if not (np.all(np.isfinite(dataset.vectors))
            and np.all(np.isfinite(normalizer.mean))
            and np.all(np.isfinite(normalizer.std))):
        raise ModelFormatError("model contains non-finite values")
    mask = [int(i) for i in _require(doc, "mask", list)]
    if not mask or any(not 0 <= i < len(FEATURE_NAMES) for i in mask):
        raise ModelFormatError("mask must be a non-empty list of valid feature indices")
    k = _require(doc, "k", int)
    accuracy = float(_require(doc, "training_accuracy", (int, float)))
    if not 0.0 <= accuracy <= 1.0:
        raise ModelFormatError("training_accuracy must lie in [0, 1]")
    return UserModel(version, class_names, dataset, normalizer, mask, k,
                     config, onset_params, accuracy)
