"""voxdrum: user-trainable vocal percussion transcription.

Record a few exemplars of each drum sound you vocalise, train a model
that selects the features separating *your* timbres, then transcribe
performances into MIDI drum events, offline or live.
"""

from .audio import AudioClip, Frame, frames, load_wav, save_wav
from .evaluation import EvalReport, evaluate, match_events, parse_annotations, render_report
from .features import FEATURE_NAMES, FeatureConfig, FeatureVector, event_features
from .learn import LabeledDataset, Normalizer, knn_classify, loo_accuracy, sfs_select
from .midi import MidiMapping, read_smf, write_smf
from .onset import OnsetEvent, OnsetParams, detect_onsets
from .pipeline import (
    ClassSpec,
    DrumEvent,
    Transcription,
    UserModel,
    load_model,
    save_model,
    train_user_model,
    transcribe,
)
from .streaming import StreamingTranscriber
from . import synth

__version__ = "0.1.0"

__all__ = [
    "AudioClip",
    "ClassSpec",
    "DrumEvent",
    "EvalReport",
    "FEATURE_NAMES",
    "FeatureConfig",
    "FeatureVector",
    "Frame",
    "LabeledDataset",
    "MidiMapping",
    "Normalizer",
    "OnsetEvent",
    "OnsetParams",
    "StreamingTranscriber",
    "Transcription",
    "UserModel",
    "detect_onsets",
    "evaluate",
    "event_features",
    "frames",
    "knn_classify",
    "load_model",
    "load_wav",
    "loo_accuracy",
    "match_events",
    "parse_annotations",
    "read_smf",
    "render_report",
    "save_model",
    "save_wav",
    "sfs_select",
    "synth",
    "train_user_model",
    "transcribe",
    "write_smf",
]
