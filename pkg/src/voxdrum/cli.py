"""Command line front end.

Subcommands: train, transcribe, eval, features, synth, serve.
Exit codes: 0 success, 1 usage or I/O error, 2 onset count mismatch.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import evaluation as ev
from .audio import AudioError, load_wav, save_wav
from .features import FEATURE_NAMES, FeatureConfig, default_filterbank, event_features
from .midi import MidiError, MidiMapping, read_smf, write_smf
from .onset import OnsetParams, detect_onsets
from .pipeline import (
    ClassSpec,
    OnsetCountError,
    PipelineError,
    load_model,
    save_model,
    train_user_model,
    transcribe,
)
from .synth import SynthError, parse_spec

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_COUNT_MISMATCH = 2

DEFAULT_PORT = int(os.environ.get("VOXDRUM_PORT", "8765"))


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for onset
    # count mismatches here, so remap to a catchable exception.
    def error(self, message):
        raise _UsageError(message)


def _onset_params(args) -> OnsetParams:
    return OnsetParams(
        method=args.onset_method,
        threshold=args.onset_threshold,
        min_ioi=args.min_ioi,
        silence_gate_db=args.silence_gate,
    )


def _add_onset_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--onset-method", choices=("hfc", "spectral_flux"), default="hfc")
    parser.add_argument("--onset-threshold", type=float, default=1.5,
                        help="median threshold multiplier (default 1.5)")
    parser.add_argument("--min-ioi", type=float, default=0.050,
                        help="minimum inter-onset interval in seconds")
    parser.add_argument("--silence-gate", type=float, default=-60.0,
                        help="per-frame silence gate in dBFS")


def _parse_mapping(text: str | None) -> MidiMapping | None:
    if text is None:
        return None
    note_for = {}
    for part in text.split(","):
        name, sep, note = part.partition("=")
        if not sep:
            raise _UsageError(f"bad --map entry {part!r}, expected name=note")
        try:
            note_for[name.strip()] = int(note)
        except ValueError:
            raise _UsageError(f"bad note number in {part!r}") from None
    return MidiMapping(note_for)


def _cmd_train(args) -> int:
    spec = ClassSpec.parse(args.classes)
    clip = load_wav(args.input)
    try:
        model = train_user_model(clip, spec, FeatureConfig(), _onset_params(args), args.k)
    except OnsetCountError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COUNT_MISMATCH
    Path(args.model).write_text(save_model(model))
    selected = ", ".join(FEATURE_NAMES[i] for i in model.mask)
    print(f"onsets found: {spec.total}")
    print(f"selected features: {selected}")
    print(f"training accuracy: {model.training_accuracy:.3f}")
    print(f"model written to {args.model}")
    return EXIT_OK


def _cmd_transcribe(args) -> int:
    model = load_model(Path(args.model).read_text())
    clip = load_wav(args.input)
    result = transcribe(clip, model)
    mapping = _parse_mapping(args.map) or MidiMapping.for_classes(model.class_names)
    Path(args.out).write_bytes(write_smf(result, mapping, args.tempo, args.ppq))
    counts = {name: 0 for name in model.class_names}
    for event in result.events:
        counts[event.label] += 1
    for name, count in counts.items():
        print(f"{name}: {count}")
    print(f"{len(result.events)} events written to {args.out}")
    return EXIT_OK


def _load_events(path: str, mapping: MidiMapping | None):
    if path.endswith((".mid", ".midi", ".smf")):
        return read_smf(Path(path).read_bytes(), mapping)
    return ev.parse_annotations(Path(path).read_text())


def _cmd_eval(args) -> int:
    mapping = _parse_mapping(args.map)
    pred = _load_events(args.pred, mapping)
    ref = ev.parse_annotations(Path(args.ref).read_text())
    report = ev.evaluate(pred, ref, args.tolerance)
    sys.stdout.write(ev.render_report(report, args.format))
    return EXIT_OK


def _cmd_features(args) -> int:
    clip = load_wav(args.input)
    config = FeatureConfig()
    onsets = detect_onsets(clip, _onset_params(args), config.window_size, config.hop)
    bank = default_filterbank(clip.sample_rate, config)
    print("onset_time," + ",".join(FEATURE_NAMES))
    for onset in onsets:
        fv = event_features(clip, onset, config, bank)
        print(f"{onset.time:.6f}," + ",".join(f"{v:.9g}" for v in fv.values))
    return EXIT_OK


def _cmd_synth(args) -> int:
    clip = parse_spec(args.spec)
    save_wav(args.out, clip)
    print(f"{clip.duration:.3f}s written to {args.out}")
    if args.annotations:
        label = args.label
        lines = [f"{t:.6f},{label}" for t in (clip.onsets or ())]
        Path(args.annotations).write_text("\n".join(lines) + "\n" if lines else "")
        print(f"{len(lines)} onset annotations written to {args.annotations}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    try:
        app = create_app(data_dir=args.data_dir, ui_dir=args.ui_dir)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="voxdrum",
                     description="train on your vocalised drum sounds, then transcribe performances to MIDI")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a user model from an enrolment recording")
    p.add_argument("--input", required=True, help="enrolment WAV file")
    p.add_argument("--classes", required=True, help="class spec, e.g. kick:5,snare:5,hihat:5")
    p.add_argument("--model", required=True, help="output model file (JSON)")
    p.add_argument("--k", type=int, default=1, help="neighbour count (default 1)")
    _add_onset_flags(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("transcribe", help="transcribe a performance WAV to a MIDI file")
    p.add_argument("--input", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="output .mid file")
    p.add_argument("--tempo", type=float, default=120.0)
    p.add_argument("--ppq", type=int, default=480)
    p.add_argument("--map", help="note mapping, e.g. kick=36,snare=38")
    p.set_defaults(func=_cmd_transcribe)

    p = sub.add_parser("eval", help="score a transcription against reference annotations")
    p.add_argument("--pred", required=True, help="predicted events (.mid or annotation csv)")
    p.add_argument("--ref", required=True, help="reference annotation csv")
    p.add_argument("--tolerance", type=float, default=ev.DEFAULT_TOLERANCE)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--map", help="note mapping for .mid predictions")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("features", help="dump per-event feature vectors as CSV")
    p.add_argument("--input", required=True)
    _add_onset_flags(p)
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("synth", help="generate a synthetic test WAV from a spec string")
    p.add_argument("--spec", required=True,
                   help="e.g. 'sine(440,0.2,0.8)@0.5; burst(0.2,0.7,3)@1.0; click(2.0,2.5)'")
    p.add_argument("--out", required=True)
    p.add_argument("--annotations", help="also write true onset times as a csv")
    p.add_argument("--label", default="click", help="label used in --annotations")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("serve", help="run the HTTP + streaming service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=DEFAULT_PORT)
    p.add_argument("--data-dir", help="persist trained model documents here")
    p.add_argument("--ui-dir", help="serve the browser UI from this directory (e.g. frontend/)")
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (AudioError, SynthError, PipelineError, MidiError, ev.EvalError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
