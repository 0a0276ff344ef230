"""
Command-line interface for deeptune.

Each subcommand is a single batch job. Exit codes: 0 success, 1 usage or
configuration error, 2 I/O error, 3 numeric failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from src.core.config import configure_logging, parse_config, settings
from src.core.exceptions import DeeptuneError
from src.models import enums
from src.models.enums import ExitCode, Split
from src.models.schemas import TrainConfig
from src.models.signals import BinaryMatrix
from src.services.audio.cqt import export_cqt
from src.services.audio.render import render_disagreement_png, render_spectrogram_png
from src.services.audio.service import AudioService
from src.services.datagen.corpus import CorpusService
from src.services.pipeline.clips import cmd_clips
from src.services.pipeline.correction import CorrectionService, cmd_baseline, cmd_correct
from src.services.pipeline.evaluation import cmd_eval
from src.services.pipeline.stats import cmd_stats
from src.services.pipeline.training import cmd_train
from src.services.pitch.export import export_notes_json, export_track_csv, import_track_csv
from src.services.pitch.service import PitchService
from src.utils.helpers import write_csv, write_json

logger = logging.getLogger("deeptune.cli")

ZOOM_BINS = (300, 700)


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage errors with exit code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(int(ExitCode.USAGE), f"{self.prog}: error: {message}\n")


def _emit(data) -> None:
    print(json.dumps(data, indent=2, sort_keys=True))


def _build_corpus(args) -> None:
    manifest = CorpusService().build_corpus(
        args.out_dir, (args.train, args.validation, args.test), seed=args.seed, workers=args.workers
    )
    logger.info(f"Corpus of {len(manifest.entries)} songs written to {args.out_dir}")


def _train(args) -> None:
    keys = TrainConfig.model_fields
    overrides = {k: v for k, v in vars(args).items() if k in keys}
    result = cmd_train(parse_config(args.config, overrides))
    _emit(
        {
            "steps": result.steps,
            "songs": result.songs,
            "best_val_mse": result.best_val_mse,
            "best_checkpoint": str(result.best_checkpoint) if result.best_checkpoint else None,
            "checkpoints_written": result.checkpoints_written,
            "recent_train_mse": result.recent_train_mse,
        }
    )


def _eval(args) -> None:
    report = cmd_eval(args.manifest, args.split, args.checkpoint, versions=args.versions)
    if args.residuals:
        rows = [{**r.model_dump(), "residual": r.residual} for r in report.residuals]
        write_csv(args.residuals, rows, list(rows[0]) if rows else ["residual"])
    summary = report.model_dump(mode="json", exclude={"residuals"})
    summary["rounded_cents"] = report.rounded_cents
    _emit(summary)


def _correct(args) -> None:
    report = cmd_correct(args.vocal, args.backing, args.checkpoint, args.output, args.report)
    _emit(report.model_dump(mode="json"))


def _baseline(args) -> None:
    if args.backing is not None:
        logger.info("Backing track is not used by the baseline corrector")
    _emit(cmd_baseline(args.vocal, args.output, args.report).model_dump(mode="json"))


def _detune(args) -> None:
    report = CorrectionService().detune_audio(args.vocal, args.output, seed=args.seed, report_path=args.report)
    _emit(report.model_dump(mode="json"))


def _stats(args) -> None:
    stats = cmd_stats(args.vocal, args.reference)
    if args.output:
        write_json(args.output, stats.model_dump(mode="json"))
    _emit(stats.model_dump(mode="json"))


def _clips(args) -> None:
    track = None
    if args.track is not None:
        track = import_track_csv(args.track, hop=settings.HOP_LENGTH, sample_rate=settings.SAMPLE_RATE)
    report = cmd_clips(
        args.performance, args.out_dir, track=track, n=args.n, length_s=args.length, also=args.also, seed=args.seed
    )
    _emit(report.model_dump(mode="json"))


def _pitch(args) -> None:
    audio = AudioService().load(args.vocal)
    track, notes = PitchService().analyze(audio, split_legato=not args.silence_only)
    if args.csv:
        export_track_csv(track, args.csv)
    if args.notes:
        export_notes_json(notes, args.notes)
    _emit({"n_frames": len(track), "voiced_fraction": float(np.mean(track.voiced)), "n_notes": len(notes)})


def _render(args) -> None:
    service = AudioService()
    bin_range = ZOOM_BINS if args.zoom else None
    vocal = service.load(args.vocal)
    outputs = []
    if args.backing is None:
        spec = service.spectrogram(vocal)
        outputs.append(render_spectrogram_png(spec, args.output, bin_range=bin_range))
    else:
        features, spec = service.features(vocal, service.load(args.backing))
        outputs.append(render_spectrogram_png(spec, args.output, bin_range=bin_range))
        out = Path(args.output)
        outputs.append(
            render_disagreement_png(
                BinaryMatrix(features.disagreement), out.with_name(f"{out.stem}_disagreement{out.suffix}"), bin_range=bin_range
            )
        )
    if args.export_cqt:
        outputs.append(export_cqt(spec, args.export_cqt))
    _emit({"written": [str(p) for p in outputs]})


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="deeptune", description="Score-free vocal pitch correction")
    parser.add_argument("--log-level", default=None, choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-corpus", help="Render a synthetic training corpus")
    p.add_argument("out_dir", type=Path)
    p.add_argument("--train", type=int, default=5)
    p.add_argument("--validation", type=int, default=2)
    p.add_argument("--test", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(handler=_build_corpus)

    p = sub.add_parser("train", help="Train the shift predictor")
    p.add_argument("--config", type=Path, default=None, help="JSON or 'key = value' file")
    p.add_argument("--manifest", type=Path)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--clip-threshold", dest="clip_threshold", type=float)
    p.add_argument("--versions", type=int)
    p.add_argument("--validation-cadence", dest="validation_cadence", type=int)
    p.add_argument("--max-epochs", dest="max_epochs", type=int)
    p.add_argument("--max-note-steps", dest="max_note_steps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--checkpoint-dir", dest="checkpoint_dir", type=Path)
    p.add_argument("--metrics-log", dest="metrics_log", type=Path)
    p.set_defaults(handler=_train)

    p = sub.add_parser("eval", help="Note-level error on a corpus split")
    p.add_argument("manifest", type=Path)
    p.add_argument("--split", choices=[s.value for s in Split], default=Split.TEST.value)
    p.add_argument("--checkpoint", type=Path, default=None, help="omit to score the zero predictor")
    p.add_argument("--versions", type=int, default=enums.N_VERSIONS)
    p.add_argument("--residuals", type=Path, default=None, help="per-note residual CSV")
    p.set_defaults(handler=_eval)

    p = sub.add_parser("correct", help="Correct a vocal against its backing track")
    p.add_argument("vocal", type=Path)
    p.add_argument("backing", type=Path)
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--report", type=Path, default=None)
    p.set_defaults(handler=_correct)

    p = sub.add_parser("baseline", help="Snap notes to the nearest equal-tempered degree")
    p.add_argument("vocal", type=Path)
    p.add_argument("backing", type=Path, nargs="?", default=None)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--report", type=Path, default=None)
    p.set_defaults(handler=_baseline)

    p = sub.add_parser("detune", help="Write a randomly detuned control version")
    p.add_argument("vocal", type=Path)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", type=Path, default=None)
    p.set_defaults(handler=_detune)

    p = sub.add_parser("stats", help="Deviation of sung notes from a reference melody")
    p.add_argument("vocal", type=Path)
    p.add_argument("--reference", type=Path, required=True)
    p.add_argument("--output", type=Path, default=None)
    p.set_defaults(handler=_stats)

    p = sub.add_parser("clips", help="Cut listening clips")
    p.add_argument("performance", type=Path)
    p.add_argument("--out-dir", dest="out_dir", type=Path, required=True)
    p.add_argument("--track", type=Path, default=None, help="pitch track CSV")
    p.add_argument("--n", type=int, default=enums.CLIP_COUNT)
    p.add_argument("--length", type=float, default=enums.CLIP_SECONDS)
    p.add_argument("--also", type=Path, nargs="*", default=[], help="aligned renderings cut at the same windows")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(handler=_clips)

    p = sub.add_parser("pitch", help="Export the pitch track and notes")
    p.add_argument("vocal", type=Path)
    p.add_argument("--csv", type=Path, default=None)
    p.add_argument("--notes", type=Path, default=None)
    p.add_argument("--silence-only", dest="silence_only", action="store_true")
    p.set_defaults(handler=_pitch)

    p = sub.add_parser("render", help="Write CQT and disagreement images")
    p.add_argument("vocal", type=Path)
    p.add_argument("--backing", type=Path, default=None)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--zoom", action="store_true", help=f"crop to bins {ZOOM_BINS[0]}-{ZOOM_BINS[1]}")
    p.add_argument("--export-cqt", dest="export_cqt", type=Path, default=None)
    p.set_defaults(handler=_render)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        args.handler(args)
    except DeeptuneError as e:
        logger.error(f"{args.command} failed: {e}")
        return int(e.exit_code)
    except OSError as e:
        logger.error(f"{args.command} failed: {e}")
        return int(ExitCode.IO)
    return int(ExitCode.SUCCESS)
