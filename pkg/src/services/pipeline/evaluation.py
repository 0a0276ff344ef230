"""Note-level evaluation of a shift predictor on a corpus split."""

import logging
from pathlib import Path
from typing import Callable, Iterator, Optional, Tuple, Union

import numpy as np

from src.core.exceptions import RangeError
from src.models import enums
from src.models.enums import Split
from src.models.schemas import CorpusManifest, EvalReport, ManifestEntry, NoteResidual
from src.services.datagen.corpus import load_manifest, load_song
from src.services.datagen.detune import NoteExample, TrainingExample, build_training_example, make_detuned_versions
from src.services.network.checkpoint import load_checkpoint
from src.services.network.model import HIDDEN_SIZE, AutotunerNet, gru_hidden_init
from src.services.network.optim import cents_from_mse, mse_loss

logger = logging.getLogger(__name__)

Predictor = Callable[[NoteExample, np.ndarray], Tuple[float, np.ndarray]]


def net_predictor(net: AutotunerNet) -> Predictor:
    def predict(example: NoteExample, h: np.ndarray) -> Tuple[float, np.ndarray]:
        return net.predict(example.input, h)

    return predict


def zero_predictor(example: NoteExample, h: np.ndarray) -> Tuple[float, np.ndarray]:
    return 0.0, h


def iter_examples(
    manifest: CorpusManifest, entry: ManifestEntry, versions: int = enums.N_VERSIONS
) -> Iterator[TrainingExample]:
    """Recorded detuned versions of one performance, sliced into labelled notes."""
    song = load_song(manifest, entry)
    if versions > len(song.detunes):
        raise RangeError(f"{entry.performance_id} records {len(song.detunes)} versions, {versions} requested")
    recorded = song.detunes[:versions]
    for detuned, spec in make_detuned_versions(
        song.vocal_cqt, song.notes, [d.seed for d in recorded], forced_shifts=[d.shifts for d in recorded]
    ):
        yield build_training_example(entry.performance_id, detuned, song.backing_cqt, song.notes, spec)


def evaluate(
    manifest: CorpusManifest,
    split: Union[Split, str],
    predictor: Predictor,
    versions: int = enums.N_VERSIONS,
    hidden: int = HIDDEN_SIZE,
    min_frames: int = enums.MIN_NOTE_FRAMES_FOR_NET,
) -> EvalReport:
    """
    Run ``predictor`` over every detuned version of a split.

    Each version starts from a hidden state drawn with its own seed and
    carries it from note to note. Notes shorter than ``min_frames`` are
    counted as degenerate and left out of the error.

    Returns:
        MSE, cents, sign agreement and per-note residuals
    """
    split = Split(split)
    entries = manifest.split(split)
    if not entries:
        raise FileNotFoundError(f"manifest has no {split.value} entries")

    residuals = []
    n_degenerate = 0
    for entry in entries:
        for example in iter_examples(manifest, entry, versions):
            h = gru_hidden_init(np.random.default_rng(entry.version_seeds[example.version_index]), hidden)
            for index, note in enumerate(example.notes):
                if note.input.n_frames < min_frames:
                    n_degenerate += 1
                    continue
                pred, h = predictor(note, h)
                residuals.append(
                    NoteResidual(
                        performance_id=entry.performance_id,
                        version_index=example.version_index,
                        note_index=index,
                        predicted=float(pred),
                        target=note.target,
                    )
                )

    preds = [r.predicted for r in residuals]
    targets = [r.target for r in residuals]
    mse, _ = mse_loss(preds, targets)
    agree = float(np.mean(np.sign(preds) == np.sign(targets)))
    report = EvalReport(
        split=split.value,
        mse=mse,
        cents=cents_from_mse(mse),
        sign_agreement=agree,
        n_notes=len(residuals),
        n_degenerate=n_degenerate,
        residuals=residuals,
    )
    logger.info(
        f"{split.value}: MSE {mse:.4f} ({report.rounded_cents}), sign agreement {agree:.0%}, "
        f"{len(residuals)} notes, {n_degenerate} degenerate"
    )
    return report


def cmd_eval(
    manifest_path: Union[str, Path],
    split: Union[Split, str],
    checkpoint: Optional[Union[str, Path]] = None,
    versions: int = enums.N_VERSIONS,
) -> EvalReport:
    """Evaluate a saved model on one split of a corpus; without a checkpoint, score the zero predictor."""
    manifest = load_manifest(manifest_path)
    if checkpoint is None:
        logger.info("No checkpoint given, scoring the zero predictor")
        return evaluate(manifest, split, zero_predictor, versions=versions)
    net, _ = load_checkpoint(checkpoint)
    return evaluate(manifest, split, net_predictor(net), versions=versions, hidden=net.hidden, min_frames=net.min_frames)
