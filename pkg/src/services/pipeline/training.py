"""
Note-level training with validation-best checkpointing.

One optimizer step per note: the note's detuned versions form the minibatch,
each version carrying its own GRU hidden state across the song. The carried
state enters the next note as a constant.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from src.core.exceptions import ConfigError, NumericError
from src.models.enums import Split
from src.models.schemas import CorpusManifest, ManifestEntry, TrainConfig
from src.services.base import BaseService
from src.services.datagen.corpus import load_manifest
from src.services.network.checkpoint import save_checkpoint
from src.services.network.model import AutotunerNet, gru_hidden_init
from src.services.network.optim import AdamState, adam_step, cents_from_mse, clip_gradients, mse_loss
from src.services.pipeline.evaluation import evaluate, iter_examples, net_predictor
from src.utils.helpers import write_csv

METRIC_COLUMNS = ["step", "song", "note", "train_mse", "val_mse", "cents"]
BEST_CHECKPOINT = "best.ckpt"
RECENT_WINDOW = 100


@dataclass
class TrainingResult:
    steps: int = 0
    songs: int = 0
    best_val_mse: float = math.inf
    best_checkpoint: Optional[Path] = None
    checkpoints_written: int = 0
    recent_train_mse: float = math.nan
    metrics: List[Dict] = field(default_factory=list)


class Trainer(BaseService):
    """Trains an ``AutotunerNet`` on a corpus manifest."""

    def __init__(self, config: TrainConfig, net: Optional[AutotunerNet] = None):
        super().__init__("trainer")
        if config.manifest is None:
            raise ConfigError("training needs a corpus manifest", key="manifest")
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        self.manifest: CorpusManifest = load_manifest(config.manifest)
        self.net = net or AutotunerNet.initialize(self.rng)
        self.adam = AdamState.for_params(self.net.params, lr=config.learning_rate)
        self.result = TrainingResult()
        self._recent: List[float] = []

        self.train_entries = self.manifest.split(Split.TRAIN)
        if not self.train_entries:
            raise ConfigError("manifest has no training entries", key="manifest")
        self.val_split = Split.VALIDATION
        if not self.manifest.split(Split.VALIDATION):
            self.logger.warning("No validation entries, validating on the training split")
            self.val_split = Split.TRAIN

    def _log(self, **row) -> None:
        self.result.metrics.append({column: row.get(column) for column in METRIC_COLUMNS})

    def _flush_metrics(self) -> None:
        if self.config.metrics_log is not None:
            write_csv(self.config.metrics_log, self.result.metrics, METRIC_COLUMNS)

    def _check_geometry(self, example) -> None:
        bins = example.notes[0].input.tensor.shape[1] if example.notes else self.net.n_bins
        if bins != self.net.n_bins:
            raise ConfigError(f"corpus spectrograms have {bins} bins, network expects {self.net.n_bins}", key="manifest")

    def validate(self) -> float:
        report = evaluate(
            self.manifest,
            self.val_split,
            net_predictor(self.net),
            versions=self.config.versions,
            hidden=self.net.hidden,
            min_frames=self.net.min_frames,
        )
        self._log(step=self.result.steps, val_mse=report.mse, cents=report.cents)
        if report.mse < self.result.best_val_mse:
            self.result.best_val_mse = report.mse
            path = Path(self.config.checkpoint_dir) / BEST_CHECKPOINT
            self.result.best_checkpoint = save_checkpoint(self.net, self.adam, path)
            self.result.checkpoints_written += 1
            self.logger.info(f"Validation MSE improved to {report.mse:.4f} ({report.rounded_cents})")
        else:
            self.logger.info(f"Validation MSE {report.mse:.4f}, best {self.result.best_val_mse:.4f}")
        self._flush_metrics()
        return report.mse

    def _train_song(self, entry: ManifestEntry) -> bool:
        """Train on every note of one song; False once the step budget is spent."""
        examples = list(iter_examples(self.manifest, entry, self.config.versions))
        if not examples or not examples[0].notes:
            self.logger.warning(f"{entry.performance_id}: no notes, skipped")
            return True
        self._check_geometry(examples[0])

        hidden = [gru_hidden_init(self.rng, self.net.hidden) for _ in examples]
        for index in range(len(examples[0].notes)):
            notes = [example.notes[index] for example in examples]
            if notes[0].input.n_frames < self.net.min_frames:
                continue

            preds, caches, carried = [], [], []
            for note, h in zip(notes, hidden):
                y, h_next, cache = self.net.forward(note.input.tensor, h)
                preds.append(y)
                caches.append(cache)
                carried.append(h_next)
            loss, grad_preds = mse_loss(preds, [n.target for n in notes])
            if not math.isfinite(loss):
                raise NumericError(f"non-finite loss at {entry.performance_id} note {index}")

            grads: Dict[str, np.ndarray] = {}
            for g, cache in zip(grad_preds, caches):
                version_grads, _ = self.net.backward(float(g), cache)
                for name, value in version_grads.items():
                    grads[name] = grads[name] + value if name in grads else value
            grads, _ = clip_gradients(grads, self.config.clip_threshold)
            adam_step(self.net.params, grads, self.adam)
            hidden = carried

            self.result.steps += 1
            self._recent = (self._recent + [loss])[-RECENT_WINDOW:]
            self._log(step=self.result.steps, song=entry.performance_id, note=index, train_mse=loss, cents=cents_from_mse(loss))
            if self.config.max_note_steps is not None and self.result.steps >= self.config.max_note_steps:
                return False
        return True

    def train(self) -> TrainingResult:
        """
        Run the configured epochs, validating every ``validation_cadence`` songs and at the end.

        Returns:
            Step counts, best validation MSE and the checkpoint path
        """
        self.logger.info(
            f"Training on {len(self.train_entries)} songs, {self.config.versions} versions per note, "
            f"lr {self.config.learning_rate}"
        )
        validated_at = -1
        running = True
        for epoch in range(self.config.max_epochs):
            for entry in self.train_entries:
                running = self._train_song(entry)
                self.result.songs += 1
                if self.result.songs % self.config.validation_cadence == 0:
                    self.validate()
                    validated_at = self.result.steps
                if not running:
                    break
            if not running:
                break
            self.logger.info(f"Epoch {epoch + 1} done after {self.result.steps} note-steps")

        if validated_at != self.result.steps:
            self.validate()
        if self._recent:
            self.result.recent_train_mse = float(np.mean(self._recent))
        self._flush_metrics()
        return self.result


def cmd_train(config: TrainConfig) -> TrainingResult:
    return Trainer(config).train()
