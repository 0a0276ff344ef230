"""End-user workflows: training, evaluation, correction, statistics and clips."""

from src.services.pipeline.clips import cmd_clips, sample_clips, write_clips
from src.services.pipeline.correction import CorrectionService, baseline_shift_cents, cmd_baseline, cmd_correct
from src.services.pipeline.evaluation import cmd_eval, evaluate, net_predictor, zero_predictor
from src.services.pipeline.stats import cmd_stats, deviation_stats
from src.services.pipeline.training import Trainer, TrainingResult, cmd_train

__all__ = [
    "CorrectionService",
    "Trainer",
    "TrainingResult",
    "baseline_shift_cents",
    "cmd_baseline",
    "cmd_clips",
    "cmd_correct",
    "cmd_eval",
    "cmd_stats",
    "cmd_train",
    "deviation_stats",
    "evaluate",
    "net_predictor",
    "sample_clips",
    "write_clips",
    "zero_predictor",
]
