"""Audio front end: WAV I/O, constant-Q analysis, network features and rendering."""

from src.services.audio.cqt import cqt, export_cqt, import_cqt, shift_columns, shift_cqt_bins, truncate_buffer
from src.services.audio.features import (
    PerformanceFeatures,
    binarize_mean_threshold,
    build_model_input,
    disagreement,
    prepare_features,
)
from src.services.audio.io import load_wav, normalize, resample, write_wav
from src.services.audio.render import render_disagreement_png, render_spectrogram_png
from src.services.audio.service import AudioService, match_lengths

__all__ = [
    "AudioService",
    "PerformanceFeatures",
    "binarize_mean_threshold",
    "build_model_input",
    "cqt",
    "disagreement",
    "export_cqt",
    "import_cqt",
    "load_wav",
    "match_lengths",
    "normalize",
    "prepare_features",
    "render_disagreement_png",
    "render_spectrogram_png",
    "resample",
    "shift_columns",
    "shift_cqt_bins",
    "truncate_buffer",
    "write_wav",
]
