"""
Network input assembly: binarization, disagreement and note slicing.

Threshold statistics and channel normalization are per performance, so the
disagreement channel of a note does not depend on how the notes were cut.
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.core.exceptions import RangeError, ShapeError
from src.models.schemas import NoteSegment
from src.models.signals import BinaryMatrix, CqtSpectrogram, ModelInput

logger = logging.getLogger(__name__)


def binarize_mean_threshold(spec: CqtSpectrogram) -> BinaryMatrix:
    """1 where the magnitude is strictly above the spectrogram's mean, else 0."""
    mag = spec.mag
    if mag.size == 0:
        raise ShapeError("cannot binarize an empty spectrogram")
    return BinaryMatrix(bits=(mag > mag.mean(dtype=np.float64)).astype(np.uint8))


def disagreement(a: BinaryMatrix, b: BinaryMatrix) -> BinaryMatrix:
    """Elementwise exclusive-or."""
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")
    return BinaryMatrix(bits=np.bitwise_xor(a.bits, b.bits))


def _max_normalize(mag: np.ndarray) -> np.ndarray:
    peak = float(mag.max()) if mag.size else 0.0
    if peak <= 0:
        return mag.astype(np.float32, copy=True)
    return (mag / peak).astype(np.float32)


@dataclass(frozen=True, eq=False)
class PerformanceFeatures:
    """Whole-performance channels ready to be sliced per note."""
    vocal: np.ndarray
    backing: np.ndarray
    disagreement: np.ndarray

    @property
    def n_frames(self) -> int:
        return self.vocal.shape[1]

    def slice(self, note: NoteSegment) -> ModelInput:
        start, end = note.start_frame, note.end_frame
        if end <= start:
            raise RangeError(f"empty note span [{start}, {end})")
        if end > self.n_frames:
            raise RangeError(f"note span [{start}, {end}) exceeds {self.n_frames} frames")
        tensor = np.stack(
            [
                self.vocal[:, start:end],
                self.backing[:, start:end],
                self.disagreement[:, start:end].astype(np.float32),
            ]
        )
        return ModelInput(tensor=tensor, note_span=(start, end))


def prepare_features(vocal: CqtSpectrogram, backing: CqtSpectrogram) -> PerformanceFeatures:
    """
    Compute the three channels over the full performance.

    Args:
        vocal: Truncated (1024-bin) vocal spectrogram
        backing: Truncated backing spectrogram with the same frame count

    Returns:
        Max-normalized magnitudes and the binary disagreement channel
    """
    for name, spec in (("vocal", vocal), ("backing", backing)):
        if not spec.is_truncated:
            raise ShapeError(f"{name} spectrogram must be truncated to {spec.params.truncated_bins} bins")
    if vocal.n_frames != backing.n_frames:
        raise ShapeError(f"frame counts differ: vocal {vocal.n_frames}, backing {backing.n_frames}")

    bits = disagreement(binarize_mean_threshold(vocal), binarize_mean_threshold(backing))
    return PerformanceFeatures(
        vocal=_max_normalize(vocal.mag),
        backing=_max_normalize(backing.mag),
        disagreement=bits.bits,
    )


def build_model_input(vocal: CqtSpectrogram, backing: CqtSpectrogram, note: NoteSegment) -> ModelInput:
    """Three-channel network input for one note."""
    return prepare_features(vocal, backing).slice(note)
