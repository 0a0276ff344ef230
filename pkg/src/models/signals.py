"""
Numeric containers shared by the analysis and synthesis services.

These hold numpy arrays, so they are plain dataclasses rather than pydantic
schemas; the JSON-facing models live in ``schemas.py``.
"""

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
import scipy.stats

from src.core.exceptions import RangeError, ShapeError
from src.models import enums


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    """Mono waveform with its sample rate."""
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise ShapeError("audio buffer must be a non-empty 1-D array")
        if not np.all(np.isfinite(samples)):
            raise RangeError("audio buffer contains non-finite samples")
        if self.sample_rate <= 0:
            raise RangeError(f"sample rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    @property
    def peak(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def replace(self, samples: np.ndarray) -> "AudioBuffer":
        return AudioBuffer(samples=samples, sample_rate=self.sample_rate)


@dataclass(frozen=True)
class CqtParams:
    """Constant-Q geometry: 16 bins per semitone from 125 Hz over 5.5 octaves."""
    bins_per_semitone: int = enums.BINS_PER_SEMITONE
    octaves: float = enums.CQT_OCTAVES
    f_min: float = enums.CQT_FMIN
    hop: int = enums.HOP_LENGTH
    buffer_bins: int = enums.BUFFER_BINS

    def __post_init__(self):
        if self.f_min <= 0:
            raise RangeError("f_min must be positive")
        if self.hop < 1:
            raise RangeError("hop must be at least one sample")
        if self.truncated_bins <= 0:
            raise RangeError("buffer bins leave no spectrum after truncation")

    @property
    def bins_per_octave(self) -> int:
        return 12 * self.bins_per_semitone

    @property
    def total_bins(self) -> int:
        return round(self.octaves * 12 * self.bins_per_semitone)

    @property
    def truncated_bins(self) -> int:
        return self.total_bins - 2 * self.buffer_bins

    @property
    def cents_per_bin(self) -> float:
        return 100.0 / self.bins_per_semitone

    def bin_frequency(self, b: float) -> float:
        """Center frequency of (untruncated) bin ``b`` in Hz."""
        return self.f_min * 2.0 ** (b / self.bins_per_octave)

    @classmethod
    def from_settings(cls, settings) -> "CqtParams":
        return cls(
            bins_per_semitone=settings.CQT_BINS_PER_SEMITONE,
            octaves=settings.CQT_OCTAVES,
            f_min=settings.CQT_FMIN,
            hop=settings.HOP_LENGTH,
            buffer_bins=settings.CQT_BUFFER_BINS,
        )


@dataclass(frozen=True, eq=False)
class CqtSpectrogram:
    """Magnitude constant-Q matrix [bins x frames]."""
    mag: np.ndarray
    params: CqtParams = field(default_factory=CqtParams)

    def __post_init__(self):
        mag = np.asarray(self.mag, dtype=np.float32)
        if mag.ndim != 2:
            raise ShapeError(f"spectrogram must be 2-D, got shape {mag.shape}")
        if mag.shape[0] not in (self.params.total_bins, self.params.truncated_bins):
            raise ShapeError(
                f"spectrogram has {mag.shape[0]} bins, expected "
                f"{self.params.total_bins} or {self.params.truncated_bins}"
            )
        if not np.all(np.isfinite(mag)) or np.any(mag < 0):
            raise RangeError("spectrogram magnitudes must be finite and non-negative")
        object.__setattr__(self, "mag", mag)

    @property
    def n_bins(self) -> int:
        return self.mag.shape[0]

    @property
    def n_frames(self) -> int:
        return self.mag.shape[1]

    @property
    def is_truncated(self) -> bool:
        return self.n_bins == self.params.truncated_bins


@dataclass(frozen=True, eq=False)
class BinaryMatrix:
    """Matrix of {0, 1} entries [bins x frames]."""
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 2:
            raise ShapeError(f"binary matrix must be 2-D, got shape {bits.shape}")
        if bits.size and not np.all((bits == 0) | (bits == 1)):
            raise RangeError("binary matrix entries must be 0 or 1")
        object.__setattr__(self, "bits", bits.astype(np.uint8))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.bits.shape


@dataclass(frozen=True, eq=False)
class ModelInput:
    """Three-channel note slice: vocal, backing, binary disagreement."""
    tensor: np.ndarray
    note_span: Tuple[int, int]

    def __post_init__(self):
        if self.tensor.ndim != 3 or self.tensor.shape[0] != 3 or self.tensor.shape[2] < 1:
            raise ShapeError(f"model input must be (3, bins, T>=1), got {self.tensor.shape}")

    @property
    def n_frames(self) -> int:
        return self.tensor.shape[2]


@dataclass(frozen=True, eq=False)
class PitchTrack:
    """Frame-wise f0 (0 where unvoiced) and voicing probability."""
    f0: np.ndarray
    voicing: np.ndarray
    hop: int = enums.HOP_LENGTH
    sample_rate: int = enums.SAMPLE_RATE

    def __post_init__(self):
        f0 = np.asarray(self.f0, dtype=np.float64)
        voicing = np.asarray(self.voicing, dtype=np.float64)
        if f0.shape != voicing.shape or f0.ndim != 1:
            raise ShapeError("f0 and voicing must be 1-D arrays of equal length")
        if np.any(f0 < 0) or not np.all(np.isfinite(f0)):
            raise RangeError("f0 must be finite and non-negative")
        object.__setattr__(self, "f0", f0)
        object.__setattr__(self, "voicing", np.clip(voicing, 0.0, 1.0))

    def __len__(self) -> int:
        return self.f0.size

    @property
    def voiced(self) -> np.ndarray:
        return self.f0 > 0

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.f0.size) * self.hop / self.sample_rate


@dataclass(frozen=True)
class PyinParams:
    """Probabilistic YIN configuration."""
    frame: int = enums.FRAME_LENGTH
    hop: int = enums.HOP_LENGTH
    sample_rate: int = enums.SAMPLE_RATE
    f_min_track: float = 80.0
    f_max_track: float = 1000.0
    n_thresholds: int = 100
    beta_parameters: Tuple[float, float] = (2.0, 18.0)
    no_trough_prob: float = 0.01
    resolution_cents: float = 10.0
    max_transition_rate: float = 35.92  # octaves per second
    switch_prob: float = 0.01
    voicing_threshold: float = 0.5
    low_amp_ratio: float = 0.1

    def __post_init__(self):
        if not 0 < self.f_min_track < self.f_max_track < self.sample_rate / 2:
            raise RangeError("need 0 < f_min_track < f_max_track < sample_rate / 2")
        if self.frame < 16 or self.hop < 1:
            raise RangeError("frame and hop sizes are too small")

    @property
    def win_length(self) -> int:
        return self.frame // 2

    @property
    def min_period(self) -> int:
        return max(int(np.floor(self.sample_rate / self.f_max_track)), 1)

    @property
    def max_period(self) -> int:
        return min(int(np.ceil(self.sample_rate / self.f_min_track)), self.frame - self.win_length - 1)

    def threshold_prior(self) -> Tuple[np.ndarray, np.ndarray]:
        """Thresholds in (0, 1] and their beta-distributed prior weights (summing to 1)."""
        edges = np.linspace(0.0, 1.0, self.n_thresholds + 1)
        cdf = scipy.stats.beta.cdf(edges, *self.beta_parameters)
        return edges[1:], np.diff(cdf)

    @classmethod
    def from_settings(cls, settings) -> "PyinParams":
        return cls(
            frame=settings.FRAME_LENGTH,
            hop=settings.HOP_LENGTH,
            sample_rate=settings.SAMPLE_RATE,
            f_min_track=settings.PYIN_FMIN,
            f_max_track=settings.PYIN_FMAX,
            voicing_threshold=settings.VOICING_THRESHOLD,
        )


@dataclass(frozen=True, eq=False)
class PitchMarks:
    """Ascending sample indices of pitch-synchronous epochs."""
    epochs: np.ndarray

    def __post_init__(self):
        epochs = np.asarray(self.epochs, dtype=np.int64).reshape(-1)
        if epochs.size > 1 and np.any(np.diff(epochs) <= 0):
            raise RangeError("pitch marks must be strictly increasing")
        object.__setattr__(self, "epochs", epochs)

    def __len__(self) -> int:
        return self.epochs.size

    def within(self, start: int, end: int) -> np.ndarray:
        """Epochs in the half-open sample range [start, end)."""
        return self.epochs[(self.epochs >= start) & (self.epochs < end)]
