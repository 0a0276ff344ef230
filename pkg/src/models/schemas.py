"""
Pydantic schemas for deeptune.

This module contains the JSON-facing models: note segments, detune specs,
corpus manifests, configuration and reports.
"""

from pathlib import Path
from typing import Dict, List, Optional, Tuple

from pydantic import AliasChoices, BaseModel, ConfigDict, Field, field_validator, model_validator

from src.models import enums
from src.models.enums import CorrectionMethod, Split


# Notes
class NoteSegment(BaseModel):
    """A half-open frame interval treated as one note."""
    start_frame: int = Field(..., ge=0)
    end_frame: int = Field(..., ge=0)
    median_f0: float = Field(default=0.0, ge=0, description="Median voiced f0 in Hz")
    target_shift: Optional[float] = Field(default=None, description="Corrective shift in semitones")

    @property
    def n_frames(self) -> int:
        return self.end_frame - self.start_frame

    def sample_span(self, hop: int) -> Tuple[int, int]:
        return self.start_frame * hop, self.end_frame * hop


# Detuning
class DetuneSpec(BaseModel):
    """Per-note detune amounts (semitones) for one version of a performance."""
    shifts: List[float]
    seed: int
    version_index: int = Field(..., ge=0, le=enums.N_VERSIONS - 1)

    @field_validator("shifts")
    @classmethod
    def check_bounds(cls, v: List[float]) -> List[float]:
        for s in v:
            if abs(s) > enums.MAX_DETUNE_SEMITONES:
                raise ValueError(f"shift {s} exceeds one semitone")
        return v


# Synthetic songs
class SongSpec(BaseModel):
    """Parameters of a synthetic vocal + backing performance."""
    tempo_bpm: float = Field(default=96.0, gt=0)
    chords: List[List[int]] = Field(..., description="MIDI triads, one per chord span")
    beats_per_chord: float = Field(default=4.0, gt=0)
    melody: List[int] = Field(..., description="MIDI pitches of the sung notes")
    note_beats: List[float] = Field(..., description="Duration of each melody note in beats")
    rest_ms: Tuple[float, float] = (30.0, 80.0)
    vibrato_hz: float = 5.0
    vibrato_cents: float = 20.0

    @model_validator(mode="after")
    def check_lengths(self) -> "SongSpec":
        if len(self.note_beats) != len(self.melody):
            raise ValueError("melody and note_beats must have equal lengths")
        if not self.chords:
            raise ValueError("chord progression is empty")
        return self


# Corpus
class ManifestEntry(BaseModel):
    """One rendered performance and the seeds of its detuned versions."""
    performance_id: str
    backing_id: str
    split: Split
    vocal_path: str
    backing_path: str
    notes_path: str
    reference_path: str
    vocal_cqt_path: str
    backing_cqt_path: str
    detune_path: str
    version_seeds: List[int] = Field(..., min_length=1)


class CorpusManifest(BaseModel):
    """On-disk description of a corpus; paths are relative to ``root``."""
    format_version: int = 1
    root: str = "."
    entries: List[ManifestEntry] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_split_hygiene(self) -> "CorpusManifest":
        owner: Dict[str, Split] = {}
        for entry in self.entries:
            seen = owner.setdefault(entry.backing_id, entry.split)
            if seen != entry.split:
                raise ValueError(
                    f"backing {entry.backing_id} appears in both {seen.value} and {entry.split.value}"
                )
        return self

    def split(self, split: Split) -> List[ManifestEntry]:
        return [e for e in self.entries if e.split == split]

    def resolve(self, relative: str, base: Optional[Path] = None) -> Path:
        root = Path(self.root)
        if not root.is_absolute() and base is not None:
            root = base / root
        return root / relative


# Configuration
class TrainConfig(BaseModel):
    """Training configuration with the default optimisation setup."""
    model_config = ConfigDict(extra="forbid")

    manifest: Optional[Path] = None
    learning_rate: float = Field(
        default=enums.LEARNING_RATE, gt=0, validation_alias=AliasChoices("learning_rate", "lr")
    )
    clip_threshold: float = Field(default=enums.CLIP_THRESHOLD, gt=0)
    versions: int = Field(default=enums.N_VERSIONS, ge=1, le=enums.N_VERSIONS)
    validation_cadence: int = Field(default=enums.VALIDATION_CADENCE, ge=1)
    max_epochs: int = Field(default=1, ge=1)
    max_note_steps: Optional[int] = Field(default=None, ge=1)
    seed: int = 0
    checkpoint_dir: Path = Path("checkpoints")
    metrics_log: Optional[Path] = None


# Reports
class NoteResidual(BaseModel):
    performance_id: str
    version_index: int
    note_index: int
    predicted: float
    target: float

    @property
    def residual(self) -> float:
        return self.predicted - self.target


class EvalReport(BaseModel):
    """Note-level error of the predictor on one split."""
    split: str
    mse: float = Field(..., ge=0, description="semitones squared")
    cents: float = Field(..., ge=0, description="100 * sqrt(mse)")
    sign_agreement: float = Field(..., ge=0, le=1)
    n_notes: int
    n_degenerate: int = 0
    residuals: List[NoteResidual] = Field(default_factory=list)

    @property
    def rounded_cents(self) -> str:
        return f"{round(self.cents)} cents"


class DeviationStats(BaseModel):
    """Per-note cent deviation of a performance from its reference pitches."""
    deviations: List[float]
    std: float
    median_abs: Optional[float] = None
    median_defined: bool = True
    n_within_window: int = 0
    in_preferred_range: bool = Field(
        default=False, description="std of deviations inside the 40-60 cent band"
    )
    median_below_preferred: bool = Field(
        default=False, description="restricted median |deviation| below 46 cents"
    )


class NoteCorrection(BaseModel):
    start_frame: int
    end_frame: int
    start_s: float
    end_s: float
    median_f0: float
    shift_cents: float
    degenerate: bool = False
    applied: bool = True


class CorrectionReport(BaseModel):
    """Per-note shifts applied to a vocal track."""
    method: CorrectionMethod
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    notes: List[NoteCorrection] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)


class ClipInfo(BaseModel):
    index: int
    start_s: float
    length_s: float
    voiced_fraction: float
    paths: List[str] = Field(default_factory=list)


class ClipReport(BaseModel):
    final_threshold: float
    thresholds_tried: List[float]
    clips: List[ClipInfo]


# API responses
class PitchAnalysisResponse(BaseModel):
    """Response model for the pitch analysis endpoint."""
    duration_s: float
    n_frames: int
    voiced_fraction: float
    notes: List[NoteSegment]


class HealthResponse(BaseModel):
    status: str
    service: str
    version: str
    timestamp: str
