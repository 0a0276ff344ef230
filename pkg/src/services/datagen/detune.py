"""
Per-note random detuning in the constant-Q domain.

Each version of a performance shifts every note's spectrogram columns by an
independent amount drawn uniformly from one semitone either way; the
training label of a note is the shift that undoes it.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.core.exceptions import DomainError, InvariantError, RangeError
from src.models import enums
from src.models.schemas import DetuneSpec, NoteSegment
from src.models.signals import CqtSpectrogram, ModelInput
from src.services.audio.cqt import shift_cqt_bins, truncate_buffer
from src.services.audio.features import prepare_features

logger = logging.getLogger(__name__)


def sample_note_shifts(n_notes: int, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. shifts in semitones, uniform on [-1, 1]."""
    if n_notes < 1:
        raise DomainError(f"need at least one note, got {n_notes}")
    return rng.uniform(-enums.MAX_DETUNE_SEMITONES, enums.MAX_DETUNE_SEMITONES, size=n_notes)


def check_notes(notes: Sequence[NoteSegment], n_frames: int) -> None:
    """Notes must be non-empty, inside ``[0, n_frames)``, sorted and disjoint."""
    previous_end = 0
    for note in notes:
        if note.end_frame <= note.start_frame:
            raise RangeError(f"empty note span [{note.start_frame}, {note.end_frame})")
        if note.end_frame > n_frames:
            raise RangeError(f"note [{note.start_frame}, {note.end_frame}) exceeds {n_frames} frames")
        if note.start_frame < previous_end:
            raise InvariantError(f"note starting at frame {note.start_frame} overlaps the previous note")
        previous_end = note.end_frame


def detune_columns(spec: CqtSpectrogram, notes: Sequence[NoteSegment], shifts: Sequence[float]) -> CqtSpectrogram:
    """
    Shift each note's columns of an untruncated spectrogram.

    Frames outside every note are left as they are.

    Args:
        spec: 1056-bin spectrogram
        notes: Sorted, disjoint note spans
        shifts: Semitones per note

    Returns:
        Detuned spectrogram, still untruncated
    """
    check_notes(notes, spec.n_frames)
    if len(notes) != len(shifts):
        raise RangeError(f"{len(notes)} notes but {len(shifts)} shifts")
    mag = spec.mag.copy()
    for note, shift in zip(notes, shifts):
        cols = slice(note.start_frame, note.end_frame)
        block = CqtSpectrogram(mag=spec.mag[:, cols], params=spec.params)
        mag[:, cols] = shift_cqt_bins(block, 100.0 * float(shift)).mag
    return CqtSpectrogram(mag=mag, params=spec.params)


def make_detuned_versions(
    vocal_cqt: CqtSpectrogram,
    notes: Sequence[NoteSegment],
    seeds: Sequence[int],
    forced_shifts: Optional[Sequence[Sequence[float]]] = None,
) -> List[Tuple[CqtSpectrogram, DetuneSpec]]:
    """
    Detuned, truncated copies of a vocal spectrogram, one per seed.

    Args:
        vocal_cqt: 1056-bin vocal spectrogram
        notes: Note spans of the performance
        seeds: One RNG seed per version
        forced_shifts: Explicit per-version shifts, bypassing sampling

    Returns:
        ``(1024-bin spectrogram, DetuneSpec)`` per version
    """
    if not 1 <= len(seeds) <= enums.N_VERSIONS:
        raise RangeError(f"expected 1-{enums.N_VERSIONS} seeds, got {len(seeds)}")
    check_notes(notes, vocal_cqt.n_frames)

    versions = []
    for index, seed in enumerate(seeds):
        if forced_shifts is not None:
            shifts = np.asarray(forced_shifts[index], dtype=np.float64)
        elif notes:
            shifts = sample_note_shifts(len(notes), np.random.default_rng(seed))
        else:
            shifts = np.zeros(0)
        spec = DetuneSpec(shifts=shifts.tolist(), seed=int(seed), version_index=index)
        versions.append((truncate_buffer(detune_columns(vocal_cqt, notes, shifts)), spec))
    return versions


@dataclass(eq=False)
class NoteExample:
    note: NoteSegment
    input: ModelInput
    target: float


@dataclass(eq=False)
class TrainingExample:
    """One detuned version of a performance; every target is minus its applied shift."""
    performance_id: str
    version_index: int
    notes: List[NoteExample] = field(default_factory=list)

    @property
    def targets(self) -> np.ndarray:
        return np.array([n.target for n in self.notes])


def build_training_example(
    performance_id: str,
    detuned: CqtSpectrogram,
    backing: CqtSpectrogram,
    notes: Sequence[NoteSegment],
    spec: DetuneSpec,
) -> TrainingExample:
    """Slice a detuned version into per-note network inputs with corrective targets."""
    features = prepare_features(detuned, backing)
    example = TrainingExample(performance_id=performance_id, version_index=spec.version_index)
    for note, shift in zip(notes, spec.shifts):
        target = -float(shift)
        labelled = note.model_copy(update={"target_shift": target})
        example.notes.append(NoteExample(note=labelled, input=features.slice(note), target=target))
    return example
