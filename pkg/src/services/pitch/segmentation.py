"""
Note segmentation of a pitch track.

Training data uses silence boundaries only. At correction time the silence
segments are further split where the smoothed pitch moves to a new level and
stays there, which separates legato notes.
"""

import logging
from dataclasses import dataclass
from typing import List

import numpy as np
from scipy.signal import medfilt

from src.core.config import settings
from src.core.exceptions import DomainError
from src.models.schemas import NoteSegment
from src.models.signals import PitchTrack

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SegmentationParams:
    min_note_frames: int = 5
    min_gap_frames: int = 3
    split_threshold_cents: float = 80.0
    median_kernel: int = 5

    @classmethod
    def from_settings(cls) -> "SegmentationParams":
        return cls(
            min_note_frames=settings.MIN_NOTE_FRAMES,
            min_gap_frames=settings.MIN_GAP_FRAMES,
            split_threshold_cents=settings.SPLIT_THRESHOLD_CENTS,
        )


def _runs(mask: np.ndarray) -> List[tuple]:
    """Half-open index ranges of consecutive True entries."""
    edges = np.diff(np.concatenate(([0], mask.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    return list(zip(starts.tolist(), ends.tolist()))


def median_note_pitch(track: PitchTrack, note: NoteSegment) -> float:
    """Median f0 of the voiced frames inside ``note``."""
    f0 = track.f0[note.start_frame : note.end_frame]
    voiced = f0[f0 > 0]
    if voiced.size == 0:
        raise DomainError(f"note [{note.start_frame}, {note.end_frame}) has no voiced frames")
    return float(np.median(voiced))


def _note(track: PitchTrack, start: int, end: int) -> NoteSegment:
    # edges sit on voiced frames; bridged gaps stay inside
    voiced = np.flatnonzero(track.f0[start:end] > 0)
    if voiced.size:
        start, end = start + int(voiced[0]), start + int(voiced[-1]) + 1
    note = NoteSegment(start_frame=start, end_frame=end)
    return note.model_copy(update={"median_f0": median_note_pitch(track, note)})


def segment_notes_silence(
    track: PitchTrack, params: SegmentationParams = SegmentationParams()
) -> List[NoteSegment]:
    """
    Voiced runs separated by silence.

    Unvoiced gaps shorter than ``min_gap_frames`` are bridged, so a note may
    hold a few unvoiced frames inside it but always starts and ends on a
    voiced frame. Runs shorter than ``min_note_frames`` are dropped.
    """
    if len(track) == 0:
        raise DomainError("empty pitch track")
    voiced = track.voiced.copy()
    runs = _runs(voiced)
    for (_, prev_end), (next_start, _) in zip(runs, runs[1:]):
        if next_start - prev_end < params.min_gap_frames:
            voiced[prev_end:next_start] = True

    notes = [
        _note(track, start, end)
        for start, end in _runs(voiced)
        if end - start >= params.min_note_frames
    ]
    logger.debug(f"Silence segmentation: {len(notes)} notes")
    return notes


def _split_points(track: PitchTrack, note: NoteSegment, params: SegmentationParams) -> List[int]:
    span = np.arange(note.start_frame, note.end_frame)
    frames = span[track.f0[span] > 0]
    if frames.size < 2 * params.min_note_frames:
        return []

    cents = 1200.0 * np.log2(track.f0[frames] / note.median_f0)
    smooth = medfilt(cents, kernel_size=params.median_kernel) if params.median_kernel > 1 else cents

    hold = params.min_note_frames
    limit = params.split_threshold_cents
    splits: List[int] = []
    piece_start, piece_first = note.start_frame, 0
    i = 1
    while i + hold <= frames.size:
        ref = np.median(smooth[piece_first:i])
        window = smooth[i : i + hold]
        if (
            frames[i] - piece_start >= params.min_note_frames
            and np.all(np.abs(window - ref) > limit)
            and np.all(np.abs(window - smooth[i]) <= limit)
        ):
            splits.append(int(frames[i]))
            piece_start, piece_first = int(frames[i]), i
            i += hold
            continue
        i += 1
    return splits


def segment_notes_pyin(
    track: PitchTrack, params: SegmentationParams = SegmentationParams()
) -> List[NoteSegment]:
    """
    Silence segmentation refined at sustained pitch changes.

    A silence segment is split at frame ``t`` when the median-smoothed pitch
    differs from the current piece's median by more than
    ``split_threshold_cents`` for ``min_note_frames`` consecutive voiced
    frames that agree with each other, and the piece before ``t`` already
    spans ``min_note_frames``.
    """
    notes: List[NoteSegment] = []
    for note in segment_notes_silence(track, params):
        bounds = [note.start_frame, *_split_points(track, note, params), note.end_frame]
        notes.extend(_note(track, start, end) for start, end in zip(bounds, bounds[1:]))
    logger.debug(f"pYIN segmentation: {len(notes)} notes")
    return notes
