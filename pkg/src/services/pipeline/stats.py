"""Note-level intonation statistics against a reference melody."""

import logging
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from src.core.exceptions import ShapeError
from src.models import enums
from src.models.schemas import DeviationStats, NoteSegment
from src.models.signals import PitchTrack
from src.services.audio.io import load_wav
from src.services.pitch.segmentation import median_note_pitch
from src.services.pitch.service import PitchService
from src.services.pitch.units import cents_between, midi_to_hz
from src.utils.helpers import read_json

logger = logging.getLogger(__name__)


def deviation_stats(
    track: PitchTrack,
    notes: Sequence[NoteSegment],
    reference: Sequence[float],
    window_cents: float = enums.DEVIATION_WINDOW_CENTS,
) -> DeviationStats:
    """
    Cent deviation of each sung note from its reference MIDI pitch.

    The standard deviation is over all notes (population form). The median
    of absolute deviations only counts notes within ``window_cents`` of the
    reference; when none are, the median is reported as undefined.

    Args:
        track: Pitch track of the sung performance
        notes: Note spans, one per reference pitch
        reference: Intended MIDI pitch per note

    Returns:
        Deviations plus summary statistics and preferred-range flags
    """
    if len(notes) != len(reference):
        raise ShapeError(f"{len(notes)} notes but {len(reference)} reference pitches")
    if not notes:
        raise ShapeError("deviation statistics need at least one note")

    sung = np.array([median_note_pitch(track, note) for note in notes])
    deviations = np.asarray(cents_between(midi_to_hz(np.asarray(reference, dtype=np.float64)), sung))
    std = float(np.std(deviations))

    within = np.abs(deviations[np.abs(deviations) <= window_cents])
    median_abs = float(np.median(within)) if within.size else None
    if median_abs is None:
        logger.warning(f"No note within {window_cents:.0f} cents of its reference, median undefined")

    low, high = enums.PREFERRED_STD_RANGE
    return DeviationStats(
        deviations=deviations.tolist(),
        std=std,
        median_abs=median_abs,
        median_defined=median_abs is not None,
        n_within_window=int(within.size),
        in_preferred_range=bool(low <= std <= high),
        median_below_preferred=bool(median_abs is not None and median_abs < enums.PREFERRED_MEDIAN_CENTS),
    )


def cmd_stats(vocal_path: Union[str, Path], reference_path: Union[str, Path]) -> DeviationStats:
    """
    Deviation statistics for a sung WAV.

    ``reference_path`` holds either a list of MIDI pitches, matched against
    the pYIN notes of the vocal, or a ``{"melody": [...], "notes": [...]}``
    object whose notes are used as given.
    """
    track, notes = PitchService().analyze(load_wav(vocal_path))
    reference = read_json(reference_path)
    if isinstance(reference, dict):
        melody = reference["melody"]
        notes = [NoteSegment(**n) for n in reference["notes"]]
    else:
        melody = reference
    return deviation_stats(track, notes, melody)
