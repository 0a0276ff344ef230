"""PSOLA correction service."""

from typing import List, Optional, Sequence, Tuple

from src.core.config import settings
from src.models.schemas import NoteSegment
from src.models.signals import AudioBuffer, PitchMarks, PitchTrack
from src.services.base import BaseService
from src.services.psola.marks import detect_pitch_marks
from src.services.psola.shifter import shift_notes


class PsolaService(BaseService):
    """Applies per-note semitone shifts to a vocal track."""

    def __init__(self, crossfade_ms: Optional[float] = None):
        super().__init__("psola")
        self.crossfade_ms = settings.CROSSFADE_MS if crossfade_ms is None else crossfade_ms

    def marks(self, audio: AudioBuffer, track: PitchTrack) -> PitchMarks:
        return detect_pitch_marks(audio, track, f_min=settings.PYIN_FMIN, f_max=settings.PYIN_FMAX)

    def correct(
        self,
        audio: AudioBuffer,
        track: PitchTrack,
        notes: Sequence[NoteSegment],
        shifts: Sequence[float],
    ) -> Tuple[AudioBuffer, List[bool]]:
        marks = self.marks(audio, track)
        corrected, applied = shift_notes(audio, notes, shifts, marks, hop=track.hop, crossfade_ms=self.crossfade_ms)
        self.logger.info(f"Shifted {sum(applied)}/{len(applied)} notes using {len(marks)} pitch marks")
        return corrected, applied
