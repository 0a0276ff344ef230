"""Pitch analysis service."""

from typing import List, Optional

from src.core.config import settings
from src.models.schemas import NoteSegment
from src.models.signals import AudioBuffer, PitchTrack, PyinParams
from src.services.base import BaseService
from src.services.pitch.segmentation import SegmentationParams, segment_notes_pyin, segment_notes_silence
from src.services.pitch.yin import pyin_track


class PitchService(BaseService):
    """Tracks f0 and segments notes with settings-derived parameters."""

    def __init__(
        self,
        pyin_params: Optional[PyinParams] = None,
        segmentation: Optional[SegmentationParams] = None,
    ):
        super().__init__("pitch")
        self.pyin_params = pyin_params or PyinParams.from_settings(settings)
        self.segmentation = segmentation or SegmentationParams.from_settings()

    def track(self, audio: AudioBuffer) -> PitchTrack:
        track = pyin_track(audio, self.pyin_params)
        self.logger.info(f"Tracked {len(track)} frames, {track.voiced.mean():.0%} voiced")
        return track

    def notes(self, track: PitchTrack, split_legato: bool = True) -> List[NoteSegment]:
        """pYIN-based notes when ``split_legato``, silence-based otherwise."""
        if split_legato:
            return segment_notes_pyin(track, self.segmentation)
        return segment_notes_silence(track, self.segmentation)

    def analyze(self, audio: AudioBuffer, split_legato: bool = True):
        track = self.track(audio)
        return track, self.notes(track, split_legato)
