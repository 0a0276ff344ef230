"""Pitch analysis: pYIN tracking, note segmentation and unit conversions."""

from src.services.pitch.export import export_notes_json, export_track_csv, import_notes_json, import_track_csv
from src.services.pitch.segmentation import (
    SegmentationParams,
    median_note_pitch,
    segment_notes_pyin,
    segment_notes_silence,
)
from src.services.pitch.service import PitchService
from src.services.pitch.units import cents_between, hz_to_midi, midi_to_hz
from src.services.pitch.yin import YinCandidates, pyin_track, yin_frame

__all__ = [
    "PitchService",
    "SegmentationParams",
    "YinCandidates",
    "cents_between",
    "export_notes_json",
    "export_track_csv",
    "hz_to_midi",
    "import_notes_json",
    "import_track_csv",
    "median_note_pitch",
    "midi_to_hz",
    "pyin_track",
    "segment_notes_pyin",
    "segment_notes_silence",
    "yin_frame",
]
