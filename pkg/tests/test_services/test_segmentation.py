"""
Tests for note segmentation and pitch-track export.
"""

import numpy as np
import pytest

from src.core.exceptions import DomainError
from src.models.schemas import NoteSegment
from src.models.signals import PitchTrack
from src.services.pitch.export import export_notes_json, export_track_csv, import_notes_json, import_track_csv
from src.services.pitch.segmentation import (
    SegmentationParams,
    median_note_pitch,
    segment_notes_pyin,
    segment_notes_silence,
)

PARAMS = SegmentationParams()


def _track(f0):
    f0 = np.asarray(f0, dtype=np.float64)
    return PitchTrack(f0=f0, voicing=(f0 > 0).astype(float))


def _spans(notes):
    return [(n.start_frame, n.end_frame) for n in notes]


def test_short_gaps_bridged_and_short_runs_dropped():
    f0 = [0] * 3 + [220] * 10 + [0] * 2 + [220] * 10 + [0] * 6 + [330] * 4 + [0] * 5 + [440] * 8 + [0] * 2
    notes = segment_notes_silence(_track(f0))
    assert _spans(notes) == [(3, 25), (40, 48)]
    assert notes[0].median_f0 == pytest.approx(220.0)
    assert notes[1].median_f0 == pytest.approx(440.0)


def test_legato_pitch_change_splits_note():
    f0 = [0] * 2 + [220] * 20 + [247] * 20 + [0] * 2
    assert _spans(segment_notes_silence(_track(f0))) == [(2, 42)]
    notes = segment_notes_pyin(_track(f0))
    assert _spans(notes) == [(2, 22), (22, 42)]
    assert notes[1].median_f0 == pytest.approx(247.0)


def test_vibrato_and_blips_do_not_split():
    t = np.arange(60)
    f0 = 220 * 2 ** (40 * np.sin(2 * np.pi * t / 20) / 1200)
    f0[30:32] = 330
    notes = segment_notes_pyin(_track(np.concatenate([[0, 0], f0, [0, 0]])))
    assert len(notes) == 1


def test_median_pitch_ignores_unvoiced_frames():
    track = _track([0, 200, 0, 220, 240, 0])
    assert median_note_pitch(track, NoteSegment(start_frame=0, end_frame=6)) == pytest.approx(220.0)
    with pytest.raises(DomainError):
        median_note_pitch(track, NoteSegment(start_frame=0, end_frame=1))


def test_track_and_notes_export(tmp_path):
    track = _track([0, 220.5, 221.0, 0])
    path = export_track_csv(track, tmp_path / "track.csv")
    assert path.read_text().splitlines()[0] == "frame,time_s,f0_hz,voicing"
    loaded = import_track_csv(path, hop=track.hop, sample_rate=track.sample_rate)
    np.testing.assert_allclose(loaded.f0, track.f0)

    notes = [NoteSegment(start_frame=1, end_frame=3, median_f0=220.75)]
    assert import_notes_json(export_notes_json(notes, tmp_path / "notes.json")) == notes


def test_segments_start_and_end_on_voiced_frames():
    f0 = [0] * 2 + [220] * 30 + [0] * 2 + [294] * 28 + [0] * 3
    track = _track(f0)
    assert _spans(segment_notes_silence(track)) == [(2, 62)]

    notes = segment_notes_pyin(track)
    assert _spans(notes) == [(2, 32), (34, 62)]
    for note in notes:
        assert track.f0[note.start_frame] > 0
        assert track.f0[note.end_frame - 1] > 0
