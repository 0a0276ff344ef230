"""
Tests for the synthetic performance renderer.
"""

import numpy as np
import pytest

from src.core.exceptions import SpecError
from src.models.schemas import SongSpec
from src.services.datagen.synth import random_song_spec, synth_performance
from src.services.pitch.units import midi_to_hz
from tests.conftest import HOP, SR


def test_rendering_is_deterministic(toy_spec):
    a_vocal, a_backing, a_notes = synth_performance(3, toy_spec)
    b_vocal, b_backing, b_notes = synth_performance(3, toy_spec)
    np.testing.assert_array_equal(a_vocal.samples, b_vocal.samples)
    np.testing.assert_array_equal(a_backing.samples, b_backing.samples)
    assert a_notes == b_notes

    c_vocal, _, _ = synth_performance(4, toy_spec)
    assert not np.array_equal(a_vocal.samples, c_vocal.samples)


def test_reference_notes_follow_the_melody(toy_performance, toy_spec):
    vocal, backing, notes = toy_performance
    assert len(notes) == len(toy_spec.melody)
    assert len(vocal) == len(backing)
    assert vocal.peak == pytest.approx(1.0)
    for note, pitch in zip(notes, toy_spec.melody):
        assert note.median_f0 == pytest.approx(midi_to_hz(pitch))
        assert note.n_frames > 0
    assert all(a.end_frame <= b.start_frame for a, b in zip(notes, notes[1:]))

    # 2 beats at 100 bpm is 1.2 s, less a rest of at most 80 ms
    beat_frames = 1.2 * SR / HOP
    for note in notes:
        assert beat_frames - 0.08 * SR / HOP - 2 <= note.n_frames <= beat_frames + 1


def test_tail_is_silent(toy_performance):
    vocal, _, notes = toy_performance
    tail = vocal.samples[notes[-1].end_frame * HOP :]
    assert tail.size >= 0.25 * SR
    assert np.all(tail == 0)


def test_random_specs_use_chord_tones():
    spec = random_song_spec(1000, 2001)
    assert spec == random_song_spec(1000, 2001)
    assert len(spec.chords) == 4
    assert 80.0 <= spec.tempo_bpm <= 120.0
    beats_per_chord = []
    i = 0
    for chord in spec.chords:
        total = 0.0
        while total < 4.0:
            assert spec.melody[i] - 12 in chord
            total += spec.note_beats[i]
            i += 1
        beats_per_chord.append(total)
    assert beats_per_chord == [4.0] * 4
    assert i == len(spec.melody)


def test_unrenderable_specs_rejected(toy_spec):
    too_low = toy_spec.model_copy(update={"melody": [45, 72, 65, 69]})
    with pytest.raises(SpecError):
        synth_performance(0, too_low)

    too_short = SongSpec(chords=[[57, 60, 64]], melody=[69], note_beats=[0.05])
    with pytest.raises(SpecError):
        synth_performance(0, too_short)
