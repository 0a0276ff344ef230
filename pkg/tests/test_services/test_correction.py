"""
Tests for score-free, baseline and random-detune correction.
"""

import json

import numpy as np
import pytest

from src.models.enums import CorrectionMethod, Split
from src.models.schemas import CorpusManifest, NoteSegment, TrainConfig
from src.services.audio.io import load_wav
from src.services.datagen.corpus import load_reference, load_song
from src.services.pipeline.correction import NOTHING_TO_CORRECT, CorrectionService, baseline_shift_cents, cmd_correct
from src.services.pipeline.training import Trainer
from src.services.pitch.units import hz_to_midi, midi_to_hz
from src.services.pitch.yin import pyin_track
from src.utils.helpers import write_json
from tests.conftest import cheap_net, save_wav, sawtooth, with_silence


class ConstantNet:
    """Predicts the same shift for every note and counts the notes in its hidden state."""

    hidden = 4
    dtype = np.float32

    def __init__(self, value: float, min_frames: int = 8):
        self.value = value
        self.min_frames = min_frames
        self.states = []

    def predict(self, model_input, h):
        self.states.append(h.copy())
        return self.value, h + 1


def measured_pitch(path, note) -> float:
    track = pyin_track(load_wav(path))
    inner = track.f0[note.start_frame + 5 : note.end_frame - 5]
    return float(np.median(inner[inner > 0]))


@pytest.fixture
def sharp_vowel(tmp_path):
    return save_wav(tmp_path / "sharp.wav", with_silence(sawtooth(450.0, 1.0)))


@pytest.fixture
def backing(tmp_path):
    return save_wav(tmp_path / "backing.wav", with_silence(sawtooth(110.0, 1.0)))


def test_baseline_shift_to_the_nearest_degree():
    assert baseline_shift_cents(440.0) == pytest.approx(0.0, abs=1e-9)
    assert baseline_shift_cents(450.0) == pytest.approx(-38.906, abs=1e-3)
    assert baseline_shift_cents(midi_to_hz(69.3)) == pytest.approx(-30.0)
    assert baseline_shift_cents(midi_to_hz(69.7)) == pytest.approx(30.0)


def test_baseline_tie_goes_down():
    assert baseline_shift_cents(midi_to_hz(69.5)) == pytest.approx(-50.0)


def test_baseline_stays_inside_the_midi_range():
    assert hz_to_midi(5.0) < 0
    assert baseline_shift_cents(5.0) > 50.0
    assert baseline_shift_cents(midi_to_hz(127.4)) == pytest.approx(-40.0)


def test_baseline_correction_lands_on_a_degree(sharp_vowel, tmp_path):
    output = tmp_path / "out" / "corrected.wav"
    report = CorrectionService().correct_baseline(sharp_vowel, output)
    assert report.method == CorrectionMethod.BASELINE
    assert len(report.notes) == 1
    note = report.notes[0]
    assert note.applied
    assert abs(note.shift_cents) <= 50.0
    assert note.shift_cents == pytest.approx(-38.9, abs=5.0)
    assert note.end_s > note.start_s

    corrected = measured_pitch(output, NoteSegment(start_frame=note.start_frame, end_frame=note.end_frame))
    assert abs(1200 * np.log2(corrected / 440.0)) <= 5.0

    saved = json.loads(output.with_suffix(".json").read_text())
    assert saved["method"] == "baseline"
    assert saved["output_path"] == str(output)


def test_silent_vocal_is_copied_through(tmp_path):
    silent = save_wav(tmp_path / "silent.wav", sawtooth(220.0, 1.0).replace(np.zeros(22050)))
    output = tmp_path / "silent_out.wav"
    report = CorrectionService().correct_baseline(silent, output)
    assert report.notes == []
    assert report.warnings == [NOTHING_TO_CORRECT]
    assert output.read_bytes() == silent.read_bytes()
    assert output.with_suffix(".json").exists()


def test_model_predictions_are_clamped(sung_vowel, tmp_path):
    service = CorrectionService()
    track, notes = service.analyze(sung_vowel)
    assert len(notes) == 1
    shifts, degenerate = service.model_shifts(ConstantNet(5.0), sung_vowel, sung_vowel, notes)
    assert shifts == [1.0]
    assert degenerate == [False]
    shifts, _ = service.model_shifts(ConstantNet(-3.0), sung_vowel, sung_vowel, notes)
    assert shifts == [-1.0]
    shifts, _ = service.model_shifts(ConstantNet(0.25), sung_vowel, sung_vowel, notes)
    assert shifts == [0.25]


def test_short_notes_are_left_alone(sung_vowel):
    service = CorrectionService()
    _, notes = service.analyze(sung_vowel)
    net = ConstantNet(0.5, min_frames=10 ** 6)
    shifts, degenerate = service.model_shifts(net, sung_vowel, sung_vowel, notes)
    assert shifts == [0.0]
    assert degenerate == [True]
    assert net.states == []


def test_hidden_state_starts_small_and_is_seeded(sung_vowel):
    service = CorrectionService()
    _, notes = service.analyze(sung_vowel)
    first, again = ConstantNet(0.0), ConstantNet(0.0)
    service.model_shifts(first, sung_vowel, sung_vowel, notes, seed=3)
    service.model_shifts(again, sung_vowel, sung_vowel, notes, seed=3)
    np.testing.assert_array_equal(first.states[0], again.states[0])
    assert np.all(np.abs(first.states[0]) < 1e-2)
    assert first.states[0].dtype == np.float32


def test_model_correction_end_to_end(sharp_vowel, backing, tmp_path):
    service = CorrectionService()
    output = tmp_path / "model.wav"
    report = service.correct_with_model(sharp_vowel, backing, ConstantNet(-0.5), output, tmp_path / "model.json")
    assert report.method == CorrectionMethod.MODEL
    assert [n.shift_cents for n in report.notes] == [-50.0]
    note = report.notes[0]
    corrected = measured_pitch(output, NoteSegment(start_frame=note.start_frame, end_frame=note.end_frame))
    assert 1200 * np.log2(corrected / 450.0) == pytest.approx(-50.0, abs=5.0)

    baseline = service.correct_baseline(sharp_vowel, tmp_path / "baseline.wav")
    assert [(n.start_frame, n.end_frame) for n in baseline.notes] == [
        (n.start_frame, n.end_frame) for n in report.notes
    ]


def test_detuned_control_is_reproducible(sharp_vowel, tmp_path):
    service = CorrectionService()
    a = service.detune_audio(sharp_vowel, tmp_path / "a.wav", seed=9)
    b = service.detune_audio(sharp_vowel, tmp_path / "b.wav", seed=9)
    assert a.method == CorrectionMethod.DETUNE
    assert [n.shift_cents for n in a.notes] == [n.shift_cents for n in b.notes]
    assert all(abs(n.shift_cents) <= 100.0 for n in a.notes)
    assert (tmp_path / "a.wav").read_bytes() == (tmp_path / "b.wav").read_bytes()


def train_on_corpus(corpus, tmp_path, songs=None, net=None, **kwargs):
    manifest = CorpusManifest(root=corpus.root, entries=corpus.split(Split.TRAIN))
    path = write_json(tmp_path / "train.json", manifest.model_dump(mode="json"))
    trainer = Trainer(TrainConfig(manifest=path, checkpoint_dir=tmp_path / "ckpt", **kwargs), net=net)
    if songs is not None:
        trainer.train_entries = trainer.train_entries[:songs]
    return trainer.train()


def overlapping(notes, note):
    overlap = [min(n.end_frame, note.end_frame) - max(n.start_frame, note.start_frame) for n in notes]
    best = int(np.argmax(overlap))
    return notes[best] if overlap[best] > 0 else None


def test_trained_checkpoint_drives_the_correction(corpus, tmp_path):
    net = cheap_net()
    result = train_on_corpus(corpus, tmp_path, net=net, learning_rate=1e-3, versions=2, max_note_steps=4)
    assert result.best_checkpoint is not None

    entry = corpus.split(Split.TRAIN)[0]
    vocal = corpus.resolve(entry.vocal_path)
    output = tmp_path / "corrected.wav"
    report = cmd_correct(vocal, corpus.resolve(entry.backing_path), result.best_checkpoint, output)

    assert report.method == CorrectionMethod.MODEL
    assert report.notes
    assert all(abs(n.shift_cents) <= 100.0 for n in report.notes)
    for note in report.notes:
        if note.degenerate or not note.applied or note.end_frame - note.start_frame < 20:
            continue
        segment = NoteSegment(start_frame=note.start_frame, end_frame=note.end_frame)
        moved = 1200 * np.log2(measured_pitch(output, segment) / measured_pitch(vocal, segment))
        assert moved == pytest.approx(note.shift_cents, abs=10.0)


@pytest.mark.slow
def test_overfit_model_pulls_a_detuned_song_back_in_tune(corpus, tmp_path):
    entry = corpus.split(Split.TRAIN)[0]
    song = load_song(corpus, entry)
    _, reference = load_reference(corpus, entry)
    detune = song.detunes[0].shifts
    assert all(abs(d) <= 1.0 for d in detune)

    result = train_on_corpus(
        corpus, tmp_path, songs=1, learning_rate=1e-3, max_epochs=400, max_note_steps=3000, validation_cadence=1000
    )

    service = CorrectionService()
    vocal = load_wav(corpus.resolve(entry.vocal_path))
    detuned, applied = service.psola.correct(vocal, service.pitch.track(vocal), song.notes, detune)
    assert all(applied)
    detuned_path = save_wav(tmp_path / "detuned.wav", detuned)

    output = tmp_path / "corrected.wav"
    report = cmd_correct(detuned_path, corpus.resolve(entry.backing_path), result.best_checkpoint, output)

    f0 = pyin_track(load_wav(output)).f0
    for note in reference:
        inner = f0[note.start_frame + 3 : note.end_frame - 3]
        sung = float(np.median(inner[inner > 0]))
        assert abs(1200 * np.log2(sung / note.median_f0)) <= 20.0

    agree = 0
    for note, d in zip(song.notes, detune):
        predicted = overlapping(report.notes, note)
        if predicted is not None and np.sign(predicted.shift_cents) == np.sign(-d):
            agree += 1
    assert agree / len(song.notes) >= 0.8
