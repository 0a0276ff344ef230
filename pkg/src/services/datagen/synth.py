"""
Synthetic in-tune performances.

The vocal is a band-limited sawtooth with vibrato and a quadratic envelope
following a melody of chord tones; the backing holds each chord as three
harmonic tones. Reference notes carry the exact sung frame spans and pitches.
"""

import logging
import math
from typing import List, Tuple

import numpy as np

from src.core.exceptions import SpecError
from src.models import enums
from src.models.schemas import NoteSegment, SongSpec
from src.models.signals import AudioBuffer, CqtParams
from src.services.audio.io import normalize
from src.services.pitch.units import midi_to_hz

logger = logging.getLogger(__name__)

ATTACK_S = 0.015
RELEASE_S = 0.060
CHORD_FADE_S = 0.005
TAIL_S = 0.25
BACKING_HARMONICS = 6
BACKING_LEVEL = 0.5
NYQUIST_FRACTION = 0.45

# scale degree -> (semitones above the key root, minor triad?)
_DEGREES = {1: (0, False), 2: (2, True), 3: (4, True), 4: (5, False), 5: (7, False), 6: (9, True)}
_PROGRESSIONS = [(1, 4, 5, 1), (1, 6, 4, 5), (6, 4, 1, 5), (1, 5, 6, 4), (2, 5, 1, 6), (1, 3, 4, 5)]
_RHYTHMS = [(2.0, 2.0), (1.0, 3.0), (3.0, 1.0), (1.0, 1.0, 2.0), (2.0, 1.0, 1.0)]


def random_song_spec(backing_seed: int, melody_seed: int, n_chords: int = 4) -> SongSpec:
    """
    Draw a chord progression from ``backing_seed`` and a melody over it from ``melody_seed``.

    Chords sit around C3-G4; melody notes are chord tones an octave up.
    """
    rb = np.random.default_rng(backing_seed)
    root = 48 + int(rb.integers(0, 8))
    progression = _PROGRESSIONS[int(rb.integers(len(_PROGRESSIONS)))]
    tempo = float(rb.uniform(80.0, 120.0))

    chords: List[List[int]] = []
    for i in range(n_chords):
        offset, minor = _DEGREES[progression[i % len(progression)]]
        base = root + offset
        chords.append([base, base + (3 if minor else 4), base + 7])

    rm = np.random.default_rng(melody_seed)
    melody: List[int] = []
    beats: List[float] = []
    for chord in chords:
        rhythm = _RHYTHMS[int(rm.integers(len(_RHYTHMS)))]
        for length in rhythm:
            melody.append(int(rm.choice(chord)) + 12)
            beats.append(float(length))
    return SongSpec(tempo_bpm=tempo, chords=chords, melody=melody, note_beats=beats)


def _check_range(spec: SongSpec, params: CqtParams) -> None:
    if not spec.melody:
        raise SpecError("melody is empty")
    low = params.bin_frequency(params.buffer_bins)
    high = params.bin_frequency(params.total_bins - params.buffer_bins - 1)
    for p in spec.melody:
        f = midi_to_hz(p)
        if not low <= f <= high:
            raise SpecError(f"melody pitch {p} ({f:.1f} Hz) outside the analysed range {low:.1f}-{high:.1f} Hz")


def _envelope(n: int, sample_rate: int) -> np.ndarray:
    env = np.ones(n)
    attack = min(int(ATTACK_S * sample_rate), n // 2)
    release = min(int(RELEASE_S * sample_rate), n - attack)
    if attack:
        env[:attack] = (np.arange(attack) / attack) ** 2
    if release:
        env[n - release :] = (1.0 - np.arange(1, release + 1) / release) ** 2
    return env


def _sawtooth(f0: np.ndarray, sample_rate: int) -> np.ndarray:
    """Band-limited sawtooth following an instantaneous frequency curve."""
    phase = 2.0 * np.pi * np.cumsum(f0) / sample_rate
    n_harmonics = max(int(NYQUIST_FRACTION * sample_rate / f0.max()), 1)
    out = np.zeros_like(phase)
    for k in range(1, n_harmonics + 1):
        out += np.sin(k * phase) / k
    return out


def _harmonic_tone(freq: float, n: int, sample_rate: int) -> np.ndarray:
    t = np.arange(n) / sample_rate
    out = np.zeros(n)
    for k in range(1, BACKING_HARMONICS + 1):
        if k * freq < NYQUIST_FRACTION * sample_rate:
            out += np.sin(2.0 * np.pi * k * freq * t) / k
    return out


def synth_performance(
    seed: int,
    spec: SongSpec,
    sample_rate: int = enums.SAMPLE_RATE,
    hop: int = enums.HOP_LENGTH,
    params: CqtParams = CqtParams(),
) -> Tuple[AudioBuffer, AudioBuffer, List[NoteSegment]]:
    """
    Render a vocal and backing pair.

    Args:
        seed: Seeds rest lengths and vibrato phases
        spec: Tempo, chords and melody
        sample_rate: Output rate
        hop: Frame hop the reference notes are expressed in
        params: Constant-Q geometry bounding the allowed melody range

    Returns:
        Peak-normalized vocal and backing, and the reference notes
    """
    _check_range(spec, params)
    rng = np.random.default_rng(seed)
    beat = 60.0 / spec.tempo_bpm
    total = int(round((sum(spec.note_beats) * beat + TAIL_S) * sample_rate))

    vocal = np.zeros(total)
    notes: List[NoteSegment] = []
    start_s = 0.0
    for pitch, length in zip(spec.melody, spec.note_beats):
        rest = rng.uniform(*spec.rest_ms) / 1000.0
        on = int(round(start_s * sample_rate))
        off = int(round((start_s + length * beat - rest) * sample_rate))
        start_s += length * beat
        if off - on < hop:
            raise SpecError(f"note of {length} beats at {spec.tempo_bpm} bpm is too short")

        f_ref = midi_to_hz(pitch)
        t = np.arange(off - on) / sample_rate
        vib = spec.vibrato_cents * np.sin(2.0 * np.pi * spec.vibrato_hz * t + rng.uniform(0, 2 * np.pi))
        f0 = f_ref * 2.0 ** (vib / 1200.0)
        vocal[on:off] = _sawtooth(f0, sample_rate) * _envelope(off - on, sample_rate)

        notes.append(
            NoteSegment(
                start_frame=math.ceil(on / hop),
                end_frame=(off - 1) // hop + 1,
                median_f0=f_ref,
            )
        )

    backing = np.zeros(total)
    chord_len = int(round(spec.beats_per_chord * beat * sample_rate))
    fade = int(CHORD_FADE_S * sample_rate)
    for i, c0 in enumerate(range(0, total, chord_len)):
        n = min(chord_len, total - c0)
        chord = spec.chords[i % len(spec.chords)]
        block = sum(_harmonic_tone(midi_to_hz(p), n, sample_rate) for p in chord)
        ramp = np.ones(n)
        f = min(fade, n // 2)
        if f:
            ramp[:f] = np.linspace(0.0, 1.0, f)
            ramp[-f:] = np.linspace(1.0, 0.0, f)
        backing[c0 : c0 + n] += BACKING_LEVEL * block * ramp

    logger.debug(f"Rendered {len(notes)} notes, {total / sample_rate:.2f} s")
    return (
        normalize(AudioBuffer(vocal, sample_rate)),
        normalize(AudioBuffer(backing, sample_rate)),
        notes,
    )
