"""
Tests for the probabilistic YIN tracker.
"""

import numpy as np
import pytest

from src.core.exceptions import RangeError, ShapeError, SizeError
from src.models.signals import AudioBuffer, PyinParams
from src.services.pitch.yin import pyin_track, yin_frame
from tests.conftest import HOP, SR, tone, with_silence

PARAMS = PyinParams()


def _median_error_cents(track, freq):
    voiced = track.f0[track.f0 > 0]
    assert voiced.size > 0
    return float(np.median(np.abs(1200 * np.log2(voiced / freq))))


def test_frame_candidates_find_the_period():
    frame = tone(220.0, 0.2).samples[: PARAMS.frame]
    candidates = yin_frame(frame)
    f0, _ = candidates.top()
    assert abs(1200 * np.log2(f0 / 220.0)) < 10
    assert 0 < candidates.voiced_probability <= 1


def test_silent_frame_has_no_candidates():
    candidates = yin_frame(np.zeros(PARAMS.frame))
    assert len(candidates) == 0
    assert candidates.top() is None


def test_white_noise_frame_is_unlikely_voiced():
    noise = np.random.default_rng(11).standard_normal(PARAMS.frame) * 0.3
    assert yin_frame(noise).voiced_probability < 0.3


def test_frame_length_checked():
    with pytest.raises(ShapeError):
        yin_frame(np.zeros(100))


@pytest.mark.parametrize("freq", [100.0, 150.0, 220.0, 330.0, 440.0, 600.0, 800.0])
def test_steady_tones_tracked_within_ten_cents(freq):
    track = pyin_track(tone(freq, 1.0))
    assert track.voiced.mean() > 0.8
    assert _median_error_cents(track, freq) < 10


def test_vibrato_followed():
    rate, depth, base = 6.0, 50.0, 300.0
    t = np.arange(2 * SR) / SR
    cents = depth * np.sin(2 * np.pi * rate * t)
    phase = 2 * np.pi * np.cumsum(base * 2 ** (cents / 1200)) / SR
    track = pyin_track(AudioBuffer(0.8 * np.sin(phase), SR))

    frames = np.flatnonzero(track.f0 > 0)
    frames = frames[(frames > 4) & (frames < len(track) - 4)]
    truth = base * 2 ** (depth * np.sin(2 * np.pi * rate * frames * HOP / SR) / 1200)
    error = 1200 * np.log2(track.f0[frames] / truth)
    assert np.sqrt(np.mean(error ** 2)) < 15


def test_silence_is_unvoiced_and_frames_are_centred():
    audio = with_silence(tone(220.0, 0.5), lead=0.5, tail=0.5)
    track = pyin_track(audio)
    assert len(track) == 1 + len(audio) // HOP
    assert not track.voiced[:10].any()
    assert not track.voiced[-10:].any()
    assert np.all(track.voicing[:10] == 0)


def test_short_or_wrong_rate_audio_rejected():
    with pytest.raises(SizeError):
        pyin_track(AudioBuffer(np.ones(PARAMS.frame - 1), SR))
    with pytest.raises(RangeError):
        pyin_track(AudioBuffer(np.ones(SR), 16000))
