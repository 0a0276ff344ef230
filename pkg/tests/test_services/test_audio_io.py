"""
Tests for WAV loading and writing.
"""

import numpy as np
import pytest
import soundfile as sf

from src.core.exceptions import AudioFormatError, SilentInputError, UnsupportedAudioError
from src.models.signals import AudioBuffer
from src.services.audio.io import load_wav, write_wav


def _sine(sr, seconds=1.0, freq=440.0, amplitude=0.3):
    t = np.arange(int(sr * seconds)) / sr
    return amplitude * np.sin(2 * np.pi * freq * t)


def test_stereo_44k_is_downmixed_resampled_and_normalized(tmp_path):
    x = _sine(44100)
    path = tmp_path / "stereo.wav"
    sf.write(str(path), np.stack([x, x], axis=1), 44100, subtype="PCM_16")

    audio = load_wav(path)

    assert audio.sample_rate == 22050
    assert len(audio) == 22050
    assert audio.peak == pytest.approx(1.0)


def test_thirty_second_take_length(tmp_path):
    path = tmp_path / "take.wav"
    sf.write(str(path), _sine(22050, seconds=30.0), 22050, subtype="FLOAT")
    assert len(load_wav(path)) == 661500


def test_silent_file_rejected(tmp_path):
    path = tmp_path / "silent.wav"
    sf.write(str(path), np.zeros(22050), 22050, subtype="PCM_16")
    with pytest.raises(SilentInputError):
        load_wav(path)


def test_silent_file_allowed_on_request(tmp_path):
    path = tmp_path / "silent.wav"
    sf.write(str(path), np.zeros(22050), 22050, subtype="PCM_16")
    audio = load_wav(path, allow_silent=True)
    assert audio.peak == 0.0


def test_garbage_file_is_a_format_error(tmp_path):
    path = tmp_path / "noise.wav"
    path.write_bytes(b"this is not a riff header at all")
    with pytest.raises(AudioFormatError):
        load_wav(path)


def test_24_bit_pcm_is_unsupported(tmp_path):
    path = tmp_path / "pcm24.wav"
    sf.write(str(path), _sine(22050), 22050, subtype="PCM_24")
    with pytest.raises(UnsupportedAudioError):
        load_wav(path)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_wav(tmp_path / "absent.wav")


def test_write_wav_clips_and_keeps_length(tmp_path):
    audio = AudioBuffer(np.array([0.0, 0.5, 2.0, -3.0] * 100), 22050)
    path = write_wav(tmp_path / "out.wav", audio, subtype="FLOAT")
    data, sr = sf.read(str(path))
    assert sr == 22050
    assert data.size == 400
    assert data.max() == pytest.approx(1.0)
    assert data.min() == pytest.approx(-1.0)
