"""
Fixtures shared by the API tests.
"""

import io

import pytest
import soundfile as sf

from src.core.config import settings
from tests.conftest import sawtooth, with_silence


def wav_bytes(audio) -> bytes:
    buffer = io.BytesIO()
    sf.write(buffer, audio.samples, audio.sample_rate, format="WAV", subtype="PCM_16")
    return buffer.getvalue()


@pytest.fixture(autouse=True)
def work_dir(tmp_path, monkeypatch):
    """Keep request files under the test's temporary directory."""
    monkeypatch.setattr(settings, "WORK_DIR", tmp_path / "work")
    monkeypatch.setattr(settings, "CHECKPOINT_PATH", None)
    return tmp_path / "work"


@pytest.fixture
def vocal_upload():
    return ("vocal.wav", wav_bytes(with_silence(sawtooth(450.0, 1.0))), "audio/wav")


@pytest.fixture
def backing_upload():
    return ("backing.wav", wav_bytes(with_silence(sawtooth(110.0, 1.0))), "audio/wav")
