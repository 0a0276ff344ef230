"""
Pytest configuration for deeptune tests.

This module contains pytest fixtures and configuration for the test suite.
"""

from pathlib import Path

import numpy as np
import pytest
import soundfile as sf
from fastapi.testclient import TestClient

from src.api.main import app
from src.models import enums
from src.models.schemas import SongSpec
from src.models.signals import AudioBuffer
from src.services.datagen.corpus import CorpusService
from src.services.datagen.synth import synth_performance
from src.services.network.layers import ConvLayerSpec
from src.services.network.model import AutotunerNet

SR = enums.SAMPLE_RATE
HOP = enums.HOP_LENGTH

# A conv stack small enough for finite differences: 8 bins in, 4 frequency rows out.
TINY_SPECS = (
    ConvLayerSpec("conv1", 3, 2, (3, 3), (1, 2), (1, 1)),
    ConvLayerSpec("conv2", 2, 2, (3, 1), (2, 1), (1, 0)),
    ConvLayerSpec("conv3", 2, 1, (1, 1)),
)
TINY_BINS = 8
TINY_HIDDEN = 4

# Downsamples the full 1024 bins to a 64-wide GRU input so steps stay cheap.
CHEAP_SPECS = (
    ConvLayerSpec("conv1", 3, 2, (3, 3), (4, 2), (1, 1)),
    ConvLayerSpec("conv2", 2, 1, (1, 1), (4, 1)),
)


def cheap_net(seed=0) -> AutotunerNet:
    return AutotunerNet.initialize(np.random.default_rng(seed), specs=CHEAP_SPECS, hidden=8)


def tone(freq: float, seconds: float = 1.0, sample_rate: int = SR, amplitude: float = 0.8) -> AudioBuffer:
    t = np.arange(int(round(seconds * sample_rate))) / sample_rate
    return AudioBuffer(amplitude * np.sin(2 * np.pi * freq * t), sample_rate)


def sawtooth(freq, seconds: float = 1.0, sample_rate: int = SR, n_harmonics: int = 20) -> AudioBuffer:
    """Band-limited sawtooth; ``freq`` may be a per-sample frequency curve."""
    n = int(round(seconds * sample_rate))
    f0 = np.broadcast_to(np.asarray(freq, dtype=np.float64), (n,))
    phase = 2 * np.pi * np.cumsum(f0) / sample_rate
    out = sum(np.sin(k * phase) / k for k in range(1, n_harmonics + 1))
    return AudioBuffer(0.5 * out / np.max(np.abs(out)), sample_rate)


def with_silence(audio: AudioBuffer, lead: float = 0.2, tail: float = 0.2) -> AudioBuffer:
    sr = audio.sample_rate
    return audio.replace(np.concatenate([np.zeros(int(lead * sr)), audio.samples, np.zeros(int(tail * sr))]))


def save_wav(path: Path, audio: AudioBuffer, subtype: str = "FLOAT") -> Path:
    sf.write(str(path), audio.samples, audio.sample_rate, subtype=subtype)
    return path


@pytest.fixture
def client():
    """Create a test client for the FastAPI application."""
    return TestClient(app)


@pytest.fixture
def toy_spec() -> SongSpec:
    """Two chords, four sustained melody notes."""
    return SongSpec(
        tempo_bpm=100.0,
        chords=[[57, 60, 64], [53, 57, 60]],
        melody=[69, 72, 65, 69],
        note_beats=[2.0, 2.0, 2.0, 2.0],
    )


@pytest.fixture
def toy_performance(toy_spec):
    """(vocal, backing, reference notes) rendered from ``toy_spec``."""
    return synth_performance(7, toy_spec)


@pytest.fixture
def sung_vowel() -> AudioBuffer:
    """A 1 s, 220 Hz sawtooth framed by silence."""
    return with_silence(sawtooth(220.0, 1.0))


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    """Two training songs, one validation and one test song."""
    out = tmp_path_factory.mktemp("corpus")
    return CorpusService().build_corpus(out, (2, 1, 1), seed=0)


@pytest.fixture
def tiny_net() -> AutotunerNet:
    return AutotunerNet.initialize(
        np.random.default_rng(0),
        specs=TINY_SPECS,
        n_bins=TINY_BINS,
        hidden=TINY_HIDDEN,
        dtype=np.float64,
        min_frames=1,
    )
