"""WAV reading and writing at the working sample rate."""

import logging
from math import gcd
from pathlib import Path
from typing import Union

import numpy as np
import soundfile as sf
from scipy.signal import resample_poly

from src.core.exceptions import AudioFormatError, SilentInputError, UnsupportedAudioError
from src.models import enums
from src.models.signals import AudioBuffer

logger = logging.getLogger(__name__)

SUPPORTED_SUBTYPES = {"PCM_16", "FLOAT"}
SILENCE_FLOOR = 1e-12


def normalize(audio: AudioBuffer) -> AudioBuffer:
    """Scale to unit peak magnitude."""
    peak = audio.peak
    if peak < SILENCE_FLOOR:
        raise SilentInputError("silent input")
    return audio.replace(audio.samples / peak)


def resample(samples: np.ndarray, orig_sr: int, target_sr: int) -> np.ndarray:
    """Polyphase resampling by the reduced integer ratio of the two rates."""
    if orig_sr == target_sr:
        return samples
    g = gcd(orig_sr, target_sr)
    return resample_poly(samples, target_sr // g, orig_sr // g)


def load_wav(
    path: Union[str, Path],
    sample_rate: int = enums.SAMPLE_RATE,
    allow_silent: bool = False,
) -> AudioBuffer:
    """
    Read a PCM16 or float32 WAV file as a normalized mono buffer.

    Stereo is downmixed by averaging and the result is resampled to
    ``sample_rate``.

    Args:
        path: WAV file
        sample_rate: Working rate of the returned buffer
        allow_silent: Return an all-zero buffer instead of raising

    Returns:
        Peak-normalized mono ``AudioBuffer``
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"{path} does not exist")

    try:
        info = sf.info(str(path))
    except RuntimeError as e:
        raise AudioFormatError(f"{path}: not a readable audio file ({e})") from e

    if info.format not in ("WAV", "WAVEX"):
        raise AudioFormatError(f"{path}: expected RIFF/WAVE, found {info.format}")
    if info.subtype not in SUPPORTED_SUBTYPES:
        raise UnsupportedAudioError(f"{path}: unsupported encoding {info.subtype}")
    if info.channels not in (1, 2):
        raise UnsupportedAudioError(f"{path}: {info.channels} channels, expected 1 or 2")

    try:
        data, file_sr = sf.read(str(path), dtype="float64", always_2d=True)
    except RuntimeError as e:
        raise AudioFormatError(f"{path}: failed to decode ({e})") from e
    if data.shape[0] == 0:
        raise AudioFormatError(f"{path}: no samples")

    mono = resample(data.mean(axis=1), file_sr, sample_rate)
    audio = AudioBuffer(samples=mono, sample_rate=sample_rate)
    logger.debug(f"Loaded {path.name}: {info.channels} ch @ {file_sr} Hz -> {len(audio)} samples")

    if allow_silent and audio.peak < SILENCE_FLOOR:
        return audio.replace(np.zeros_like(audio.samples))
    return normalize(audio)


def write_wav(path: Union[str, Path], audio: AudioBuffer, subtype: str = "PCM_16") -> Path:
    """Write a mono WAV, clipping to [-1, 1]."""
    if subtype not in SUPPORTED_SUBTYPES:
        raise UnsupportedAudioError(f"cannot write {subtype}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.clip(audio.samples, -1.0, 1.0)
    sf.write(str(path), data.astype(np.float32 if subtype == "FLOAT" else np.float64), audio.sample_rate, subtype=subtype)
    return path
