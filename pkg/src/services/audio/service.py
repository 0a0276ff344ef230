"""Audio service: loading, constant-Q analysis and feature preparation."""

from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from src.core.config import settings
from src.models.signals import AudioBuffer, CqtParams, CqtSpectrogram
from src.services.audio.cqt import cqt, truncate_buffer
from src.services.audio.features import PerformanceFeatures, prepare_features
from src.services.audio.io import load_wav
from src.services.base import BaseService


class AudioService(BaseService):
    """Front end shared by training, correction and the API."""

    def __init__(self, params: Optional[CqtParams] = None, sample_rate: Optional[int] = None):
        super().__init__("audio")
        self.params = params or CqtParams.from_settings(settings)
        self.sample_rate = sample_rate or settings.SAMPLE_RATE

    def load(self, path: Union[str, Path], allow_silent: bool = False) -> AudioBuffer:
        audio = load_wav(path, sample_rate=self.sample_rate, allow_silent=allow_silent)
        self.logger.info(f"Loaded {Path(path).name}: {audio.duration:.2f} s")
        return audio

    def spectrogram(self, audio: AudioBuffer, truncate: bool = True) -> CqtSpectrogram:
        """Full 1056-bin transform, optionally trimmed to the 1024 network bins."""
        spec = cqt(audio, self.params)
        return truncate_buffer(spec) if truncate else spec

    def features(self, vocal: AudioBuffer, backing: AudioBuffer) -> Tuple[PerformanceFeatures, CqtSpectrogram]:
        """
        Network channels for a vocal/backing pair.

        The shorter signal is zero-padded so both transforms share a frame count.

        Returns:
            The features and the truncated vocal spectrogram
        """
        vocal, backing = match_lengths(vocal, backing)
        vocal_spec = self.spectrogram(vocal)
        backing_spec = self.spectrogram(backing)
        return prepare_features(vocal_spec, backing_spec), vocal_spec


def match_lengths(a: AudioBuffer, b: AudioBuffer) -> Tuple[AudioBuffer, AudioBuffer]:
    """Zero-pad the shorter of two buffers to the longer one's length."""
    n = max(len(a), len(b))

    def pad(x: AudioBuffer) -> AudioBuffer:
        if len(x) == n:
            return x
        return x.replace(np.pad(x.samples, (0, n - len(x))))

    return pad(a), pad(b)
