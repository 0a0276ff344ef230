"""Equal-tempered pitch, frequency and cent conversions."""

from typing import Union

import librosa
import numpy as np

from src.core.exceptions import DomainError

Number = Union[float, np.ndarray]


def _scalar_or_array(x: np.ndarray) -> Number:
    return float(x) if np.ndim(x) == 0 else x


def midi_to_hz(p: Number) -> Number:
    """440 * 2 ** ((p - 69) / 12)."""
    p = np.asarray(p, dtype=np.float64)
    if not np.all(np.isfinite(p)):
        raise DomainError("MIDI pitch must be finite")
    return _scalar_or_array(librosa.midi_to_hz(p))


def hz_to_midi(f: Number) -> Number:
    """69 + 12 * log2(f / 440); ``f`` must be positive."""
    f = np.asarray(f, dtype=np.float64)
    if np.any(~np.isfinite(f)) or np.any(f <= 0):
        raise DomainError(f"frequency must be positive, got {f}")
    return _scalar_or_array(69.0 + 12.0 * np.log2(f / 440.0))


def cents_between(f1: Number, f2: Number) -> Number:
    """Interval from ``f1`` up to ``f2`` in cents."""
    f1 = np.asarray(f1, dtype=np.float64)
    f2 = np.asarray(f2, dtype=np.float64)
    if np.any(f1 <= 0) or np.any(f2 <= 0) or not (np.all(np.isfinite(f1)) and np.all(np.isfinite(f2))):
        raise DomainError("frequencies must be positive")
    return _scalar_or_array(1200.0 * np.log2(f2 / f1))
