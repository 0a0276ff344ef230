"""
Constant-Q analysis in the 16-bins-per-semitone geometry and bin-axis shifting.

Bin ``b`` of the untruncated transform sits at ``f_min * 2**(b / 192)``; a
shift of one bin is 6.25 cents, so pitch shifts become translations along
the bin axis.
"""

import logging
import math
from dataclasses import asdict
from pathlib import Path
from typing import Union

import librosa
import numpy as np

from src.core.exceptions import RangeError, ShapeError, SizeError
from src.models import enums
from src.models.signals import AudioBuffer, CqtParams, CqtSpectrogram
from src.utils.helpers import read_float32_matrix, write_float32_matrix

logger = logging.getLogger(__name__)

_INTEGER_TOLERANCE = 1e-9


def cqt(audio: AudioBuffer, params: CqtParams = CqtParams()) -> CqtSpectrogram:
    """
    Linear-magnitude constant-Q transform.

    Uses per-octave recursive decimation with per-bin Q windows
    (``filter_scale=1``); frames are centred, so frame ``t`` sits on sample
    ``t * hop`` and there are ``1 + len // hop`` of them.

    Args:
        audio: Mono input
        params: Transform geometry

    Returns:
        ``total_bins x frames`` magnitude spectrogram
    """
    if len(audio) < params.hop:
        raise SizeError(f"audio has {len(audio)} samples, shorter than one hop ({params.hop})")

    transform = librosa.cqt(
        y=audio.samples.astype(np.float32),
        sr=audio.sample_rate,
        hop_length=params.hop,
        fmin=params.f_min,
        n_bins=params.total_bins,
        bins_per_octave=params.bins_per_octave,
        filter_scale=1.0,
    )
    mag = np.abs(transform).astype(np.float32)
    mag[mag < enums.MAGNITUDE_FLOOR] = 0.0
    return CqtSpectrogram(mag=mag, params=params)


def _translate(mag: np.ndarray, k: int) -> np.ndarray:
    """Integer translation along axis 0 with zero fill."""
    out = np.zeros_like(mag)
    n = mag.shape[0]
    if abs(k) >= n:
        return out
    if k >= 0:
        out[k:] = mag[: n - k]
    else:
        out[: n + k] = mag[-k:]
    return out


def shift_columns(mag: np.ndarray, cents: float, cents_per_bin: float = enums.CENTS_PER_BIN) -> np.ndarray:
    """
    Translate a magnitude block along its bin axis by ``cents``.

    Fractional bin shifts interpolate linearly between the two neighbouring
    integer translations; vacated bins are zero.
    """
    shift = cents / cents_per_bin
    k = math.floor(shift)
    frac = shift - k
    if frac < _INTEGER_TOLERANCE:
        frac = 0.0
    elif 1.0 - frac < _INTEGER_TOLERANCE:
        k, frac = k + 1, 0.0

    out = _translate(mag, k)
    if frac:
        out = (1.0 - frac) * out + frac * _translate(mag, k + 1)
    return out.astype(mag.dtype, copy=False)


def shift_cqt_bins(spec: CqtSpectrogram, cents: float) -> CqtSpectrogram:
    """
    Detune an untruncated spectrogram by up to one semitone either way.

    The 16-bin buffer at each edge absorbs the translation, so a later
    ``truncate_buffer`` never sees zero-filled rows.
    """
    if spec.n_bins != spec.params.total_bins:
        raise ShapeError(f"expected {spec.params.total_bins} bins, got {spec.n_bins}")
    limit = spec.params.buffer_bins * spec.params.cents_per_bin
    if abs(cents) > limit:
        raise RangeError(f"shift of {cents} cents exceeds the {limit}-cent buffer")
    if cents == 0:
        return CqtSpectrogram(mag=spec.mag.copy(), params=spec.params)
    return CqtSpectrogram(mag=shift_columns(spec.mag, cents, spec.params.cents_per_bin), params=spec.params)


def truncate_buffer(spec: CqtSpectrogram) -> CqtSpectrogram:
    """Drop the top and bottom buffer bins (1056 -> 1024 rows)."""
    params = spec.params
    if spec.n_bins != params.total_bins:
        raise ShapeError(f"expected {params.total_bins} bins, got {spec.n_bins}")
    rows = slice(params.buffer_bins, params.total_bins - params.buffer_bins)
    return CqtSpectrogram(mag=spec.mag[rows].copy(), params=params)


def export_cqt(spec: CqtSpectrogram, path: Union[str, Path]) -> Path:
    """Write magnitudes as little-endian float32 with a JSON sidecar (shape, params)."""
    return write_float32_matrix(path, spec.mag, {"params": asdict(spec.params)})


def import_cqt(path: Union[str, Path]) -> CqtSpectrogram:
    mag, meta = read_float32_matrix(path)
    return CqtSpectrogram(mag=mag, params=CqtParams(**meta["params"]))
