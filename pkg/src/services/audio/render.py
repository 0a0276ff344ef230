"""PNG rendering of spectrograms and disagreement matrices, one pixel per cell."""

import logging
from pathlib import Path
from typing import Optional, Tuple, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from src.core.exceptions import RangeError, ShapeError  # noqa: E402
from src.models.signals import BinaryMatrix, CqtSpectrogram  # noqa: E402

logger = logging.getLogger(__name__)

BinRange = Optional[Tuple[int, int]]


def _crop(matrix: np.ndarray, bin_range: BinRange) -> np.ndarray:
    if bin_range is None:
        return matrix
    lo, hi = bin_range
    if not 0 <= lo < hi <= matrix.shape[0]:
        raise RangeError(f"bin range {bin_range} outside [0, {matrix.shape[0]}]")
    return matrix[lo:hi]


def _save(matrix: np.ndarray, path: Union[str, Path], cmap: str) -> Path:
    if matrix.size == 0:
        raise ShapeError("cannot render an empty matrix")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    peak = float(matrix.max())
    # low bins at the bottom of the image
    plt.imsave(path, matrix, cmap=cmap, vmin=0.0, vmax=peak if peak > 0 else 1.0, origin="lower", format="png")
    logger.debug(f"Rendered {matrix.shape[0]}x{matrix.shape[1]} image to {path}")
    return path


def render_spectrogram_png(
    spec: CqtSpectrogram,
    path: Union[str, Path],
    bin_range: BinRange = None,
    cmap: str = "magma",
) -> Path:
    """
    Write a spectrogram as a PNG with one pixel per (bin, frame).

    Args:
        spec: Magnitude spectrogram
        path: Output file
        bin_range: Optional half-open ``(low, high)`` row crop, e.g. ``(300, 700)``
        cmap: Matplotlib colormap name

    Returns:
        The written path
    """
    return _save(_crop(spec.mag, bin_range), path, cmap)


def render_disagreement_png(bits: BinaryMatrix, path: Union[str, Path], bin_range: BinRange = None) -> Path:
    """Write a binary matrix as a black/white PNG."""
    return _save(_crop(bits.bits.astype(np.float32), bin_range), path, "gray")
