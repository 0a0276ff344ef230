"""
TD-PSOLA pitch shifting of note regions.

Two-period Hann grains centred on analysis epochs are overlap-added at
synthesis epochs spaced ``period / 2**(cents / 1200)`` apart, each taken from
the nearest analysis epoch, so duration is kept by repeating or dropping
grains. Only the span between a note's first and last epoch changes.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import windows

from src.core.exceptions import InsufficientMarksError, RangeError, ShapeError
from src.models import enums
from src.models.schemas import NoteSegment
from src.models.signals import AudioBuffer, PitchMarks, PitchTrack
from src.services.pitch.yin import pyin_track
from src.services.psola.marks import F_MIN_TRACK, detect_pitch_marks

logger = logging.getLogger(__name__)

MAX_SHIFT_CENTS = 200.0
CROSSFADE_MS = 10.0
_WSUM_FLOOR = 1e-6


def _epoch_runs(epochs: np.ndarray, max_gap: float) -> List[np.ndarray]:
    """Split epochs wherever consecutive marks are further apart than one longest period."""
    if epochs.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(epochs) > max_gap) + 1
    return np.split(epochs, breaks)


def _overlap_add(x: np.ndarray, epochs: np.ndarray, ratio: float) -> np.ndarray:
    """Resynthesized samples for ``x[epochs[0] : epochs[-1] + 1]``."""
    lo, hi = int(epochs[0]), int(epochs[-1])
    length = hi - lo + 1
    periods = np.diff(epochs)
    local = np.append(periods, periods[-1])

    out = np.zeros(length)
    wsum = np.zeros(length)
    t = float(lo)
    while t <= hi:
        k = int(np.argmin(np.abs(epochs - t)))
        p = int(local[k])
        win = windows.hann(2 * p, sym=False)
        offsets = np.arange(-p, p)
        src = epochs[k] + offsets
        dst = int(round(t)) + offsets
        ok = (src >= 0) & (src < x.size) & (dst >= lo) & (dst <= hi)
        out[dst[ok] - lo] += x[src[ok]] * win[ok]
        wsum[dst[ok] - lo] += win[ok]
        t += p / ratio

    segment = x[lo : hi + 1].copy()
    covered = wsum > _WSUM_FLOOR
    segment[covered] = out[covered] / wsum[covered]
    return segment


def _crossfade(original: np.ndarray, shifted: np.ndarray, fade: int) -> np.ndarray:
    fade = min(fade, original.size // 2)
    if fade < 1:
        return shifted
    w = np.ones(original.size)
    w[:fade] = np.linspace(0.0, 1.0, fade)
    w[-fade:] = np.linspace(1.0, 0.0, fade)
    return original * (1.0 - w) + shifted * w


def _splice(
    out: np.ndarray,
    source: np.ndarray,
    epochs: np.ndarray,
    cents: float,
    sample_rate: int,
    crossfade_ms: float,
    f_min: float,
) -> None:
    ratio = 2.0 ** (cents / 1200.0)
    fade = int(round(crossfade_ms * sample_rate / 1000.0))
    for run in _epoch_runs(epochs, sample_rate / f_min):
        if run.size < 2:
            continue
        lo, hi = int(run[0]), int(run[-1])
        out[lo : hi + 1] = _crossfade(source[lo : hi + 1], _overlap_add(source, run, ratio), fade)


def _check_cents(cents: float) -> None:
    if not np.isfinite(cents) or abs(cents) > MAX_SHIFT_CENTS:
        raise RangeError(f"shift of {cents} cents outside +/-{MAX_SHIFT_CENTS}")


def psola_shift_note(
    audio: AudioBuffer,
    note: NoteSegment,
    marks: PitchMarks,
    cents: float,
    hop: int = enums.HOP_LENGTH,
    crossfade_ms: float = CROSSFADE_MS,
    f_min: float = F_MIN_TRACK,
) -> AudioBuffer:
    """
    Shift one note by a constant number of cents.

    Args:
        audio: Source signal
        note: Frame span of the note
        marks: Epochs of the whole signal
        cents: Shift, at most 200 cents either way
        hop: Frame hop the note is expressed in
        crossfade_ms: Linear crossfade at each edge of the changed span
        f_min: Lowest f0; wider epoch gaps are treated as unvoiced and passed through

    Returns:
        New buffer of identical length
    """
    _check_cents(cents)
    s0, s1 = note.sample_span(hop)
    epochs = marks.within(s0, s1)
    if epochs.size < 2:
        raise InsufficientMarksError(f"note [{note.start_frame}, {note.end_frame}) has {epochs.size} pitch marks")
    out = audio.samples.copy()
    if cents != 0:
        _splice(out, audio.samples, epochs, cents, audio.sample_rate, crossfade_ms, f_min)
    return audio.replace(out)


def shift_notes(
    audio: AudioBuffer,
    notes: Sequence[NoteSegment],
    shifts: Sequence[float],
    marks: PitchMarks,
    hop: int = enums.HOP_LENGTH,
    crossfade_ms: float = CROSSFADE_MS,
) -> Tuple[AudioBuffer, List[bool]]:
    """
    Shift several notes, each computed from the unmodified input.

    Notes with fewer than two pitch marks are passed through and reported
    as not applied.

    Returns:
        The corrected buffer and one applied flag per note
    """
    if len(notes) != len(shifts):
        raise ShapeError(f"{len(notes)} notes but {len(shifts)} shifts")
    for s in shifts:
        if abs(s) > enums.MAX_DETUNE_SEMITONES + 1e-9:
            raise RangeError(f"shift of {s} semitones exceeds one semitone")

    out = audio.samples.copy()
    applied: List[bool] = []
    for note, shift in zip(notes, shifts):
        epochs = marks.within(*note.sample_span(hop))
        if epochs.size < 2:
            logger.warning(
                f"Note [{note.start_frame}, {note.end_frame}) has {epochs.size} pitch marks, left unshifted"
            )
            applied.append(False)
            continue
        if shift:
            _splice(out, audio.samples, epochs, 100.0 * shift, audio.sample_rate, crossfade_ms, F_MIN_TRACK)
        applied.append(True)
    return audio.replace(out), applied


def apply_corrections(
    audio: AudioBuffer,
    notes: Sequence[NoteSegment],
    shifts: Sequence[float],
    marks: Optional[PitchMarks] = None,
    track: Optional[PitchTrack] = None,
) -> AudioBuffer:
    """
    Apply per-note shifts in semitones.

    Pitch marks are detected from ``track`` (tracked here when absent) unless
    given explicitly.
    """
    if len(notes) != len(shifts):
        raise ShapeError(f"{len(notes)} notes but {len(shifts)} shifts")
    if marks is None:
        track = track if track is not None else pyin_track(audio)
        marks = detect_pitch_marks(audio, track)
    hop = track.hop if track is not None else enums.HOP_LENGTH
    corrected, _ = shift_notes(audio, notes, shifts, marks, hop=hop)
    return corrected
