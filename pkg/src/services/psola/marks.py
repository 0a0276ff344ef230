"""Pitch-synchronous epoch detection."""

import logging
from typing import List, Optional

import numpy as np

from src.models.signals import AudioBuffer, PitchMarks, PitchTrack

logger = logging.getLogger(__name__)

F_MIN_TRACK = 80.0
F_MAX_TRACK = 1000.0
EXTEND_RMS_RATIO = 0.1


def _voiced_regions(track: PitchTrack) -> List[tuple]:
    edges = np.diff(np.concatenate(([0], track.voiced.astype(np.int8), [0])))
    return list(zip(np.flatnonzero(edges == 1).tolist(), np.flatnonzero(edges == -1).tolist()))


def _period_at(track: PitchTrack, sample: int, frames: np.ndarray) -> float:
    """Period in samples from the f0 of the voiced frame nearest to ``sample``."""
    t = frames[np.argmin(np.abs(frames * track.hop - sample))]
    return track.sample_rate / track.f0[t]


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(x ** 2))) if x.size else 0.0


class _EpochWalker:
    """Peak-picks one epoch per period inside a sample window."""

    def __init__(self, samples: np.ndarray, sample_rate: int, f_min: float, f_max: float):
        self.x = samples
        self.min_step = max(int(np.floor(sample_rate / f_max)), 1)
        self.max_step = int(np.ceil(sample_rate / f_min))

    def _window(self, period: float):
        lo = max(int(round(0.75 * period)), self.min_step)
        hi = min(int(round(1.25 * period)), self.max_step)
        return lo, max(hi, lo)

    def next(self, epoch: int, period: float, limit: int) -> Optional[int]:
        lo, hi = self._window(period)
        a, b = epoch + lo, min(epoch + hi, limit - 1)
        if a > b:
            return None
        return a + int(np.argmax(self.x[a : b + 1]))

    def previous(self, epoch: int, period: float, floor: int) -> Optional[int]:
        lo, hi = self._window(period)
        a, b = max(epoch - hi, floor), epoch - lo
        if a > b:
            return None
        return a + int(np.argmax(self.x[a : b + 1]))


def detect_pitch_marks(
    audio: AudioBuffer,
    track: PitchTrack,
    f_min: float = F_MIN_TRACK,
    f_max: float = F_MAX_TRACK,
) -> PitchMarks:
    """
    One epoch per period across the voiced regions of ``track``.

    Epochs sit on the largest positive sample of each cycle; the period
    guiding the search comes from the nearest voiced frame's f0. A region is
    extended outward while the adjacent cycle keeps at least a tenth of the
    region's RMS, so onsets and tails lost to frame alignment keep their marks.

    Args:
        audio: Signal the track was computed from
        track: Aligned pitch track
        f_min: Lowest admissible f0 (bounds the search window)
        f_max: Highest admissible f0

    Returns:
        Strictly increasing epochs; empty when nothing is voiced
    """
    if track.sample_rate != audio.sample_rate:
        raise ValueError("pitch track and audio sample rates differ")

    x = audio.samples
    n = x.size
    walker = _EpochWalker(x, audio.sample_rate, f_min, f_max)
    regions = _voiced_regions(track)
    epochs: List[int] = []

    for k, (f_start, f_end) in enumerate(regions):
        frames = np.arange(f_start, f_end)
        start = max(f_start * track.hop - track.hop // 2, 0)
        end = min((f_end - 1) * track.hop + track.hop // 2 + 1, n)
        next_start = regions[k + 1][0] * track.hop - track.hop // 2 if k + 1 < len(regions) else n
        floor = epochs[-1] + walker.min_step if epochs else 0
        start = max(start, floor)
        if end - start < 2:
            continue

        region_rms = _rms(x[start:end])
        if region_rms == 0:
            continue

        period = _period_at(track, start, frames)
        first = start + int(np.argmax(x[start : min(start + int(round(period)), end)]))
        region = [first]

        # forward through the region, then past it while cycles stay loud
        while True:
            e = region[-1]
            p = _period_at(track, e, frames)
            inside = e + p < end
            limit = end if inside else min(next_start, n)
            if not inside and _rms(x[e : min(e + int(round(p)), n)]) <= EXTEND_RMS_RATIO * region_rms:
                break
            nxt = walker.next(e, p, limit)
            if nxt is None:
                break
            region.append(nxt)

        # backward from the first epoch
        while True:
            e = region[0]
            p = _period_at(track, e, frames)
            if _rms(x[max(e - int(round(p)), 0) : e]) <= EXTEND_RMS_RATIO * region_rms:
                break
            prev = walker.previous(e, p, floor)
            if prev is None:
                break
            region.insert(0, prev)

        epochs.extend(region)

    marks = PitchMarks(epochs=np.unique(np.asarray(epochs, dtype=np.int64)))
    logger.debug(f"Detected {len(marks)} pitch marks in {len(regions)} voiced regions")
    return marks
