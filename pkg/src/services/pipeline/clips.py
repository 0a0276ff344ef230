"""
Listening-clip extraction.

Windows of fixed length are drawn from a 1 s start grid among those whose
voiced-frame fraction reaches the threshold. When too few qualify the
threshold is lowered step by step. Every clip fades in and out linearly.
"""

import logging
import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.exceptions import RangeError, ShapeError, SizeError
from src.models import enums
from src.models.schemas import ClipInfo, ClipReport
from src.models.signals import AudioBuffer, PitchTrack
from src.services.audio.io import load_wav, write_wav
from src.services.pitch.service import PitchService
from src.utils.helpers import write_json

logger = logging.getLogger(__name__)

GRID_SECONDS = 1.0


def window_voicing(track: PitchTrack, starts_s: Sequence[float], length_s: float) -> np.ndarray:
    """Fraction of voiced frames whose centre falls in each window."""
    times = track.times
    voiced = track.voiced
    fractions = []
    for start in starts_s:
        mask = (times >= start) & (times < start + length_s)
        fractions.append(float(voiced[mask].mean()) if mask.any() else 0.0)
    return np.array(fractions)


def fade_in_out(samples: np.ndarray, fade: int) -> np.ndarray:
    out = samples.copy()
    ramp = np.linspace(0.0, 1.0, fade, endpoint=True)
    out[:fade] *= ramp
    out[-fade:] *= ramp[::-1]
    return out


def sample_clips(
    audio: AudioBuffer,
    track: PitchTrack,
    n: int = enums.CLIP_COUNT,
    length_s: float = enums.CLIP_SECONDS,
    threshold: float = enums.CLIP_VOICING,
    step: float = enums.CLIP_THRESHOLD_STEP,
    rng: Optional[np.random.Generator] = None,
    extra: Sequence[AudioBuffer] = (),
    fade_s: float = enums.CLIP_FADE_SECONDS,
) -> Tuple[ClipReport, List[List[AudioBuffer]]]:
    """
    Pick up to ``n`` distinct windows that are mostly sung.

    Args:
        audio: Performance to cut
        track: Its pitch track
        extra: Other renderings of the same performance, cut at the same windows

    Returns:
        The report and, per clip, the faded excerpt of ``audio`` followed by
        those of ``extra``

    Raises:
        SizeError: ``audio`` is shorter than one clip
    """
    if audio.duration < length_s:
        raise SizeError(f"{audio.duration:.2f} s of audio is shorter than a {length_s:.0f} s clip")
    if not 0 < step <= threshold <= 1:
        raise RangeError(f"need 0 < step <= threshold <= 1, got step {step}, threshold {threshold}")
    for other in extra:
        if len(other) != len(audio) or other.sample_rate != audio.sample_rate:
            raise ShapeError("extra renderings must match the performance length and rate")
    rng = rng or np.random.default_rng()

    sr = audio.sample_rate
    clip_len = int(round(length_s * sr))
    fade = int(round(fade_s * sr))
    starts = np.arange(0, math.floor(audio.duration - length_s + 1e-9) + 1) * GRID_SECONDS
    starts = starts[(np.round(starts * sr).astype(int) + clip_len) <= len(audio)]
    voicing = window_voicing(track, starts, length_s)

    tried = []
    k = 0
    while True:
        current = max(0.0, round(threshold - k * step, 10))
        tried.append(current)
        qualifying = np.flatnonzero(voicing >= current)
        if qualifying.size >= n or current == 0.0:
            break
        k += 1
    if len(tried) > 1:
        logger.warning(f"Lowered voicing threshold from {threshold:.2f} to {current:.2f} to find {n} clips")

    picked = np.sort(rng.choice(qualifying, size=min(n, qualifying.size), replace=False))
    infos, clips = [], []
    for index, w in enumerate(picked):
        begin = int(round(starts[w] * sr))
        versions = [audio, *extra]
        clips.append([buf.replace(fade_in_out(buf.samples[begin : begin + clip_len], fade)) for buf in versions])
        infos.append(
            ClipInfo(index=index, start_s=float(starts[w]), length_s=clip_len / sr, voiced_fraction=float(voicing[w]))
        )
    return ClipReport(final_threshold=current, thresholds_tried=tried, clips=infos), clips


def write_clips(
    report: ClipReport,
    clips: List[List[AudioBuffer]],
    out_dir: Union[str, Path],
    labels: Sequence[str] = ("original",),
) -> ClipReport:
    """Write ``clip<i>_<label>.wav`` files and ``clips.json``."""
    out_dir = Path(out_dir)
    for info, versions in zip(report.clips, clips):
        if len(labels) != len(versions):
            raise ShapeError(f"{len(versions)} versions per clip but {len(labels)} labels")
        info.paths = [
            str(write_wav(out_dir / f"clip{info.index}_{label}.wav", buf)) for label, buf in zip(labels, versions)
        ]
    write_json(out_dir / "clips.json", report.model_dump(mode="json"))
    logger.info(f"Wrote {len(report.clips)} clips to {out_dir}")
    return report


def cmd_clips(
    performance: Union[str, Path],
    out_dir: Union[str, Path],
    track: Optional[PitchTrack] = None,
    n: int = enums.CLIP_COUNT,
    length_s: float = enums.CLIP_SECONDS,
    also: Sequence[Union[str, Path]] = (),
    seed: Optional[int] = None,
) -> ClipReport:
    """Cut clips from a WAV (and from each aligned ``also`` WAV) into ``out_dir``."""
    audio = load_wav(performance)
    extra = [load_wav(path) for path in also]
    track = track if track is not None else PitchService().track(audio)
    report, clips = sample_clips(audio, track, n=n, length_s=length_s, rng=np.random.default_rng(seed), extra=extra)
    labels = ["original", *(Path(path).stem for path in also)]
    return write_clips(report, clips, out_dir, labels)
