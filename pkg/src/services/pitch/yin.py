"""
Probabilistic YIN.

Each frame yields f0 candidates from the troughs of its cumulative mean
normalized difference function, weighted by a beta prior over 100 absolute
thresholds. A two-layer (voiced/unvoiced) hidden Markov model over 10-cent
pitch states then picks one path through the candidates.
"""

import logging
from dataclasses import dataclass
from typing import List

import librosa
import numpy as np

from src.core.exceptions import RangeError, ShapeError, SizeError
from src.models.signals import AudioBuffer, PitchTrack, PyinParams

logger = logging.getLogger(__name__)

_TINY = np.finfo(np.float64).tiny
_REFINE_CENTS = 20.0


@dataclass(frozen=True, eq=False)
class YinCandidates:
    """Pitch candidates of one frame; probabilities sum to at most 1."""
    f0: np.ndarray
    probability: np.ndarray

    def __len__(self) -> int:
        return self.f0.size

    @property
    def voiced_probability(self) -> float:
        return float(min(self.probability.sum(), 1.0))

    def top(self):
        """(f0, probability) of the most likely candidate, or None."""
        if not len(self):
            return None
        i = int(np.argmax(self.probability))
        return float(self.f0[i]), float(self.probability[i])


_EMPTY = YinCandidates(f0=np.zeros(0), probability=np.zeros(0))


def _cmndf(frames: np.ndarray, params: PyinParams) -> np.ndarray:
    """
    Cumulative mean normalized difference for lags ``min_period..max_period``.

    ``frames`` is ``(frame, n_frames)``; the result is ``(n_lags, n_frames)``.
    """
    frame_length, win = params.frame, params.win_length
    min_p, max_p = params.min_period, params.max_period

    a = np.fft.rfft(frames, frame_length, axis=0)
    b = np.fft.rfft(frames[win:0:-1, :], frame_length, axis=0)
    acf = np.fft.irfft(a * b, frame_length, axis=0)[win:, :]
    acf[np.abs(acf) < 1e-6] = 0

    energy = np.cumsum(frames ** 2, axis=0)
    energy = energy[win:, :] - energy[:-win, :]
    energy[np.abs(energy) < 1e-6] = 0

    diff = energy[:1, :] + energy - 2 * acf
    tau = np.arange(1, max_p + 1)[:, np.newaxis]
    cumulative_mean = np.cumsum(diff[1 : max_p + 1, :], axis=0) / tau
    return diff[min_p : max_p + 1, :] / (cumulative_mean[min_p - 1 : max_p, :] + _TINY)


def _parabolic_shifts(d: np.ndarray) -> np.ndarray:
    """Sub-lag offsets of each parabola vertex, zero where the fit is poor."""
    shifts = np.zeros_like(d)
    a = (d[:-2] + d[2:] - 2 * d[1:-1]) / 2
    b = (d[2:] - d[:-2]) / 2
    shifts[1:-1] = -b / (2 * a + _TINY)
    shifts[np.abs(shifts) > 1] = 0
    return shifts


def _candidates(
    d: np.ndarray,
    shifts: np.ndarray,
    params: PyinParams,
    thresholds: np.ndarray,
    prior: np.ndarray,
) -> YinCandidates:
    if d.size < 2:
        return _EMPTY
    is_trough = np.zeros(d.size, dtype=bool)
    is_trough[1:-1] = (d[1:-1] < d[:-2]) & (d[1:-1] <= d[2:])
    is_trough[0] = d[0] < d[1]
    troughs = np.flatnonzero(is_trough)
    if troughs.size == 0:
        return _EMPTY

    heights = d[troughs]
    below = np.less.outer(heights, thresholds)
    has_trough = below.any(axis=0)

    # each threshold votes for the shortest period whose dip falls below it
    probs = np.zeros(troughs.size)
    first = np.argmax(below, axis=0)
    np.add.at(probs, first[has_trough], prior[has_trough])
    probs[np.argmin(heights)] += params.no_trough_prob * prior[~has_trough].sum()

    keep = probs > 0
    periods = params.min_period + troughs[keep] + shifts[troughs[keep]]
    return YinCandidates(f0=params.sample_rate / periods, probability=probs[keep])


def yin_frame(frame: np.ndarray, params: PyinParams = PyinParams()) -> YinCandidates:
    """
    Pitch candidates of a single analysis frame.

    Args:
        frame: ``params.frame`` samples
        params: Tracker configuration

    Returns:
        Candidate frequencies and probabilities; empty for a silent frame
    """
    frame = np.asarray(frame, dtype=np.float64)
    if frame.shape != (params.frame,):
        raise ShapeError(f"expected a frame of {params.frame} samples, got shape {frame.shape}")
    d = _cmndf(frame[:, np.newaxis], params)[:, 0]
    thresholds, prior = params.threshold_prior()
    return _candidates(d, _parabolic_shifts(d), params, thresholds, prior)


def _pitch_grid(params: PyinParams) -> np.ndarray:
    states_per_octave = 1200.0 / params.resolution_cents
    n_states = int(np.floor(states_per_octave * np.log2(params.f_max_track / params.f_min_track))) + 1
    return params.f_min_track * 2.0 ** (np.arange(n_states) / states_per_octave)


def _transition(params: PyinParams, n_states: int) -> np.ndarray:
    states_per_semitone = int(round(100.0 / params.resolution_cents))
    max_semitones = round(params.max_transition_rate * 12 * params.hop / params.sample_rate)
    width = max_semitones * states_per_semitone + 1
    local = librosa.sequence.transition_local(n_states, width, window="triangle", wrap=False)
    return np.kron(librosa.sequence.transition_loop(2, 1 - params.switch_prob), local)


def _frame_rms(audio: AudioBuffer, params: PyinParams, n_frames: int) -> np.ndarray:
    rms = librosa.feature.rms(
        y=audio.samples, frame_length=params.hop, hop_length=params.hop, center=True, pad_mode="constant"
    )[0]
    if rms.size < n_frames:
        rms = np.pad(rms, (0, n_frames - rms.size))
    return rms[:n_frames]


def pyin_track(audio: AudioBuffer, params: PyinParams = PyinParams()) -> PitchTrack:
    """
    Viterbi-decoded f0 track with centred frames.

    Frame ``t`` is centred on sample ``t * hop``; a frame is voiced when the
    decoded state is voiced, its voicing probability reaches
    ``voicing_threshold`` and its short-time RMS is at least
    ``low_amp_ratio`` of the loudest frame's.

    Args:
        audio: Mono input at ``params.sample_rate``
        params: Tracker configuration

    Returns:
        ``PitchTrack`` with f0 = 0 on unvoiced frames
    """
    if audio.sample_rate != params.sample_rate:
        raise RangeError(f"audio is at {audio.sample_rate} Hz, tracker expects {params.sample_rate} Hz")
    if len(audio) < params.frame:
        raise SizeError(f"audio has {len(audio)} samples, shorter than one frame ({params.frame})")

    padded = np.pad(audio.samples, params.frame // 2)
    frames = librosa.util.frame(padded, frame_length=params.frame, hop_length=params.hop)
    d = _cmndf(np.ascontiguousarray(frames), params)
    shifts = _parabolic_shifts(d)
    thresholds, prior = params.threshold_prior()

    grid = _pitch_grid(params)
    n_states, n_frames = grid.size, d.shape[1]
    states_per_octave = 1200.0 / params.resolution_cents

    observation = np.zeros((2 * n_states, n_frames))
    voicing = np.zeros(n_frames)
    candidates: List[YinCandidates] = []
    for t in range(n_frames):
        cand = _candidates(d[:, t], shifts[:, t], params, thresholds, prior)
        candidates.append(cand)
        if len(cand):
            bins = np.clip(np.round(states_per_octave * np.log2(cand.f0 / params.f_min_track)), 0, n_states - 1)
            np.add.at(observation[:, t], bins.astype(int), cand.probability)
        voicing[t] = cand.voiced_probability
        observation[n_states:, t] = (1.0 - voicing[t]) / n_states

    p_init = np.zeros(2 * n_states)
    p_init[n_states:] = 1.0 / n_states
    states = librosa.sequence.viterbi(observation, _transition(params, n_states), p_init=p_init)

    rms = _frame_rms(audio, params, n_frames)
    loud = rms >= params.low_amp_ratio * rms.max() if rms.max() > 0 else np.zeros(n_frames, dtype=bool)
    voiced = (states < n_states) & (voicing >= params.voicing_threshold) & loud

    f0 = np.zeros(n_frames)
    for t in np.flatnonzero(voiced):
        f0[t] = grid[states[t]]
        cand = candidates[t]
        if len(cand):
            dist = np.abs(1200.0 * np.log2(cand.f0 / f0[t]))
            nearest = int(np.argmin(dist))
            if dist[nearest] <= _REFINE_CENTS:
                f0[t] = cand.f0[nearest]

    logger.debug(f"pYIN: {voiced.sum()}/{n_frames} voiced frames")
    return PitchTrack(f0=f0, voicing=np.where(loud, voicing, 0.0), hop=params.hop, sample_rate=params.sample_rate)
