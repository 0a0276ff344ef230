"""
Score-free correction of a vocal track.

Three ways of choosing per-note shifts share the same pYIN note list and the
same PSOLA back end: the trained network (``correct_with_model``), snapping to
the nearest equal-tempered degree (``correct_baseline``) and random detuning
for out-of-tune control versions (``detune_audio``).
"""

import math
import shutil
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.models import enums
from src.models.enums import CorrectionMethod
from src.models.schemas import CorrectionReport, NoteCorrection, NoteSegment
from src.models.signals import AudioBuffer, PitchTrack
from src.services.audio.io import write_wav
from src.services.audio.service import AudioService
from src.services.base import BaseService
from src.services.network.checkpoint import load_checkpoint
from src.services.network.model import AutotunerNet, gru_hidden_init
from src.services.pitch.service import PitchService
from src.services.pitch.units import cents_between, hz_to_midi, midi_to_hz
from src.services.psola.service import PsolaService
from src.utils.helpers import frames_to_seconds, write_json

PathLike = Union[str, Path]

NOTHING_TO_CORRECT = "no voiced notes found, input copied through"


def baseline_shift_cents(f0: float) -> float:
    """
    Cents from ``f0`` to the nearest MIDI degree in 0..127.

    A note exactly halfway between two degrees goes to the lower one.
    """
    m = float(hz_to_midi(f0))
    p = math.ceil(round(m, 9) - 0.5)
    p = min(max(p, 0), 127)
    return float(cents_between(f0, midi_to_hz(p)))


def report_path_for(output_path: PathLike) -> Path:
    return Path(output_path).with_suffix(".json")


class CorrectionService(BaseService):
    """Runs analysis, shift selection and PSOLA for one performance."""

    def __init__(
        self,
        audio: Optional[AudioService] = None,
        pitch: Optional[PitchService] = None,
        psola: Optional[PsolaService] = None,
    ):
        super().__init__("correction")
        self.audio = audio or AudioService()
        self.pitch = pitch or PitchService()
        self.psola = psola or PsolaService()

    def analyze(self, vocal: AudioBuffer) -> Tuple[Optional[PitchTrack], List[NoteSegment]]:
        """pYIN track and notes; ``(None, [])`` for a silent vocal."""
        if vocal.peak == 0:
            return None, []
        return self.pitch.analyze(vocal, split_legato=True)

    def model_shifts(
        self,
        net: AutotunerNet,
        vocal: AudioBuffer,
        backing: AudioBuffer,
        notes: Sequence[NoteSegment],
        seed: int = 0,
    ) -> Tuple[List[float], List[bool]]:
        """
        Predicted corrective shifts in semitones, clamped to one semitone.

        The hidden state starts from ``gru_hidden_init`` and is carried from
        note to note. Notes shorter than the network's receptive field get 0
        and are flagged as degenerate.
        """
        features, _ = self.audio.features(vocal, backing)
        h = gru_hidden_init(np.random.default_rng(seed), net.hidden, dtype=net.dtype)
        shifts, degenerate = [], []
        for note in notes:
            if note.n_frames < net.min_frames:
                shifts.append(0.0)
                degenerate.append(True)
                continue
            y, h = net.predict(features.slice(note), h)
            limit = enums.MAX_DETUNE_SEMITONES
            shifts.append(float(np.clip(y, -limit, limit)))
            degenerate.append(False)
        n_degenerate = sum(degenerate)
        if n_degenerate:
            self.logger.warning(f"{n_degenerate} note(s) shorter than {net.min_frames} frames left unshifted")
        return shifts, degenerate

    @staticmethod
    def baseline_shifts(notes: Sequence[NoteSegment]) -> List[float]:
        return [baseline_shift_cents(note.median_f0) / 100.0 for note in notes]

    @staticmethod
    def detune_shifts(notes: Sequence[NoteSegment], rng: np.random.Generator) -> List[float]:
        return [float(s) for s in rng.uniform(-enums.MAX_DETUNE_SEMITONES, enums.MAX_DETUNE_SEMITONES, len(notes))]

    def apply(
        self,
        method: CorrectionMethod,
        vocal: AudioBuffer,
        track: PitchTrack,
        notes: Sequence[NoteSegment],
        shifts: Sequence[float],
        degenerate: Optional[Sequence[bool]] = None,
    ) -> Tuple[AudioBuffer, CorrectionReport]:
        """PSOLA the shifts into ``vocal`` and describe what was done."""
        degenerate = degenerate or [False] * len(notes)
        corrected, applied = self.psola.correct(vocal, track, notes, shifts)
        report = CorrectionReport(method=method)
        for note, shift, flag, done in zip(notes, shifts, degenerate, applied):
            report.notes.append(
                NoteCorrection(
                    start_frame=note.start_frame,
                    end_frame=note.end_frame,
                    start_s=frames_to_seconds(note.start_frame, track.hop, track.sample_rate),
                    end_s=frames_to_seconds(note.end_frame, track.hop, track.sample_rate),
                    median_f0=note.median_f0,
                    shift_cents=100.0 * shift,
                    degenerate=flag,
                    applied=done,
                )
            )
        skipped = len(applied) - sum(applied)
        if skipped:
            report.warnings.append(f"{skipped} note(s) had too few pitch marks to shift")
        return corrected, report

    def _run(
        self,
        method: CorrectionMethod,
        vocal_path: PathLike,
        output_path: PathLike,
        choose,
        report_path: Optional[PathLike] = None,
    ) -> CorrectionReport:
        vocal = self.audio.load(vocal_path, allow_silent=True)
        track, notes = self.analyze(vocal)
        output_path = Path(output_path)
        if not notes:
            self.logger.warning(f"{Path(vocal_path).name}: {NOTHING_TO_CORRECT}")
            output_path.parent.mkdir(parents=True, exist_ok=True)
            shutil.copyfile(vocal_path, output_path)
            report = CorrectionReport(method=method, warnings=[NOTHING_TO_CORRECT])
        else:
            shifts, degenerate = choose(vocal, notes)
            corrected, report = self.apply(method, vocal, track, notes, shifts, degenerate)
            write_wav(output_path, corrected)
            self.logger.info(f"{method.value}: wrote {output_path} ({len(notes)} notes)")

        report.input_path = str(vocal_path)
        report.output_path = str(output_path)
        write_json(report_path or report_path_for(output_path), report.model_dump(mode="json"))
        return report

    def correct_with_model(
        self,
        vocal_path: PathLike,
        backing_path: PathLike,
        net: AutotunerNet,
        output_path: PathLike,
        report_path: Optional[PathLike] = None,
        seed: int = 0,
    ) -> CorrectionReport:
        def choose(vocal: AudioBuffer, notes: List[NoteSegment]):
            backing = self.audio.load(backing_path, allow_silent=True)
            return self.model_shifts(net, vocal, backing, notes, seed=seed)

        return self._run(CorrectionMethod.MODEL, vocal_path, output_path, choose, report_path)

    def correct_baseline(
        self, vocal_path: PathLike, output_path: PathLike, report_path: Optional[PathLike] = None
    ) -> CorrectionReport:
        def choose(vocal: AudioBuffer, notes: List[NoteSegment]):
            return self.baseline_shifts(notes), None

        return self._run(CorrectionMethod.BASELINE, vocal_path, output_path, choose, report_path)

    def detune_audio(
        self, vocal_path: PathLike, output_path: PathLike, seed: int = 0, report_path: Optional[PathLike] = None
    ) -> CorrectionReport:
        """Write a control version with every note moved by up to one semitone at random."""
        rng = np.random.default_rng(seed)

        def choose(vocal: AudioBuffer, notes: List[NoteSegment]):
            return self.detune_shifts(notes, rng), None

        return self._run(CorrectionMethod.DETUNE, vocal_path, output_path, choose, report_path)


def cmd_correct(
    vocal_path: PathLike,
    backing_path: PathLike,
    checkpoint: PathLike,
    output_path: PathLike,
    report_path: Optional[PathLike] = None,
) -> CorrectionReport:
    net, _ = load_checkpoint(checkpoint)
    return CorrectionService().correct_with_model(vocal_path, backing_path, net, output_path, report_path)


def cmd_baseline(
    vocal_path: PathLike, output_path: PathLike, report_path: Optional[PathLike] = None
) -> CorrectionReport:
    return CorrectionService().correct_baseline(vocal_path, output_path, report_path)
