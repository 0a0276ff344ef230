"""Time-domain pitch shifting of note regions."""

from src.services.psola.marks import detect_pitch_marks
from src.services.psola.service import PsolaService
from src.services.psola.shifter import apply_corrections, psola_shift_note, shift_notes

__all__ = ["PsolaService", "apply_corrections", "detect_pitch_marks", "psola_shift_note", "shift_notes"]
