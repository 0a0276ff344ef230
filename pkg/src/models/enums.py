"""
Enums and constants for deeptune.

This module contains all enumerations and constants used throughout the application.
"""

from enum import Enum, IntEnum


class Split(str, Enum):
    """Corpus split names."""
    TRAIN = "train"
    VALIDATION = "validation"
    TEST = "test"


class ExitCode(IntEnum):
    """Process exit codes reported by the CLI."""
    SUCCESS = 0
    USAGE = 1
    IO = 2
    NUMERIC = 3


class CorrectionMethod(str, Enum):
    """How per-note shifts were chosen."""
    MODEL = "model"
    BASELINE = "baseline"
    DETUNE = "detune"


# Audio
SAMPLE_RATE = 22050
HOP_LENGTH = 256  # 11.61 ms
FRAME_LENGTH = 2048  # 92.9 ms

# Constant-Q geometry
CQT_FMIN = 125.0
BINS_PER_SEMITONE = 16
CQT_OCTAVES = 5.5
CENTS_PER_BIN = 100.0 / BINS_PER_SEMITONE  # 6.25
TOTAL_BINS = round(CQT_OCTAVES * 12 * BINS_PER_SEMITONE)  # 1056
BUFFER_BINS = 16
TRUNCATED_BINS = TOTAL_BINS - 2 * BUFFER_BINS  # 1024
MAGNITUDE_FLOOR = 1e-12

# Detuning
MAX_DETUNE_SEMITONES = 1.0
N_VERSIONS = 7

# Training defaults
LEARNING_RATE = 5e-5
CLIP_THRESHOLD = 100.0
VALIDATION_CADENCE = 500
HIDDEN_INIT_STD = 1e-4
MIN_NOTE_FRAMES_FOR_NET = 8

# Listening clips
CLIP_SECONDS = 12.0
CLIP_FADE_SECONDS = 1.0
CLIP_COUNT = 4
CLIP_VOICING = 0.7
CLIP_THRESHOLD_STEP = 0.05

# Deviation statistics
DEVIATION_WINDOW_CENTS = 200.0
PREFERRED_STD_RANGE = (40.0, 60.0)
PREFERRED_MEDIAN_CENTS = 46.0

# Equal temperament baseline
BASELINE_MAX_SHIFT_CENTS = 50.0
