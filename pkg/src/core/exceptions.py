"""
Exception hierarchy for deeptune.

Every error carries the process exit code the CLI reports for it.
"""

from typing import Optional

from src.models.enums import ExitCode


class DeeptuneError(Exception):
    """Base class for all deeptune errors"""
    exit_code: ExitCode = ExitCode.USAGE


class ConfigError(DeeptuneError):
    """Unknown or badly typed configuration value"""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.key = key


class AudioFormatError(DeeptuneError):
    """Malformed or non-WAV audio file"""
    exit_code = ExitCode.IO


class UnsupportedAudioError(AudioFormatError):
    """WAV encoding or channel layout we do not read"""
    pass


class SilentInputError(DeeptuneError, ValueError):
    """Audio has no signal to normalize"""
    exit_code = ExitCode.IO


class SizeError(DeeptuneError, ValueError):
    """Input too short for the requested analysis"""
    pass


class ShapeError(DeeptuneError, ValueError):
    """Array or list dimensions do not agree"""
    pass


class RangeError(DeeptuneError, ValueError):
    """Parameter or index outside its permitted range"""
    pass


class DomainError(DeeptuneError, ValueError):
    """Argument outside the mathematical domain of the operation"""
    pass


class InvariantError(DeeptuneError, ValueError):
    """Input violates a structural invariant (e.g. overlapping notes)"""
    pass


class SpecError(DeeptuneError, ValueError):
    """Song specification cannot be rendered"""
    pass


class StateError(DeeptuneError, RuntimeError):
    """Operation called without the state it depends on"""
    exit_code = ExitCode.NUMERIC


class NumericError(DeeptuneError, ArithmeticError):
    """Non-finite values in gradients or losses"""
    exit_code = ExitCode.NUMERIC


class InsufficientMarksError(DeeptuneError, ValueError):
    """Fewer than two pitch marks inside a note"""
    pass


class DegenerateNoteError(DeeptuneError, ValueError):
    """Note too short for the convolutional stack"""
    pass


class IncompatibleCheckpointError(DeeptuneError):
    """Checkpoint was written for a different format or architecture"""
    exit_code = ExitCode.IO


class CheckpointCorruptError(DeeptuneError):
    """Checkpoint file is truncated or unreadable"""
    exit_code = ExitCode.IO
