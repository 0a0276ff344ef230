"""Services package for the deeptune service layer."""

from .audio.service import AudioService
from .base import BaseService
from .datagen.corpus import CorpusService
from .pipeline.correction import CorrectionService
from .pipeline.training import Trainer
from .pitch.service import PitchService
from .psola.service import PsolaService

__all__ = [
    'AudioService',
    'BaseService',
    'CorpusService',
    'CorrectionService',
    'PitchService',
    'PsolaService',
    'Trainer',
]
