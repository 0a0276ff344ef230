"""Training data: synthetic performances and constant-Q detuning."""

from src.services.datagen.corpus import CorpusService, load_manifest, load_reference, load_song
from src.services.datagen.detune import (
    TrainingExample,
    build_training_example,
    detune_columns,
    make_detuned_versions,
    sample_note_shifts,
)
from src.services.datagen.synth import random_song_spec, synth_performance

__all__ = [
    "CorpusService",
    "TrainingExample",
    "build_training_example",
    "detune_columns",
    "load_manifest",
    "load_reference",
    "load_song",
    "make_detuned_versions",
    "random_song_spec",
    "sample_note_shifts",
    "synth_performance",
]
