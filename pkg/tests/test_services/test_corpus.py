"""
Tests for corpus rendering and manifests.
"""

from pathlib import Path

import pytest
from pydantic import ValidationError

from src.core.exceptions import ConfigError
from src.models import enums
from src.models.enums import Split
from src.models.schemas import CorpusManifest
from src.services.datagen.corpus import MANIFEST_NAME, CorpusService, load_manifest, load_reference, load_song


def test_every_artifact_is_written(corpus):
    assert Path(corpus.root).is_absolute()
    assert [len(corpus.split(s)) for s in (Split.TRAIN, Split.VALIDATION, Split.TEST)] == [2, 1, 1]
    for entry in corpus.entries:
        for rel in (
            entry.vocal_path,
            entry.backing_path,
            entry.notes_path,
            entry.reference_path,
            entry.vocal_cqt_path,
            entry.backing_cqt_path,
            entry.detune_path,
        ):
            assert corpus.resolve(rel).is_file()
        assert len(entry.version_seeds) == enums.N_VERSIONS


def test_splits_share_no_backing(corpus):
    owners = {}
    for entry in corpus.entries:
        assert owners.setdefault(entry.backing_id, entry.split) == entry.split
    assert len({e.performance_id for e in corpus.entries}) == len(corpus.entries)


def test_manifest_reloads_with_absolute_root(corpus):
    reloaded = load_manifest(Path(corpus.root) / MANIFEST_NAME)
    assert reloaded.root == corpus.root
    assert reloaded.entries == corpus.entries


def test_song_artifacts_are_consistent(corpus):
    entry = corpus.split(Split.TRAIN)[0]
    song = load_song(corpus, entry)
    assert song.vocal_cqt.n_bins == song.vocal_cqt.params.total_bins
    assert song.backing_cqt.is_truncated
    assert song.vocal_cqt.n_frames == song.backing_cqt.n_frames
    assert len(song.detunes) == enums.N_VERSIONS
    assert song.notes
    for spec in song.detunes:
        assert len(spec.shifts) == len(song.notes)
        assert all(abs(s) <= 1.0 for s in spec.shifts)

    melody, reference = load_reference(corpus, entry)
    assert len(melody) == len(reference)


def test_same_seed_rebuilds_the_same_files(corpus, tmp_path):
    again = CorpusService().build_corpus(tmp_path, (1, 0, 0), seed=0)
    first = corpus.split(Split.TRAIN)[0]
    second = again.entries[0]
    assert second.backing_id == first.backing_id
    for rel in (first.vocal_path, first.detune_path, first.notes_path):
        assert again.resolve(rel).read_bytes() == corpus.resolve(rel).read_bytes()


def test_bad_song_counts_rejected(tmp_path):
    with pytest.raises(ConfigError) as exc:
        CorpusService().build_corpus(tmp_path, (1, -1, 0))
    assert exc.value.key == "n_songs"


def test_shared_backing_rejected(corpus):
    train, validation = corpus.split(Split.TRAIN)[0], corpus.split(Split.VALIDATION)[0]
    leaked = validation.model_copy(update={"backing_id": train.backing_id})
    with pytest.raises(ValidationError):
        CorpusManifest(entries=[train, leaked])
