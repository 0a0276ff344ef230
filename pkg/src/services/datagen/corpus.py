"""Synthetic corpus rendering and manifest handling."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from src.core.exceptions import ConfigError
from src.models import enums
from src.models.enums import Split
from src.models.schemas import CorpusManifest, DetuneSpec, ManifestEntry, NoteSegment
from src.models.signals import CqtParams, CqtSpectrogram, PyinParams
from src.services.audio.cqt import cqt, export_cqt, import_cqt, truncate_buffer
from src.services.audio.io import write_wav
from src.services.base import BaseService
from src.services.datagen.detune import make_detuned_versions
from src.services.datagen.synth import random_song_spec, synth_performance
from src.services.pitch.export import export_notes_json, import_notes_json
from src.services.pitch.segmentation import SegmentationParams, segment_notes_silence
from src.services.pitch.yin import pyin_track
from src.utils.helpers import read_json, write_json

MANIFEST_NAME = "manifest.json"
SPLIT_SEED_BASE: Dict[Split, int] = {Split.TRAIN: 1000, Split.VALIDATION: 2000, Split.TEST: 3000}
SEED_STRIDE = 10000
MAX_SONGS_PER_SPLIT = 999


@dataclass(frozen=True)
class SongJob:
    split: Split
    index: int
    backing_seed: int
    out_dir: Path
    params: CqtParams
    pyin_params: PyinParams
    segmentation: SegmentationParams


def _render_song(job: SongJob) -> ManifestEntry:
    """Render one performance and write its artifacts; runs in worker processes."""
    performance_id = f"{job.split.value}-{job.index:04d}"
    song_dir = job.out_dir / job.split.value / performance_id
    rel = Path(job.split.value) / performance_id

    melody_seed = 2 * job.backing_seed + 1
    spec = random_song_spec(job.backing_seed, melody_seed)
    vocal, backing, reference = synth_performance(melody_seed, spec, sample_rate=job.pyin_params.sample_rate)

    track = pyin_track(vocal, job.pyin_params)
    notes = segment_notes_silence(track, job.segmentation)
    vocal_cqt = cqt(vocal, job.params)
    backing_cqt = truncate_buffer(cqt(backing, job.params))

    seeds = [job.backing_seed * 100 + v for v in range(enums.N_VERSIONS)]
    versions = make_detuned_versions(vocal_cqt, notes, seeds)

    write_wav(song_dir / "vocal.wav", vocal, subtype="FLOAT")
    write_wav(song_dir / "backing.wav", backing, subtype="FLOAT")
    export_notes_json(notes, song_dir / "notes.json")
    write_json(
        song_dir / "reference.json",
        {"melody": spec.melody, "notes": [n.model_dump() for n in reference]},
    )
    export_cqt(vocal_cqt, song_dir / "vocal.cqt")
    export_cqt(backing_cqt, song_dir / "backing.cqt")
    write_json(song_dir / "detune.json", [s.model_dump() for _, s in versions])

    return ManifestEntry(
        performance_id=performance_id,
        backing_id=f"backing-{job.backing_seed}",
        split=job.split,
        vocal_path=str(rel / "vocal.wav"),
        backing_path=str(rel / "backing.wav"),
        notes_path=str(rel / "notes.json"),
        reference_path=str(rel / "reference.json"),
        vocal_cqt_path=str(rel / "vocal.cqt"),
        backing_cqt_path=str(rel / "backing.cqt"),
        detune_path=str(rel / "detune.json"),
        version_seeds=seeds,
    )


def load_manifest(path: Union[str, Path]) -> CorpusManifest:
    """Read a manifest, anchoring its root at the manifest's directory."""
    path = Path(path)
    manifest = CorpusManifest(**read_json(path))
    root = Path(manifest.root)
    if not root.is_absolute():
        manifest = manifest.model_copy(update={"root": str((path.parent / root).resolve())})
    return manifest


@dataclass(eq=False)
class SongArtifacts:
    """Everything training and evaluation read for one performance."""
    entry: ManifestEntry
    vocal_cqt: CqtSpectrogram
    backing_cqt: CqtSpectrogram
    notes: List[NoteSegment]
    detunes: List[DetuneSpec]


def load_song(manifest: CorpusManifest, entry: ManifestEntry) -> SongArtifacts:
    resolve = manifest.resolve
    return SongArtifacts(
        entry=entry,
        vocal_cqt=import_cqt(resolve(entry.vocal_cqt_path)),
        backing_cqt=import_cqt(resolve(entry.backing_cqt_path)),
        notes=import_notes_json(resolve(entry.notes_path)),
        detunes=[DetuneSpec(**d) for d in read_json(resolve(entry.detune_path))],
    )


def load_reference(manifest: CorpusManifest, entry: ManifestEntry) -> Tuple[List[int], List[NoteSegment]]:
    data = read_json(manifest.resolve(entry.reference_path))
    return data["melody"], [NoteSegment(**n) for n in data["notes"]]


class CorpusService(BaseService):
    """Builds and reads synthetic training corpora."""

    def __init__(
        self,
        params: Optional[CqtParams] = None,
        pyin_params: Optional[PyinParams] = None,
        segmentation: Optional[SegmentationParams] = None,
    ):
        super().__init__("corpus")
        self.params = params or CqtParams()
        self.pyin_params = pyin_params or PyinParams()
        self.segmentation = segmentation or SegmentationParams()

    def build_corpus(
        self,
        out_dir: Union[str, Path],
        n_songs: Tuple[int, int, int],
        seed: int = 0,
        workers: int = 1,
    ) -> CorpusManifest:
        """
        Render ``(train, validation, test)`` songs and write the manifest.

        Backing seeds come from disjoint per-split ranges, so no backing track
        is shared between splits; the same ``seed`` rebuilds identical files.

        Args:
            out_dir: Corpus directory
            n_songs: Song counts per split
            seed: Corpus-level seed offset
            workers: Worker processes for rendering

        Returns:
            The manifest, also written to ``out_dir/manifest.json``
        """
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if len(n_songs) != 3 or any(not 0 <= n <= MAX_SONGS_PER_SPLIT for n in n_songs):
            raise ConfigError(
                f"song counts must be three values in 0..{MAX_SONGS_PER_SPLIT}, got {n_songs}", key="n_songs"
            )

        jobs = [
            SongJob(
                split=split,
                index=i,
                backing_seed=seed * SEED_STRIDE + SPLIT_SEED_BASE[split] + i,
                out_dir=out_dir,
                params=self.params,
                pyin_params=self.pyin_params,
                segmentation=self.segmentation,
            )
            for split, count in zip((Split.TRAIN, Split.VALIDATION, Split.TEST), n_songs)
            for i in range(count)
        ]
        self.logger.info(f"Rendering {len(jobs)} songs into {out_dir} with {workers} worker(s)")

        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                entries = list(pool.map(_render_song, jobs))
        else:
            entries = [_render_song(job) for job in jobs]

        manifest = CorpusManifest(root=".", entries=entries)
        write_json(out_dir / MANIFEST_NAME, manifest.model_dump(mode="json"))
        self.logger.info(f"Wrote manifest with {len(entries)} entries")
        return manifest.model_copy(update={"root": str(out_dir.resolve())})
