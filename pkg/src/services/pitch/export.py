"""CSV/JSON export of pitch tracks and note segments."""

from pathlib import Path
from typing import List, Union

import pandas as pd

from src.models.schemas import NoteSegment
from src.models.signals import PitchTrack
from src.utils.helpers import read_json, write_json

TRACK_COLUMNS = ["frame", "time_s", "f0_hz", "voicing"]


def track_to_frame(track: PitchTrack) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "frame": range(len(track)),
            "time_s": track.times,
            "f0_hz": track.f0,
            "voicing": track.voicing,
        },
        columns=TRACK_COLUMNS,
    )


def export_track_csv(track: PitchTrack, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    track_to_frame(track).to_csv(path, index=False, float_format="%.6f")
    return path


def import_track_csv(path: Union[str, Path], hop: int, sample_rate: int) -> PitchTrack:
    frame = pd.read_csv(path)
    missing = set(TRACK_COLUMNS) - set(frame.columns)
    if missing:
        raise ValueError(f"{path}: missing columns {sorted(missing)}")
    return PitchTrack(
        f0=frame["f0_hz"].to_numpy(),
        voicing=frame["voicing"].to_numpy(),
        hop=hop,
        sample_rate=sample_rate,
    )


def export_notes_json(notes: List[NoteSegment], path: Union[str, Path]) -> Path:
    """Write ``[{start_frame, end_frame, median_f0, target_shift}, ...]``."""
    return write_json(path, [note.model_dump() for note in notes])


def import_notes_json(path: Union[str, Path]) -> List[NoteSegment]:
    return [NoteSegment(**item) for item in read_json(path)]
