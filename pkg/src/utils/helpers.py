"""
Helper utilities for deeptune.

Small file-format helpers shared by the services: JSON with stable key
order, float32 matrices with JSON sidecars, and CSV tables through pandas.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Tuple, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def write_json(path: PathLike, data: Any) -> Path:
    """
    Write JSON with sorted keys so identical data gives identical bytes.

    Args:
        path: Destination file
        data: JSON-serializable value

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_json(path: PathLike) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def sidecar_path(path: PathLike) -> Path:
    path = Path(path)
    return path.with_suffix(path.suffix + ".json")


def write_float32_matrix(path: PathLike, matrix: np.ndarray, meta: Mapping[str, Any]) -> Path:
    """
    Write a matrix as little-endian float32 with a JSON sidecar.

    The sidecar holds ``shape`` plus whatever ``meta`` carries.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.ascontiguousarray(matrix, dtype="<f4")
    path.write_bytes(data.tobytes())
    write_json(sidecar_path(path), {**dict(meta), "shape": list(data.shape), "dtype": "<f4"})
    return path


def read_float32_matrix(path: PathLike) -> Tuple[np.ndarray, Dict[str, Any]]:
    """Read a matrix written by ``write_float32_matrix``."""
    path = Path(path)
    meta = read_json(sidecar_path(path))
    shape = tuple(meta["shape"])
    raw = path.read_bytes()
    expected = int(np.prod(shape)) * 4
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes for shape {shape}, found {len(raw)}")
    return np.frombuffer(raw, dtype="<f4").reshape(shape).astype(np.float32), meta


def write_csv(path: PathLike, rows: Iterable[Mapping[str, Any]], columns: List[str]) -> Path:
    """Write rows to CSV with a fixed column order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(list(rows), columns=columns)
    frame.to_csv(path, index=False)
    return path


def frames_to_seconds(frames: Union[int, float], hop: int, sample_rate: int) -> float:
    return float(frames) * hop / sample_rate
