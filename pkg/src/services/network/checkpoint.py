"""
Self-describing checkpoint container.

Layout: ``b"DTCK"``, a little-endian uint32 header length, a UTF-8 JSON
header, then the tensors as contiguous little-endian float32 payloads in the
order the header lists them. Optimizer moments are stored as ``adam.m.*``
and ``adam.v.*`` tensors.
"""

import json
import logging
import os
import struct
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.exceptions import CheckpointCorruptError, IncompatibleCheckpointError, ShapeError
from src.services.network.layers import CONV_STACK, ConvLayerSpec
from src.services.network.model import AutotunerNet
from src.services.network.optim import AdamState

logger = logging.getLogger(__name__)

MAGIC = b"DTCK"
FORMAT_VERSION = 1
_LENGTH = struct.Struct("<I")


def save_checkpoint(net: AutotunerNet, adam: Optional[AdamState], path: Union[str, Path]) -> Path:
    """Write ``net`` (and optimizer state) atomically to ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    tensors: List[Tuple[str, np.ndarray]] = list(net.params.items())
    if adam is not None:
        tensors += [(f"adam.m.{k}", adam.m[k]) for k in net.params if k in adam.m]
        tensors += [(f"adam.v.{k}", adam.v[k]) for k in net.params if k in adam.v]

    table = []
    offset = 0
    payloads = []
    for name, value in tensors:
        data = np.ascontiguousarray(value, dtype="<f4").tobytes()
        table.append({"name": name, "shape": list(value.shape), "offset": offset, "nbytes": len(data)})
        payloads.append(data)
        offset += len(data)

    header = {
        "format_version": FORMAT_VERSION,
        "conv": [spec.to_dict() for spec in net.specs],
        "n_bins": net.n_bins,
        "hidden": net.hidden,
        "min_frames": net.min_frames,
        "dtype": "<f4",
        "tensors": table,
        "adam": adam.scalars() if adam is not None else None,
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")

    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as f:
        f.write(MAGIC)
        f.write(_LENGTH.pack(len(header_bytes)))
        f.write(header_bytes)
        for data in payloads:
            f.write(data)
    os.replace(tmp, path)
    logger.info(f"Saved checkpoint {path} ({offset} payload bytes)")
    return path


def _read_header(raw: bytes, path: Path) -> Tuple[dict, int]:
    if len(raw) < len(MAGIC) + _LENGTH.size or raw[: len(MAGIC)] != MAGIC:
        raise CheckpointCorruptError(f"{path}: not a checkpoint (bad magic)")
    (length,) = _LENGTH.unpack_from(raw, len(MAGIC))
    start = len(MAGIC) + _LENGTH.size
    if start + length > len(raw):
        raise CheckpointCorruptError(f"{path}: truncated header")
    try:
        header = json.loads(raw[start : start + length].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointCorruptError(f"{path}: unreadable header ({e})") from e
    return header, start + length


def load_checkpoint(
    path: Union[str, Path],
    expected_specs: Optional[Sequence[ConvLayerSpec]] = CONV_STACK,
) -> Tuple[AutotunerNet, AdamState]:
    """
    Read a checkpoint written by ``save_checkpoint``.

    Args:
        path: Checkpoint file
        expected_specs: Conv stack the header must match; ``None`` accepts any

    Returns:
        The network and its optimizer state (fresh when none was saved)

    Raises:
        IncompatibleCheckpointError: Version, layer list or tensor shapes differ
        CheckpointCorruptError: Bad magic, unreadable header or truncated payload
    """
    path = Path(path)
    raw = path.read_bytes()
    header, payload_start = _read_header(raw, path)

    if header.get("format_version") != FORMAT_VERSION:
        raise IncompatibleCheckpointError(
            f"{path}: format version {header.get('format_version')}, expected {FORMAT_VERSION}"
        )
    try:
        specs = [ConvLayerSpec.from_dict(d) for d in header["conv"]]
        table = header["tensors"]
        n_bins, hidden = int(header["n_bins"]), int(header["hidden"])
    except (KeyError, TypeError, ValueError) as e:
        raise CheckpointCorruptError(f"{path}: malformed header ({e})") from e
    if expected_specs is not None and tuple(specs) != tuple(expected_specs):
        raise IncompatibleCheckpointError(f"{path}: layer list does not match the expected architecture")

    payload = raw[payload_start:]
    needed = max((t["offset"] + t["nbytes"] for t in table), default=0)
    if len(payload) < needed:
        raise CheckpointCorruptError(f"{path}: truncated payload ({len(payload)} of {needed} bytes)")

    tensors: Dict[str, np.ndarray] = {}
    for t in table:
        shape = tuple(t["shape"])
        if int(np.prod(shape)) * 4 != t["nbytes"]:
            raise CheckpointCorruptError(f"{path}: tensor {t['name']} size disagrees with its shape")
        chunk = payload[t["offset"] : t["offset"] + t["nbytes"]]
        tensors[t["name"]] = np.frombuffer(chunk, dtype="<f4").reshape(shape).astype(np.float32)

    params = {k: v for k, v in tensors.items() if not k.startswith("adam.")}
    try:
        net = AutotunerNet(
            params,
            specs=specs,
            n_bins=n_bins,
            hidden=hidden,
            min_frames=int(header.get("min_frames", 8)),
        )
    except ShapeError as e:
        raise IncompatibleCheckpointError(f"{path}: {e}") from e

    scalars = header.get("adam") or {}
    adam = AdamState.for_params(net.params, **{k: scalars[k] for k in ("lr", "beta1", "beta2", "eps") if k in scalars})
    adam.step = int(scalars.get("step", 0))
    for name in net.params:
        if f"adam.m.{name}" in tensors:
            adam.m[name] = tensors[f"adam.m.{name}"]
            adam.v[name] = tensors[f"adam.v.{name}"]
    logger.info(f"Loaded checkpoint {path} (optimizer step {adam.step})")
    return net, adam
