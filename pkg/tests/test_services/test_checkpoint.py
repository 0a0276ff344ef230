"""
Tests for the checkpoint container.
"""

import json

import numpy as np
import pytest

from src.core.exceptions import CheckpointCorruptError, IncompatibleCheckpointError
from src.services.network import checkpoint
from src.services.network.checkpoint import MAGIC, load_checkpoint, save_checkpoint
from src.services.network.optim import AdamState, adam_step
from tests.conftest import TINY_SPECS


@pytest.fixture
def saved(tiny_net, tmp_path):
    adam = AdamState.for_params(tiny_net.params, lr=1e-3)
    grads = {k: np.ones_like(v) for k, v in tiny_net.params.items()}
    adam_step(tiny_net.params, grads, adam)
    return tiny_net, adam, save_checkpoint(tiny_net, adam, tmp_path / "net.ckpt")


def test_round_trip(saved):
    net, adam, path = saved
    assert path.read_bytes()[:4] == MAGIC
    assert not path.with_suffix(".ckpt.tmp").exists()

    loaded, loaded_adam = load_checkpoint(path, expected_specs=TINY_SPECS)
    assert loaded.specs == net.specs
    assert (loaded.n_bins, loaded.hidden, loaded.min_frames) == (net.n_bins, net.hidden, net.min_frames)
    for name, value in net.params.items():
        assert loaded.params[name].dtype == np.float32
        np.testing.assert_array_equal(loaded.params[name], value.astype(np.float32))
        np.testing.assert_array_equal(loaded_adam.m[name], adam.m[name].astype(np.float32))
        np.testing.assert_array_equal(loaded_adam.v[name], adam.v[name].astype(np.float32))
    assert loaded_adam.step == 1
    assert loaded_adam.lr == pytest.approx(1e-3)


def test_any_architecture_when_unchecked(saved):
    _, _, path = saved
    loaded, _ = load_checkpoint(path, expected_specs=None)
    assert loaded.specs == TINY_SPECS


def test_checkpoint_without_optimizer_state(tiny_net, tmp_path):
    path = save_checkpoint(tiny_net, None, tmp_path / "bare.ckpt")
    _, adam = load_checkpoint(path, expected_specs=TINY_SPECS)
    assert adam.step == 0
    assert all(not np.any(m) for m in adam.m.values())


def test_corrupt_files_rejected(saved, tmp_path):
    _, _, path = saved
    raw = path.read_bytes()

    bad_magic = tmp_path / "bad_magic.ckpt"
    bad_magic.write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(CheckpointCorruptError):
        load_checkpoint(bad_magic, expected_specs=TINY_SPECS)

    truncated = tmp_path / "truncated.ckpt"
    truncated.write_bytes(raw[:-10])
    with pytest.raises(CheckpointCorruptError):
        load_checkpoint(truncated, expected_specs=TINY_SPECS)

    no_header = tmp_path / "no_header.ckpt"
    no_header.write_bytes(raw[:12])
    with pytest.raises(CheckpointCorruptError):
        load_checkpoint(no_header, expected_specs=TINY_SPECS)


def test_incompatible_files_rejected(tiny_net, saved, tmp_path, monkeypatch):
    _, _, path = saved
    with pytest.raises(IncompatibleCheckpointError):
        load_checkpoint(path)

    monkeypatch.setattr(checkpoint, "FORMAT_VERSION", 2)
    future = save_checkpoint(tiny_net, None, tmp_path / "future.ckpt")
    monkeypatch.undo()
    with pytest.raises(IncompatibleCheckpointError):
        load_checkpoint(future, expected_specs=TINY_SPECS)


def test_header_shapes_must_match_the_network(saved, tmp_path):
    _, _, path = saved
    raw = path.read_bytes()
    length = int.from_bytes(raw[4:8], "little")
    header = json.loads(raw[8 : 8 + length])
    header["hidden"] = header["hidden"] + 1
    patched = json.dumps(header, sort_keys=True).encode("utf-8")
    bad = tmp_path / "bad_hidden.ckpt"
    bad.write_bytes(MAGIC + len(patched).to_bytes(4, "little") + patched + raw[8 + length :])
    with pytest.raises(IncompatibleCheckpointError):
        load_checkpoint(bad, expected_specs=TINY_SPECS)
