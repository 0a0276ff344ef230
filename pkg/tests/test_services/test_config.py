"""
Tests for configuration parsing.
"""

import pytest

from src.core.config import Settings, parse_config
from src.core.exceptions import ConfigError


def test_empty_config_uses_defaults(tmp_path):
    empty = tmp_path / "empty.cfg"
    empty.write_text("")
    for config in (parse_config(), parse_config(empty)):
        assert config.learning_rate == 5e-5
        assert config.clip_threshold == 100.0
        assert config.versions == 7
        assert config.validation_cadence == 500
        assert config.manifest is None


def test_key_value_file(tmp_path):
    path = tmp_path / "train.cfg"
    path.write_text("# smaller run\nversions = 3\nlearning_rate = 1e-4  # faster\n\nmanifest = corpus/manifest.json\n")
    config = parse_config(path)
    assert config.versions == 3
    assert config.learning_rate == 1e-4
    assert str(config.manifest) == "corpus/manifest.json"


def test_json_file_and_overrides(tmp_path):
    path = tmp_path / "train.json"
    path.write_text('{"versions": 3, "seed": 4}')
    config = parse_config(path, {"seed": 9, "max_epochs": None})
    assert config.versions == 3
    assert config.seed == 9
    assert config.max_epochs == 1


@pytest.mark.parametrize(
    "values, key",
    [
        ({"learning_rate": "fast"}, "learning_rate"),
        ({"learning_rate": -1.0}, "learning_rate"),
        ({"versions": 8}, "versions"),
        ({"batch_size": 4}, "batch_size"),
    ],
)
def test_bad_values_name_their_key(values, key):
    with pytest.raises(ConfigError) as exc:
        parse_config(overrides=values)
    assert exc.value.key == key


def test_malformed_files_rejected(tmp_path):
    bad_json = tmp_path / "bad.json"
    bad_json.write_text("{versions: 3")
    with pytest.raises(ConfigError):
        parse_config(bad_json)

    not_object = tmp_path / "list.json"
    not_object.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        parse_config(not_object)

    no_equals = tmp_path / "bad.cfg"
    no_equals.write_text("versions 3\n")
    with pytest.raises(ConfigError):
        parse_config(no_equals)


def test_settings_read_the_environment(monkeypatch):
    monkeypatch.setenv("SAMPLE_RATE", "16000")
    monkeypatch.setenv("CHECKPOINT_PATH", "/tmp/best.ckpt")
    settings = Settings()
    assert settings.SAMPLE_RATE == 16000
    assert str(settings.CHECKPOINT_PATH) == "/tmp/best.ckpt"
    assert settings.HOP_LENGTH == 256


def test_quoted_values_and_export_prefix(tmp_path):
    path = tmp_path / "train.cfg"
    path.write_text('export seed=4\nmanifest = "corpus dir/manifest.json"\n')
    config = parse_config(path)
    assert config.seed == 4
    assert str(config.manifest) == "corpus dir/manifest.json"


def test_lr_is_accepted_for_learning_rate(tmp_path):
    path = tmp_path / "train.cfg"
    path.write_text("lr = 1e-3\n")
    assert parse_config(path).learning_rate == 1e-3
    assert parse_config(overrides={"lr": 2e-4}).learning_rate == 2e-4
    assert parse_config(path, {"learning_rate": 3e-4}).learning_rate == 3e-4
    with pytest.raises(ConfigError) as exc:
        parse_config(overrides={"lr": -1.0})
    assert exc.value.key == "learning_rate"


def test_key_without_value_names_the_key(tmp_path):
    path = tmp_path / "train.cfg"
    path.write_text("seed = 1\nversions\n")
    with pytest.raises(ConfigError) as exc:
        parse_config(path)
    assert exc.value.key == "versions"
