import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from dotenv import dotenv_values, find_dotenv, load_dotenv
from dotenv.parser import parse_stream

load_dotenv(find_dotenv(), override=False)

from pydantic import AliasChoices, Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.core.exceptions import ConfigError

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Application settings with validation"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    APP_NAME: str = "deeptune"
    APP_VERSION: str = "0.1.0"
    DEBUG: bool = Field(default=False)
    ENVIRONMENT: str = Field(default="development", pattern="^(development|staging|production)$")

    # Server Settings
    HOST: str = Field(default="0.0.0.0")
    PORT: int = Field(default=8000)
    RELOAD: bool = Field(default=False)
    WORK_DIR: Path = Field(default=Path("./work"))
    MAX_UPLOAD_SECONDS: float = Field(default=600.0, gt=0)
    CHECKPOINT_PATH: Optional[Path] = None

    # Audio
    SAMPLE_RATE: int = Field(default=22050, gt=0)
    HOP_LENGTH: int = Field(default=256, ge=1)
    FRAME_LENGTH: int = Field(default=2048, ge=16)

    # Constant-Q geometry
    CQT_FMIN: float = Field(default=125.0, gt=0)
    CQT_BINS_PER_SEMITONE: int = Field(default=16, ge=1)
    CQT_OCTAVES: float = Field(default=5.5, gt=0)
    CQT_BUFFER_BINS: int = Field(default=16, ge=0)

    # Pitch tracking and segmentation
    PYIN_FMIN: float = Field(default=80.0, gt=0)
    PYIN_FMAX: float = Field(default=1000.0, gt=0)
    VOICING_THRESHOLD: float = Field(default=0.5, ge=0, le=1)
    MIN_NOTE_FRAMES: int = Field(default=5, ge=1)
    MIN_GAP_FRAMES: int = Field(default=3, ge=1)
    SPLIT_THRESHOLD_CENTS: float = Field(default=80.0, gt=0)

    # Resynthesis
    CROSSFADE_MS: float = Field(default=10.0, ge=0)

    # Logging
    LOG_LEVEL: str = Field(default="INFO", pattern="^(DEBUG|INFO|WARNING|ERROR|CRITICAL)$")
    LOG_FORMAT: str = Field(default="%(asctime)s %(levelname)s %(name)s: %(message)s")


def get_settings() -> Settings:
    """Get settings instance"""
    return Settings()


settings = get_settings()


def configure_logging(level: Optional[str] = None) -> None:
    """Configure root logging from settings, optionally overriding the level."""
    logging.basicConfig(
        level=getattr(logging, (level or settings.LOG_LEVEL).upper()),
        format=settings.LOG_FORMAT,
    )


def _read_config_file(path: Path) -> Dict[str, Any]:
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        return {}
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top-level JSON value must be an object")
        return data

    broken = [b.original for b in parse_stream(io.StringIO(text)) if b.error]
    if broken:
        raise ConfigError(f"{path}:{broken[0].line}: expected 'key = value', got {broken[0].string.strip()!r}")
    data = dotenv_values(stream=io.StringIO(text), interpolate=False)
    for key, value in data.items():
        if value is None:
            raise ConfigError(f"{path}: {key} has no value", key=key)
    return dict(data)


def _config_keys(model) -> Dict[str, str]:
    """Accepted config keys, aliases included, mapped to field names."""
    keys = {}
    for name, field in model.model_fields.items():
        keys[name] = name
        if isinstance(field.validation_alias, AliasChoices):
            keys.update({alias: name for alias in field.validation_alias.choices if isinstance(alias, str)})
    return keys


def parse_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Dict[str, Any]] = None,
):
    """
    Build a validated training configuration.

    Values come from an optional JSON or ``key = value`` file, then from
    explicit overrides (CLI flags); anything left unset keeps its default.

    Args:
        path: Optional configuration file
        overrides: Key/value pairs applied on top of the file

    Returns:
        A validated ``TrainConfig``

    Raises:
        ConfigError: Unknown key or badly typed value, naming the key
    """
    from src.models.schemas import TrainConfig

    values: Dict[str, Any] = {}
    if path is not None:
        values.update(_read_config_file(Path(path)))
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})

    names = _config_keys(TrainConfig)
    unknown = sorted(set(values) - set(names))
    if unknown:
        raise ConfigError(f"unknown config key: {unknown[0]}", key=unknown[0])

    # aliases collapse onto their field; later sources win
    fields = {names[key]: value for key, value in values.items()}
    try:
        config = TrainConfig(**fields)
    except ValidationError as e:
        first = e.errors()[0]
        key = str(first["loc"][0]) if first.get("loc") else "?"
        raise ConfigError(f"invalid value for {key}: {first['msg']}", key=key) from e

    for field in sorted(fields):
        default = TrainConfig.model_fields[field].default
        if getattr(config, field) != default:
            logger.info(f"Config override: {field} = {getattr(config, field)!r} (default {default!r})")
    return config
