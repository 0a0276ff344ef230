"""
Shared dependencies for the API layer.

This module contains common dependencies used across multiple API endpoints.
"""

import shutil
import uuid
from pathlib import Path

from fastapi import HTTPException, UploadFile, status

from src.core.config import settings
from src.core.exceptions import AudioFormatError, CheckpointCorruptError, DeeptuneError, IncompatibleCheckpointError
from src.models.signals import AudioBuffer
from src.services.audio.service import AudioService
from src.services.network.checkpoint import load_checkpoint
from src.services.network.model import AutotunerNet
from src.services.pipeline.correction import CorrectionService
from src.services.pitch.service import PitchService


# Service dependencies
def get_audio_service() -> AudioService:
    """Get audio service instance."""
    return AudioService()


def get_pitch_service() -> PitchService:
    """Get pitch service instance."""
    return PitchService()


def get_correction_service() -> CorrectionService:
    """Get correction service instance."""
    return CorrectionService()


def get_model() -> AutotunerNet:
    """Load the network configured by ``CHECKPOINT_PATH``."""
    if settings.CHECKPOINT_PATH is None:
        raise HTTPException(
            status_code=status.HTTP_503_SERVICE_UNAVAILABLE,
            detail="No model checkpoint configured (set CHECKPOINT_PATH)",
        )
    try:
        net, _ = load_checkpoint(settings.CHECKPOINT_PATH)
    except (OSError, IncompatibleCheckpointError, CheckpointCorruptError) as e:
        raise HTTPException(status_code=status.HTTP_503_SERVICE_UNAVAILABLE, detail=f"Model unavailable: {e}")
    return net


# Uploads
def new_job_dir() -> Path:
    """A fresh directory under WORK_DIR for one request's files."""
    path = Path(settings.WORK_DIR) / uuid.uuid4().hex
    path.mkdir(parents=True, exist_ok=True)
    return path


def save_upload(upload: UploadFile, directory: Path, name: str) -> Path:
    """Copy an uploaded file into ``directory``."""
    path = directory / f"{name}.wav"
    with open(path, "wb") as f:
        shutil.copyfileobj(upload.file, f)
    return path


def check_duration(audio: AudioBuffer) -> None:
    if audio.duration > settings.MAX_UPLOAD_SECONDS:
        raise HTTPException(
            status_code=status.HTTP_413_REQUEST_ENTITY_TOO_LARGE,
            detail=f"Audio is {audio.duration:.0f} s, limit is {settings.MAX_UPLOAD_SECONDS:.0f} s",
        )


def http_error(e: DeeptuneError) -> HTTPException:
    """Map a service error to an HTTP error."""
    if isinstance(e, AudioFormatError):
        return HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e))
