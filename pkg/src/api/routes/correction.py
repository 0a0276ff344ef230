"""
Pitch correction endpoints for the deeptune API.

Corrected WAVs and their JSON reports stay under WORK_DIR; the response
carries their paths.
"""

import logging
import shutil

from fastapi import APIRouter, Depends, File, HTTPException, UploadFile

from src.api.dependencies import (
    check_duration,
    get_audio_service,
    get_correction_service,
    get_model,
    http_error,
    new_job_dir,
    save_upload,
)
from src.core.exceptions import DeeptuneError
from src.models.schemas import CorrectionReport
from src.services.audio.service import AudioService
from src.services.network.model import AutotunerNet
from src.services.pipeline.correction import CorrectionService

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/correction", tags=["correction"])


@router.post("/baseline", response_model=CorrectionReport)
def correct_baseline(
    vocal: UploadFile = File(..., description="Vocal WAV"),
    audio_service: AudioService = Depends(get_audio_service),
    service: CorrectionService = Depends(get_correction_service),
):
    """Snap every note to the nearest equal-tempered degree."""
    job = new_job_dir()
    try:
        vocal_path = save_upload(vocal, job, "vocal")
        check_duration(audio_service.load(vocal_path))
        return service.correct_baseline(vocal_path, job / "corrected.wav")
    except DeeptuneError as e:
        logger.error(f"Baseline correction failed: {e}")
        shutil.rmtree(job, ignore_errors=True)
        raise http_error(e)
    except HTTPException:
        shutil.rmtree(job, ignore_errors=True)
        raise


@router.post("/model", response_model=CorrectionReport)
def correct_with_model(
    vocal: UploadFile = File(..., description="Vocal WAV"),
    backing: UploadFile = File(..., description="Backing track WAV"),
    net: AutotunerNet = Depends(get_model),
    audio_service: AudioService = Depends(get_audio_service),
    service: CorrectionService = Depends(get_correction_service),
):
    """Shift every note by the amount the network predicts from the backing track."""
    job = new_job_dir()
    try:
        vocal_path = save_upload(vocal, job, "vocal")
        backing_path = save_upload(backing, job, "backing")
        for path in (vocal_path, backing_path):
            check_duration(audio_service.load(path))
        return service.correct_with_model(vocal_path, backing_path, net, job / "corrected.wav")
    except DeeptuneError as e:
        logger.error(f"Model correction failed: {e}")
        shutil.rmtree(job, ignore_errors=True)
        raise http_error(e)
    except HTTPException:
        shutil.rmtree(job, ignore_errors=True)
        raise
