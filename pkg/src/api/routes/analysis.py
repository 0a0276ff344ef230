"""
Pitch analysis endpoints for the deeptune API.
"""

import json
import logging
import shutil
from typing import List

from fastapi import APIRouter, Depends, File, Form, HTTPException, UploadFile, status

from src.api.dependencies import (
    check_duration,
    get_audio_service,
    get_pitch_service,
    http_error,
    new_job_dir,
    save_upload,
)
from src.core.exceptions import DeeptuneError
from src.models.schemas import DeviationStats, PitchAnalysisResponse
from src.services.audio.service import AudioService
from src.services.pipeline.stats import deviation_stats
from src.services.pitch.service import PitchService

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/analysis", tags=["analysis"])


def _parse_reference(reference: str) -> List[float]:
    try:
        values = json.loads(reference)
    except json.JSONDecodeError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=f"reference is not JSON: {e}")
    if not isinstance(values, list) or not all(isinstance(v, (int, float)) for v in values):
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail="reference must be a list of MIDI pitches")
    return values


@router.post("/pitch", response_model=PitchAnalysisResponse)
def analyze_pitch(
    vocal: UploadFile = File(..., description="Mono or stereo WAV"),
    audio_service: AudioService = Depends(get_audio_service),
    pitch_service: PitchService = Depends(get_pitch_service),
):
    """Track f0 and segment notes in an uploaded vocal."""
    job = new_job_dir()
    try:
        audio = audio_service.load(save_upload(vocal, job, "vocal"))
        check_duration(audio)
        track, notes = pitch_service.analyze(audio)
        return PitchAnalysisResponse(
            duration_s=audio.duration,
            n_frames=len(track),
            voiced_fraction=float(track.voiced.mean()),
            notes=notes,
        )
    except DeeptuneError as e:
        logger.error(f"Pitch analysis failed: {e}")
        raise http_error(e)
    finally:
        shutil.rmtree(job, ignore_errors=True)


@router.post("/deviation", response_model=DeviationStats)
def analyze_deviation(
    vocal: UploadFile = File(..., description="Sung performance WAV"),
    reference: str = Form(..., description="JSON list of intended MIDI pitches, one per note"),
    audio_service: AudioService = Depends(get_audio_service),
    pitch_service: PitchService = Depends(get_pitch_service),
):
    """Cent deviations of the sung notes from a reference melody."""
    melody = _parse_reference(reference)
    job = new_job_dir()
    try:
        audio = audio_service.load(save_upload(vocal, job, "vocal"))
        check_duration(audio)
        track, notes = pitch_service.analyze(audio)
        return deviation_stats(track, notes, melody)
    except DeeptuneError as e:
        logger.error(f"Deviation analysis failed: {e}")
        raise http_error(e)
    finally:
        shutil.rmtree(job, ignore_errors=True)
