"""
Tests for the pitch analysis endpoints.
"""

import pytest
from fastapi.testclient import TestClient

from src.core.config import settings


def test_pitch_analysis(client: TestClient, vocal_upload, work_dir):
    response = client.post("/api/v1/analysis/pitch", files={"vocal": vocal_upload})

    assert response.status_code == 200
    data = response.json()
    assert data["duration_s"] == pytest.approx(1.4, abs=0.01)
    assert 0.5 < data["voiced_fraction"] < 0.9
    assert len(data["notes"]) == 1
    assert data["notes"][0]["median_f0"] == pytest.approx(450.0, rel=0.01)
    assert list(work_dir.iterdir()) == []


def test_deviation_from_reference(client: TestClient, vocal_upload):
    response = client.post("/api/v1/analysis/deviation", files={"vocal": vocal_upload}, data={"reference": "[69]"})

    assert response.status_code == 200
    data = response.json()
    assert data["deviations"][0] == pytest.approx(38.9, abs=5.0)
    assert data["median_defined"] is True


def test_reference_must_be_a_pitch_list(client: TestClient, vocal_upload):
    response = client.post("/api/v1/analysis/deviation", files={"vocal": vocal_upload}, data={"reference": "A4"})
    assert response.status_code == 400

    response = client.post("/api/v1/analysis/deviation", files={"vocal": vocal_upload}, data={"reference": "[69, 71]"})
    assert response.status_code == 422


def test_unreadable_upload(client: TestClient):
    response = client.post("/api/v1/analysis/pitch", files={"vocal": ("vocal.wav", b"not audio", "audio/wav")})
    assert response.status_code == 400


def test_upload_too_long(client: TestClient, vocal_upload, monkeypatch):
    monkeypatch.setattr(settings, "MAX_UPLOAD_SECONDS", 0.5)
    response = client.post("/api/v1/analysis/pitch", files={"vocal": vocal_upload})
    assert response.status_code == 413
