"""
Tests for pitch unit conversions and the cent form of the loss.
"""

import pytest

from src.core.exceptions import DomainError
from src.services.network.optim import cents_from_mse
from src.services.pitch.units import cents_between, hz_to_midi, midi_to_hz


def test_midi_a4_is_440():
    assert midi_to_hz(69) == pytest.approx(440.0)
    assert hz_to_midi(440.0) == pytest.approx(69.0)


def test_octave_is_1200_cents():
    assert cents_between(220.0, 440.0) == pytest.approx(1200.0)
    assert cents_between(440.0, 220.0) == pytest.approx(-1200.0)


def test_cents_between_450_and_440():
    assert cents_between(450.0, 440.0) == pytest.approx(-38.906, abs=1e-3)


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_non_positive_frequency_rejected(bad):
    with pytest.raises(DomainError):
        hz_to_midi(bad)
    with pytest.raises(DomainError):
        cents_between(bad, 440.0)


def test_cents_from_mse_matches_reported_error():
    cents = cents_from_mse(0.077)
    assert 27.7 <= cents <= 27.8
    assert round(cents) == 28
    assert cents_from_mse(0.0625) == 25.0


def test_cents_from_negative_mse_rejected():
    with pytest.raises(DomainError):
        cents_from_mse(-0.1)
