"""Settings loading and the exception hierarchy."""

import logging

import pytest
import structlog
from pydantic import ValidationError

from fracpoisson.config import configure_logging, get_settings, initialize_settings, override_settings
from fracpoisson.errors import (
    ConditionC1Error,
    DomainError,
    InputError,
    InsufficientReplicationsError,
    NetProfitConditionError,
    NumericalError,
    SeriesRangeError,
    exit_code_for,
)


def test_defaults():
    settings = get_settings()
    assert settings.ml_series_guard == 100.0
    assert settings.tail_nats == 40.0
    assert settings.default_seed == 20240101
    assert settings.workers == 1


def test_environment_override(monkeypatch):
    monkeypatch.setenv("FRACPOISSON_TAIL_NATS", "25")
    monkeypatch.setenv("FRACPOISSON_MC_CHUNK_SIZE", "128")
    settings = override_settings()
    assert settings.tail_nats == 25.0
    assert settings.mc_chunk_size == 128


def test_settings_are_frozen():
    with pytest.raises(ValidationError):
        get_settings().workers = 4


def test_logging_goes_through_structlog_only(capsys):
    handlers = list(logging.getLogger().handlers)
    configure_logging("INFO")
    log = structlog.get_logger("fracpoisson.test")
    log.info("chunk_done", chunk=3)
    log.debug("hidden_event")
    err = capsys.readouterr().err
    assert "chunk_done" in err
    assert "chunk=3" in err
    assert "hidden_event" not in err
    assert logging.getLogger().handlers == handlers
    configure_logging()


def test_validation():
    with pytest.raises(ValidationError):
        override_settings(workers=0)
    with pytest.raises(ValidationError):
        initialize_settings(halfnormal_split_quantile=1.5)


def test_string_values_are_coerced():
    assert initialize_settings(mc_chunk_size="64").mc_chunk_size == 64


def test_diagnostics_travel_with_errors():
    error = NumericalError("did not converge", theta=1.5)
    assert error.diagnostics == {"theta": 1.5}
    assert str(error) == "did not converge"


@pytest.mark.parametrize(
    "exc,code",
    [
        (InputError("bad"), 2),
        (DomainError("bad"), 3),
        (SeriesRangeError("bad"), 3),
        (ConditionC1Error("bad"), 3),
        (NetProfitConditionError("bad"), 3),
        (InsufficientReplicationsError("bad"), 4),
        (RuntimeError("bad"), 3),
    ],
)
def test_exit_codes(exc, code):
    assert exit_code_for(exc) == code


def test_exit_code_default():
    assert exit_code_for(KeyError("x"), default=1) == 1
