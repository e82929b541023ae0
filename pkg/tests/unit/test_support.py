"""
Unit tests for settings, memoization, error responses and log context.
"""

import logging

import pytest
from pydantic import ValidationError

from dslice.cache import Cache, get_lens_cache
from dslice.config import CAP_ENV_VAR, DEFAULT_ENUMERATION_CAP, Settings, get_settings, reset_settings, resolve_cap
from dslice.dinv import lens_d
from dslice.errors import (
    DsliceError,
    ErrorCode,
    ErrorDetail,
    GroupTooLargeError,
    MalformedRecordError,
    create_error_response,
)
from dslice.logging_config import CoverContextFilter, cover_context, get_logger


@pytest.mark.unit
class TestSettings:
    def test_defaults(self):
        settings = get_settings()
        assert settings.enumeration_cap == DEFAULT_ENUMERATION_CAP
        assert settings.sign == -1
        assert settings.conventions() == {"sign": -1, "require_lambda": False, "cap": DEFAULT_ENUMERATION_CAP}

    def test_cap_from_environment(self, monkeypatch):
        monkeypatch.setenv(CAP_ENV_VAR, "100")
        reset_settings()
        assert get_settings().enumeration_cap == 100
        assert resolve_cap(None) == 100
        assert resolve_cap(7) == 7

    def test_settings_cached(self, monkeypatch):
        first = get_settings()
        monkeypatch.setenv(CAP_ENV_VAR, "5")
        assert get_settings() is first

    def test_invalid_sign(self):
        with pytest.raises(ValidationError):
            Settings(sign=2)

    def test_invalid_cap(self):
        with pytest.raises(ValidationError):
            Settings(enumeration_cap=0)


@pytest.mark.unit
class TestCache:
    def test_memoize_counts(self):
        cache = Cache(name="test")
        calls = []

        @cache.memoize()
        def square(n):
            calls.append(n)
            return n * n

        assert square(4) == 16
        assert square(4) == 16
        assert calls == [4]
        stats = square.cache_stats()
        assert stats["hits"] == 1 and stats["misses"] == 1 and stats["entry_count"] == 1

        square.cache_invalidate()
        assert cache.stats()["entry_count"] == 0

    def test_get_set_invalidate(self):
        cache = Cache()
        cache.set(("k",), 3)
        assert cache.get(("k",)) == 3
        cache.invalidate(("k",))
        assert cache.get(("k",)) is None

    def test_lens_values_are_memoized(self):
        get_lens_cache().clear()
        first = lens_d(9, 2)
        assert lens_d(9, 2) is first
        assert get_lens_cache().stats()["hits"] >= 1


@pytest.mark.unit
class TestErrors:
    def test_error_codes(self):
        assert GroupTooLargeError("x").code is ErrorCode.GROUP_TOO_LARGE
        assert issubclass(MalformedRecordError, DsliceError)

    def test_response(self):
        error = MalformedRecordError("bad file", details=[ErrorDetail(field="knots.0", message="missing", code="SCHEMA")])
        response = error.to_response("check")
        assert response["success"] is False
        assert response["error"] == "MALFORMED_RECORD"
        assert response["command"] == "check"
        assert response["details"][0]["field"] == "knots.0"

    def test_response_without_details(self):
        response = create_error_response(ErrorCode.UNKNOWN_KNOT, "Knot 'K9' is not defined")
        assert response["details"] is None
        assert response["message"] == "Knot 'K9' is not defined"


@pytest.mark.unit
class TestLogContext:
    def test_prefix_inside_context(self):
        record = logging.LogRecord("dslice.test", logging.INFO, __file__, 1, "computing", None, None)
        with cover_context("K946", 3):
            CoverContextFilter().filter(record)
        assert record.msg == "[K946 q=3] computing"
        assert record.knot == "K946" and record.cover == 3

    def test_no_prefix_outside_context(self):
        record = logging.LogRecord("dslice.test", logging.INFO, __file__, 1, "computing", None, None)
        CoverContextFilter().filter(record)
        assert record.msg == "computing"
        assert record.cover == "-"

    def test_logger_gets_one_filter(self):
        logger = get_logger("dslice.test.filters")
        get_logger("dslice.test.filters")
        assert sum(isinstance(f, CoverContextFilter) for f in logger.filters) == 1

    def test_context_in_captured_logs(self, caplog):
        logger = get_logger("dslice.test.caplog")
        with caplog.at_level(logging.INFO, logger="dslice.test.caplog"):
            with cover_context("trefoil", 2):
                logger.info("scanning")
        assert "[trefoil q=2] scanning" in caplog.text
