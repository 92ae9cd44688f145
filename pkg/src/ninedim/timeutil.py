"""Timestamp parsing and formatting.

Timestamps are UTC epoch seconds (float) internally; fixture files and
wire payloads use ISO-8601 strings.
"""

from __future__ import annotations

from datetime import datetime, timezone


def parse_timestamp(value) -> float:
    """Coerce an ISO-8601 string, datetime, or number to UTC epoch seconds."""
    if isinstance(value, bool):
        raise ValueError(f"not a timestamp: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, datetime):
        if value.tzinfo is None:
            value = value.replace(tzinfo=timezone.utc)
        return value.timestamp()
    if isinstance(value, str):
        text = value.strip()
        try:
            return float(text)
        except ValueError:
            pass
        if text.endswith("Z"):
            text = text[:-1] + "+00:00"
        # Date-only strings are midnight UTC.
        dt = datetime.fromisoformat(text)
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return dt.timestamp()
    raise ValueError(f"not a timestamp: {value!r}")


def format_timestamp(epoch_seconds: float) -> str:
    """Render epoch seconds as an ISO-8601 UTC string with a Z suffix."""
    dt = datetime.fromtimestamp(epoch_seconds, tz=timezone.utc)
    if dt.microsecond:
        return dt.strftime("%Y-%m-%dT%H:%M:%S.%f").rstrip("0") + "Z"
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


DAY_SECONDS = 86400.0
HOUR_SECONDS = 3600.0
