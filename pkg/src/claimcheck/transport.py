"""Minimal JSON-over-HTTP POST with bounded retries.

Shared by the embedding client and the chat gateway. Retries transport
failures, 429, and 5xx with exponential backoff (3 attempts, starting at
250 ms); any other 4xx is non-retryable and raises immediately.
"""

from __future__ import annotations

import time
from typing import Any, Callable, Mapping

import requests

DEFAULT_ATTEMPTS = 3
DEFAULT_BACKOFF = 0.25


class TransportError(RuntimeError):
    """Transport-level failure after all retry attempts."""


class HttpStatusError(RuntimeError):
    """Non-retryable HTTP status (4xx other than 429)."""

    def __init__(self, status: int, body: str):
        super().__init__(f"HTTP {status}: {body[:200]}")
        self.status = status


def post_json(
    url: str,
    payload: Mapping[str, Any],
    timeout: float = 30.0,
    headers: Mapping[str, str] | None = None,
    attempts: int = DEFAULT_ATTEMPTS,
    backoff: float = DEFAULT_BACKOFF,
    session: Any | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> dict:
    """POST a JSON payload and return the decoded JSON response body."""
    client = session if session is not None else requests
    last_error: Exception | None = None
    for attempt in range(attempts):
        if attempt:
            sleep(backoff * (2 ** (attempt - 1)))
        try:
            response = client.post(url, json=dict(payload), timeout=timeout, headers=headers)
        except requests.RequestException as exc:
            last_error = exc
            continue
        status = response.status_code
        if status == 429 or status >= 500:
            last_error = HttpStatusError(status, response.text)
            continue
        if status >= 400:
            raise HttpStatusError(status, response.text)
        return response.json()
    raise TransportError(f"POST {url} failed after {attempts} attempts: {last_error}")
