"""Pluggable fetch transports.

Every fetch in the system goes through a :class:`Transport`, so crawls,
the validate command and the live-fetch API behave identically whether
they hit the network or replay a recorded fixture tree. One ``get()``
call is one logical fetch: redirect chains are followed internally (up
to the configured limit) and reported through ``final_url``.

Fixture layout (one directory per domain):

    <root>/<domain>/ads.txt        body served for /ads.txt
    <root>/<domain>/sellers.json   body served for /sellers.json
    <root>/<domain>/meta           optional JSON, per file kind:
                                   {"ads.txt": {"status": "TIMEOUT"},
                                    "sellers.json": {"redirect": "<url-or-domain>"}}

Content-type headers are never trusted (plenty of real files arrive as
octet-stream); bodies are sniffed and flagged NON_TEXT only when they
are overwhelmingly non-printable.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from urllib.parse import urlsplit


class TransportMode(str, Enum):
    LIVE = "LIVE"
    FIXTURE = "FIXTURE"


class FetchStatus(str, Enum):
    OK = "OK"
    NOT_FOUND = "NOT_FOUND"
    REDIRECTED = "REDIRECTED"
    TIMEOUT = "TIMEOUT"
    NETWORK_ERROR = "NETWORK_ERROR"
    NON_TEXT = "NON_TEXT"


_FORCEABLE = {s.value for s in FetchStatus if s not in (FetchStatus.OK, FetchStatus.REDIRECTED)}


@dataclass
class FetchOutcome:
    url: str
    status: FetchStatus
    final_url: str | None = None
    body: bytes | None = None
    fetched_at: datetime | None = None

    def __post_init__(self) -> None:
        if self.fetched_at is None:
            self.fetched_at = datetime.now(timezone.utc)

    @property
    def ok(self) -> bool:
        return self.status is FetchStatus.OK


def sniff_non_text(body: bytes) -> bool:
    """True when the body looks binary rather than text."""
    sample = body[:4096]
    if not sample:
        return False
    if b"\x00" in sample:
        return True
    suspicious = sum(1 for b in sample if (b < 32 and b not in (9, 10, 12, 13)) or b == 127)
    return suspicious / len(sample) > 0.30


class Transport:
    """Behavioral interface: one logical fetch per ``get`` call."""

    mode: TransportMode

    def get(self, url: str) -> FetchOutcome:  # pragma: no cover - interface
        raise NotImplementedError


def _split(url: str) -> tuple[str, str]:
    parts = urlsplit(url if "://" in url else f"https://{url}")
    host = (parts.hostname or "").lower()
    leaf = parts.path.rsplit("/", 1)[-1] or "ads.txt"
    return host, leaf


class FixtureTransport(Transport):
    """Replays a recorded directory tree; performs no network activity."""

    mode = TransportMode.FIXTURE

    def __init__(self, root: Path | str, max_redirects: int = 3):
        self.root = Path(root)
        self.max_redirects = max_redirects

    def _meta_for(self, host: str, leaf: str) -> dict:
        meta_path = self.root / host / "meta"
        if not meta_path.is_file():
            return {}
        try:
            meta = json.loads(meta_path.read_text())
        except (json.JSONDecodeError, OSError):
            return {}
        entry = meta.get(leaf, {})
        return entry if isinstance(entry, dict) else {}

    def get(self, url: str) -> FetchOutcome:
        host, leaf = _split(url)
        current_host, current_leaf = host, leaf
        hops = 0
        while True:
            meta = self._meta_for(current_host, current_leaf)
            forced = meta.get("status")
            if forced in _FORCEABLE:
                return FetchOutcome(url=url, status=FetchStatus(forced))
            redirect = meta.get("redirect")
            if redirect:
                hops += 1
                if hops > self.max_redirects:
                    return FetchOutcome(url=url, status=FetchStatus.REDIRECTED)
                current_host, current_leaf = _split(str(redirect))
                continue
            break

        final_url = f"https://{current_host}/{current_leaf}" if hops else None
        path = self.root / current_host / current_leaf
        if not path.is_file():
            return FetchOutcome(url=url, status=FetchStatus.NOT_FOUND, final_url=final_url)
        body = path.read_bytes()
        if sniff_non_text(body):
            return FetchOutcome(url=url, status=FetchStatus.NON_TEXT, final_url=final_url)
        return FetchOutcome(url=url, status=FetchStatus.OK, final_url=final_url, body=body)


class LiveTransport(Transport):
    """HTTP(S) transport with per-host politeness delay.

    HTTPS is tried first; connection-level failures fall back to plain
    HTTP once. Redirects are followed by the underlying session and
    surface through ``final_url``.
    """

    mode = TransportMode.LIVE

    def __init__(
        self,
        user_agent: str = "adaudit/0.1",
        timeout: float = 10.0,
        max_redirects: int = 3,
        per_host_delay: float = 0.0,
    ):
        self.user_agent = user_agent
        self.timeout = timeout
        self.max_redirects = max_redirects
        self.per_host_delay = per_host_delay
        self._local = threading.local()
        self._lock = threading.Lock()
        self._last_hit: dict[str, float] = {}

    def _session(self):
        import requests

        session = getattr(self._local, "session", None)
        if session is None:
            session = requests.Session()
            session.max_redirects = self.max_redirects
            session.headers["User-Agent"] = self.user_agent
            self._local.session = session
        return session

    def _be_polite(self, host: str) -> None:
        if self.per_host_delay <= 0:
            return
        with self._lock:
            now = time.monotonic()
            previous = self._last_hit.get(host)
            slot = now if previous is None else max(now, previous + self.per_host_delay)
            self._last_hit[host] = slot
        if slot > now:
            time.sleep(slot - now)

    def get(self, url: str) -> FetchOutcome:
        import requests

        host, _ = _split(url)
        self._be_polite(host)
        attempts = [url]
        if url.startswith("https://"):
            attempts.append("http://" + url[len("https://"):])
        last_error: FetchOutcome | None = None
        for attempt in attempts:
            try:
                response = self._session().get(attempt, timeout=self.timeout, allow_redirects=True)
            except requests.Timeout:
                return FetchOutcome(url=url, status=FetchStatus.TIMEOUT)
            except requests.TooManyRedirects:
                return FetchOutcome(url=url, status=FetchStatus.REDIRECTED)
            except requests.RequestException:
                last_error = FetchOutcome(url=url, status=FetchStatus.NETWORK_ERROR)
                continue
            final_url = response.url if response.url != attempt else None
            if response.status_code in (404, 410):
                return FetchOutcome(url=url, status=FetchStatus.NOT_FOUND, final_url=final_url)
            if response.status_code >= 400:
                return FetchOutcome(url=url, status=FetchStatus.NETWORK_ERROR, final_url=final_url)
            body = response.content
            if sniff_non_text(body):
                return FetchOutcome(url=url, status=FetchStatus.NON_TEXT, final_url=final_url)
            return FetchOutcome(url=url, status=FetchStatus.OK, final_url=final_url, body=body)
        return last_error or FetchOutcome(url=url, status=FetchStatus.NETWORK_ERROR)
