"""Registry monitoring client: recent-release feeds and archive fetching.

Polls the public PyPI RSS updates feed and the NPM changes endpoint, follows
up with per-package metadata requests to obtain archive URLs, deduplicates by
(name, version) and sorts by publish time.  All endpoints are configurable so
tests replay fixtures from a local server; requests are rate-limited per host
and retried with exponential backoff.  HTTPS only, except loopback hosts
(fixture servers).  Standard proxy environment variables are honored.
"""

from __future__ import annotations

import email.utils
import hashlib
import json
import threading
import time
import urllib.error
import urllib.parse
import urllib.request
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path, PurePosixPath

from .errors import ArchiveTooLarge, FeedUnparseable, NetworkFailure, NotFound
from .model import DEFAULT_SIZE_CAP, Ecosystem

_LOOPBACK_HOSTS = {"localhost", "127.0.0.1", "::1"}
_ARCHIVE_SUFFIXES = (".tar.gz", ".tgz", ".zip", ".whl", ".tar")


@dataclass(frozen=True)
class ReleaseEvent:
    ecosystem: Ecosystem
    name: str
    version: str
    published_at: datetime  # UTC
    archive_url: str


@dataclass
class RegistryConfig:
    pypi_feed_url: str = "https://pypi.org/rss/updates.xml"
    pypi_project_url: str = "https://pypi.org/pypi/{name}/{version}/json"
    npm_feed_url: str = "https://replicate.npmjs.com/_changes?descending=true&limit={limit}"
    npm_package_url: str = "https://registry.npmjs.org/{name}"
    min_request_interval: float = 0.5  # seconds, per host
    retries: int = 3
    backoff_base: float = 0.5
    timeout: float = 10.0
    size_cap: int = DEFAULT_SIZE_CAP


class RateLimiter:
    """Minimum-interval gate per host, safe under concurrent fetches."""

    def __init__(self, min_interval: float) -> None:
        self.min_interval = min_interval
        self._last: dict[str, float] = {}
        self._lock = threading.Lock()

    def wait(self, host: str) -> None:
        while True:
            with self._lock:
                now = time.monotonic()
                last = self._last.get(host, 0.0)
                delay = self.min_interval - (now - last)
                if delay <= 0:
                    self._last[host] = now
                    return
            time.sleep(delay)


def _check_scheme(url: str) -> None:
    parsed = urllib.parse.urlsplit(url)
    if parsed.scheme == "https":
        return
    if parsed.scheme == "http" and parsed.hostname in _LOOPBACK_HOSTS:
        return  # local fixture servers
    raise NetworkFailure(f"refusing non-https URL: {url}")


def _request(url: str, config: RegistryConfig, limiter: RateLimiter | None) -> bytes:
    """GET with retries and exponential backoff."""
    _check_scheme(url)
    host = urllib.parse.urlsplit(url).netloc
    last_error: Exception | None = None
    for attempt in range(config.retries):
        if limiter is not None:
            limiter.wait(host)
        try:
            req = urllib.request.Request(url, headers={"User-Agent": "seqscan/0.1"})
            with urllib.request.urlopen(req, timeout=config.timeout) as response:
                return response.read()
        except urllib.error.HTTPError as exc:
            if exc.code == 404:
                raise NotFound(url) from exc
            last_error = exc
        except (urllib.error.URLError, OSError, TimeoutError) as exc:
            last_error = exc
        if attempt < config.retries - 1:
            time.sleep(config.backoff_base * (2 ** attempt))
    raise NetworkFailure(f"GET {url} failed after {config.retries} attempts: {last_error}")


def _parse_rfc3339(text: str) -> datetime:
    stamp = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp.astimezone(timezone.utc)


def _list_pypi(since: datetime, limit: int, config: RegistryConfig,
               limiter: RateLimiter) -> list[ReleaseEvent]:
    body = _request(config.pypi_feed_url, config, limiter)
    try:
        root = ET.fromstring(body)
        items = root.findall(".//item")
    except ET.ParseError as exc:
        raise FeedUnparseable(f"pypi feed: {exc}") from exc

    candidates: list[tuple[str, str, datetime]] = []
    for item in items:
        title = (item.findtext("title") or "").strip()
        pub = (item.findtext("pubDate") or "").strip()
        if " " not in title or not pub:
            continue
        name, _, version = title.rpartition(" ")
        try:
            published = email.utils.parsedate_to_datetime(pub).astimezone(timezone.utc)
        except (TypeError, ValueError):
            continue
        if published <= since:
            continue
        candidates.append((name, version, published))

    candidates.sort(key=lambda c: c[2])
    events: list[ReleaseEvent] = []
    seen: set[tuple[str, str]] = set()
    for name, version, published in candidates:
        if (name, version) in seen:
            continue
        seen.add((name, version))
        meta_url = config.pypi_project_url.format(name=urllib.parse.quote(name),
                                                  version=urllib.parse.quote(version))
        try:
            meta = json.loads(_request(meta_url, config, limiter))
        except (NotFound, ValueError):
            continue  # removed before we could look: skip at listing stage
        url = _pick_pypi_archive(meta)
        if url is None:
            continue
        events.append(ReleaseEvent(Ecosystem.PYPI, name, version, published, url))
        if len(events) >= limit:
            break
    return events


def _pick_pypi_archive(meta: dict) -> str | None:
    urls = meta.get("urls")
    if not isinstance(urls, list):
        return None
    sdists = [u for u in urls if isinstance(u, dict) and u.get("packagetype") == "sdist"]
    chosen = (sdists or [u for u in urls if isinstance(u, dict)])
    for entry in chosen:
        if isinstance(entry.get("url"), str):
            return entry["url"]
    return None


def _list_npm(since: datetime, limit: int, config: RegistryConfig,
              limiter: RateLimiter) -> list[ReleaseEvent]:
    feed_url = config.npm_feed_url.format(limit=max(limit * 4, 50))
    body = _request(feed_url, config, limiter)
    try:
        feed = json.loads(body)
        results = feed["results"]
    except (ValueError, KeyError, TypeError) as exc:
        raise FeedUnparseable(f"npm feed: {exc}") from exc

    names: list[str] = []
    for row in results:
        name = row.get("id") if isinstance(row, dict) else None
        if isinstance(name, str) and not name.startswith("_") and name not in names:
            names.append(name)

    candidates: list[ReleaseEvent] = []
    for name in names:
        meta_url = config.npm_package_url.format(name=urllib.parse.quote(name, safe="@/"))
        try:
            meta = json.loads(_request(meta_url, config, limiter))
        except (NotFound, ValueError):
            continue
        version = (meta.get("dist-tags") or {}).get("latest")
        if not isinstance(version, str):
            continue
        stamp = (meta.get("time") or {}).get(version)
        tarball = ((meta.get("versions") or {}).get(version, {}).get("dist") or {}).get("tarball")
        if not isinstance(stamp, str) or not isinstance(tarball, str):
            continue
        try:
            published = _parse_rfc3339(stamp)
        except ValueError:
            continue
        if published <= since:
            continue
        candidates.append(ReleaseEvent(Ecosystem.NPM, name, version, published, tarball))

    candidates.sort(key=lambda e: e.published_at)
    events: list[ReleaseEvent] = []
    seen: set[tuple[str, str]] = set()
    for event in candidates:
        if (event.name, event.version) in seen:
            continue
        seen.add((event.name, event.version))
        events.append(event)
        if len(events) >= limit:
            break
    return events


def list_recent(ecosystem: Ecosystem, since: datetime, limit: int = 50,
                config: RegistryConfig | None = None,
                limiter: RateLimiter | None = None) -> list[ReleaseEvent]:
    """Newly published versions after `since`, ascending by publish time,
    deduplicated by (name, version)."""
    config = config or RegistryConfig()
    limiter = limiter or RateLimiter(config.min_request_interval)
    if since.tzinfo is None:
        since = since.replace(tzinfo=timezone.utc)
    if ecosystem is Ecosystem.PYPI:
        return _list_pypi(since, limit, config, limiter)
    return _list_npm(since, limit, config, limiter)


@dataclass(frozen=True)
class FetchedArchive:
    path: Path
    sha256: str
    size: int


def fetch_archive(event: ReleaseEvent, dest_dir: str | Path,
                  config: RegistryConfig | None = None,
                  limiter: RateLimiter | None = None) -> FetchedArchive:
    """Download the release archive to dest_dir/<name>-<version>.<ext>.

    Enforces the size cap while streaming (no partial file is left behind)
    and records the checksum of the bytes written.
    """
    config = config or RegistryConfig()
    limiter = limiter or RateLimiter(config.min_request_interval)
    dest_dir = Path(dest_dir)
    dest_dir.mkdir(parents=True, exist_ok=True)

    url = event.archive_url
    _check_scheme(url)
    url_name = PurePosixPath(urllib.parse.urlsplit(url).path).name
    ext = next((s for s in _ARCHIVE_SUFFIXES if url_name.endswith(s)), ".tar.gz")
    safe_name = event.name.replace("/", "_")
    target = dest_dir / f"{safe_name}-{event.version}{ext}"
    host = urllib.parse.urlsplit(url).netloc

    last_error: Exception | None = None
    for attempt in range(config.retries):
        limiter.wait(host)
        digest = hashlib.sha256()
        written = 0
        try:
            req = urllib.request.Request(url, headers={"User-Agent": "seqscan/0.1"})
            # each attempt re-truncates the target: no stale partial bytes
            with urllib.request.urlopen(req, timeout=config.timeout) as response, \
                    open(target, "wb") as out:
                while True:
                    chunk = response.read(65536)
                    if not chunk:
                        break
                    written += len(chunk)
                    if written > config.size_cap:
                        raise ArchiveTooLarge(
                            f"{url} exceeds {config.size_cap} bytes")
                    digest.update(chunk)
                    out.write(chunk)
            return FetchedArchive(path=target, sha256=digest.hexdigest(), size=written)
        except ArchiveTooLarge:
            target.unlink(missing_ok=True)
            raise
        except urllib.error.HTTPError as exc:
            if exc.code == 404:
                target.unlink(missing_ok=True)
                raise NotFound(url) from exc
            last_error = exc
        except (urllib.error.URLError, OSError, TimeoutError) as exc:
            last_error = exc
        if attempt < config.retries - 1:
            time.sleep(config.backoff_base * (2 ** attempt))
    target.unlink(missing_ok=True)
    raise NetworkFailure(f"GET {url} failed after {config.retries} attempts: {last_error}")
