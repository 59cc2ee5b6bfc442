"""Schema lookup: bundled static documents first, then cache, then the registry.

Typical use::

    bundle = load_datatype("https://doi.org/21.T11969/b9335ce2c99ed87735a6")
    gc = bundle.group_comparison(label="t-test")
"""

from __future__ import annotations

import json
import logging
import os
import threading
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import requests

from dtforge.errors import (
    InvalidSchemaDocument,
    NetworkDisabled,
    RemoteError,
    ResolutionError,
    SchemaNotFound,
)
from dtforge.identifier import Registry, SchemaId, parse_schema_identifier
from dtforge.schema_model import SchemaBundle, SchemaDef, close_over, schema_from_document

logger = logging.getLogger(__name__)

OFFLINE_ENV = "DTFORGE_OFFLINE"

DEFAULT_ENDPOINTS: Mapping[Registry, str] = {
    Registry.EPIC: "https://doi.org",
    Registry.ORKG: "https://orkg.org/api",
}

# Translate a registry payload into a SchemaDef. The native document format is
# the default for both registries; real registry payloads plug in here.
Adapter = Callable[[Any], SchemaDef]
DEFAULT_ADAPTERS: Mapping[Registry, Adapter] = {
    Registry.EPIC: schema_from_document,
    Registry.ORKG: schema_from_document,
}


def offline_from_env(environ: Mapping[str, str] | None = None) -> bool:
    value = (os.environ if environ is None else environ).get(OFFLINE_ENV, "")
    return value.strip().lower() in ("1", "true", "yes", "on")


def default_bundle_dir() -> Path:
    return Path(str(resources.files("dtforge") / "schemata"))


@dataclass
class StoreConfig:
    bundle_dir: Path | None = None
    cache_dir: Path | None = None
    offline: bool = False
    registry_endpoints: dict[Registry, str] = field(default_factory=lambda: dict(DEFAULT_ENDPOINTS))
    adapters: dict[Registry, Adapter] = field(default_factory=lambda: dict(DEFAULT_ADAPTERS))
    timeout: float = 10.0

    @property
    def effective_offline(self) -> bool:
        return self.offline or offline_from_env()

    @property
    def effective_bundle_dir(self) -> Path:
        return Path(self.bundle_dir) if self.bundle_dir is not None else default_bundle_dir()


@dataclass(frozen=True)
class FetchStats:
    static_hits: int = 0
    cache_hits: int = 0
    remote_fetches: int = 0


def remote_url(sid: SchemaId, base_url: str) -> str:
    base = base_url.rstrip("/")
    if sid.registry is Registry.EPIC:
        return f"{base}/{sid.prefix}/{sid.suffix}"
    return f"{base}/template/{sid.suffix}"


class SchemaStore:
    """Resolves schema ids for one session.

    Static documents always win. Misses go to the in-memory cache, then the
    optional on-disk cache, then one remote request per id; the outcome of
    that request, success or failure, is remembered for the session.
    """

    def __init__(self, config: StoreConfig | None = None, session: requests.Session | None = None) -> None:
        self.config = config or StoreConfig()
        self._session = session
        self._static: dict[str, SchemaDef] | None = None
        self._memory: dict[SchemaId, SchemaDef] = {}
        self._failures: dict[SchemaId, ResolutionError] = {}
        self._lock = threading.Lock()
        self._id_locks: dict[SchemaId, threading.Lock] = {}
        self._static_hits = 0
        self._cache_hits = 0
        self._remote_fetches = 0

    @property
    def stats(self) -> FetchStats:
        with self._lock:
            return FetchStats(self._static_hits, self._cache_hits, self._remote_fetches)

    # static bundle

    def static_documents(self) -> dict[str, SchemaDef]:
        """All bundled schemata keyed by suffix (loaded once)."""
        with self._lock:
            if self._static is None:
                self._static = load_static_dir(self.config.effective_bundle_dir)
            return self._static

    def _from_static(self, sid: SchemaId) -> SchemaDef | None:
        found = self.static_documents().get(sid.suffix)
        if found is not None and found.id == sid:
            return found
        return None

    # cache

    def _cache_path(self, sid: SchemaId) -> Path | None:
        if self.config.cache_dir is None or "/" in sid.suffix:
            return None
        return Path(self.config.cache_dir) / f"{sid.suffix}.json"

    def _from_disk(self, sid: SchemaId) -> SchemaDef | None:
        path = self._cache_path(sid)
        if path is None or not path.is_file():
            return None
        try:
            schema = schema_from_document(json.loads(path.read_text(encoding="utf-8")))
        except (OSError, ValueError) as exc:
            logger.warning("ignoring unreadable cache entry %s: %s", path, exc)
            return None
        return schema if schema.id == sid else None

    def _to_disk(self, sid: SchemaId, raw: bytes) -> None:
        path = self._cache_path(sid)
        if path is None:
            return
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".json.tmp")
            tmp.write_bytes(raw)
            tmp.replace(path)
        except OSError as exc:
            logger.warning("cannot write cache entry %s: %s", path, exc)

    # remote

    def _fetch(self, sid: SchemaId) -> SchemaDef:
        base = self.config.registry_endpoints.get(sid.registry)
        if base is None:
            raise RemoteError(f"no endpoint configured for registry {sid.registry.value}")
        url = remote_url(sid, base)
        with self._lock:
            self._remote_fetches += 1
        session = self._session or requests
        try:
            resp = session.get(url, headers={"Accept": "application/json"}, timeout=self.config.timeout)
        except requests.RequestException as exc:
            raise RemoteError(f"transport error fetching {url}: {exc}") from exc
        if resp.status_code == 404:
            raise SchemaNotFound(f"schema {sid.suffix} not found at {url}")
        if resp.status_code != 200:
            raise RemoteError(f"transport error fetching {url}: HTTP {resp.status_code}")
        adapter = self.config.adapters.get(sid.registry, schema_from_document)
        try:
            schema = adapter(json.loads(resp.content.decode("utf-8")))
        except (ValueError, InvalidSchemaDocument) as exc:
            raise RemoteError(f"malformed document from {url}: {exc}") from exc
        if schema.id != sid:
            raise RemoteError(f"malformed document from {url}: pid {schema.id} does not match {sid}")
        self._to_disk(sid, resp.content)
        return schema

    def get_schema(self, sid: SchemaId) -> SchemaDef:
        """Return the SchemaDef for ``sid``.

        Raises:
            SchemaNotFound: no source knows the id.
            NetworkDisabled: a remote fetch is needed but the store is offline.
            RemoteError: the fetch failed in transport or returned a malformed document.
        """
        found = self._from_static(sid)
        if found is not None:
            with self._lock:
                self._static_hits += 1
            return found

        with self._lock:
            id_lock = self._id_locks.setdefault(sid, threading.Lock())
        with id_lock:
            with self._lock:
                cached = self._memory.get(sid)
                failure = self._failures.get(sid)
                if cached is not None:
                    self._cache_hits += 1
                    return cached
            if failure is not None:
                raise failure
            on_disk = self._from_disk(sid)
            if on_disk is not None:
                with self._lock:
                    self._memory[sid] = on_disk
                    self._cache_hits += 1
                return on_disk
            if self.config.effective_offline:
                raise NetworkDisabled(f"schema {sid.suffix} is not bundled and the store is offline")
            try:
                schema = self._fetch(sid)
            except (SchemaNotFound, RemoteError) as exc:
                with self._lock:
                    self._failures[sid] = exc
                raise
            with self._lock:
                self._memory[sid] = schema
            return schema

    def load_datatype(self, url: str) -> SchemaBundle:
        root = self.get_schema(parse_schema_identifier(url))
        return close_over(root, self.get_schema)

    def find_constructor(self, name: str) -> SchemaDef | None:
        """Find a bundled schema by constructor name."""
        for schema in self.static_documents().values():
            if schema.constructor_name == name:
                return schema
        return None


def load_static_dir(directory: Path) -> dict[str, SchemaDef]:
    """Read every ``<suffix>.json`` document in ``directory``."""
    out: dict[str, SchemaDef] = {}
    if not directory.is_dir():
        logger.warning("static bundle directory %s does not exist", directory)
        return out
    for path in sorted(directory.glob("*.json")):
        try:
            schema = schema_from_document(json.loads(path.read_text(encoding="utf-8")))
        except (OSError, ValueError) as exc:
            raise InvalidSchemaDocument(f"{path}: {exc}") from exc
        if schema.id.suffix != path.stem:
            raise InvalidSchemaDocument(f"{path}: file name does not match pid suffix {schema.id.suffix!r}")
        out[schema.id.suffix] = schema
    return out


_default_store: SchemaStore | None = None
_default_lock = threading.Lock()


def default_store() -> SchemaStore:
    global _default_store
    with _default_lock:
        if _default_store is None:
            _default_store = SchemaStore()
        return _default_store


def get_schema(sid: SchemaId, cfg: StoreConfig | None = None) -> SchemaDef:
    store = default_store() if cfg is None else SchemaStore(cfg)
    return store.get_schema(sid)


def load_datatype(url: str, cfg: StoreConfig | None = None) -> SchemaBundle:
    """Load the schema at ``url`` and every schema nested inside it.

    Without ``cfg`` a process-wide store is used, so remote results are
    cached across calls.
    """
    store = default_store() if cfg is None else SchemaStore(cfg)
    return store.load_datatype(url)
