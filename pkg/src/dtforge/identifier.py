"""Parse schema URLs into registry-routed identifiers."""

from __future__ import annotations

import enum
import re
from collections.abc import Mapping
from dataclasses import dataclass
from urllib.parse import urlsplit

from dtforge.errors import MalformedIdentifier, UnknownRegistry


class Registry(enum.Enum):
    EPIC = "epic"
    ORKG = "orkg"


# host -> registry; extend by passing a merged mapping to parse_schema_identifier
DEFAULT_ROUTES: Mapping[str, Registry] = {
    "doi.org": Registry.EPIC,
    "dx.doi.org": Registry.EPIC,
    "hdl.handle.net": Registry.EPIC,
    "orkg.org": Registry.ORKG,
    "www.orkg.org": Registry.ORKG,
    "incubating.orkg.org": Registry.ORKG,
}

ORKG_TEMPLATE_SEGMENT = "template"

_PREFIX_RE = re.compile(r"^[0-9]+(\.[0-9A-Za-z_-]+)*$")


@dataclass(frozen=True)
class SchemaId:
    registry: Registry
    prefix: str
    suffix: str

    def __post_init__(self) -> None:
        if not self.suffix:
            raise MalformedIdentifier("schema identifier suffix must be non-empty")
        if self.registry is Registry.EPIC and not self.prefix:
            raise MalformedIdentifier("ePIC identifiers need a handle prefix")

    @property
    def canonical_url(self) -> str:
        return canonicalize(self)

    def __str__(self) -> str:
        return self.canonical_url


def canonicalize(sid: SchemaId) -> str:
    if sid.registry is Registry.EPIC:
        return f"https://doi.org/{sid.prefix}/{sid.suffix}"
    return f"https://orkg.org/{ORKG_TEMPLATE_SEGMENT}/{sid.suffix}"


def parse_schema_identifier(url: str, routes: Mapping[str, Registry] | None = None) -> SchemaId:
    """Parse a schema URL such as ``https://doi.org/21.T11969/b9335ce2c99ed87735a6``.

    Scheme and host are matched case-insensitively; the handle prefix and
    suffix are kept verbatim. A single trailing slash is tolerated.

    Raises:
        MalformedIdentifier: the text is not an http(s) URL with a usable path.
        UnknownRegistry: the host is not listed in ``routes``.
    """
    routes = DEFAULT_ROUTES if routes is None else routes
    if not isinstance(url, str) or not url.strip():
        raise MalformedIdentifier("empty schema identifier")
    text = url.strip()
    try:
        parts = urlsplit(text)
        host = (parts.hostname or "").lower()
    except ValueError as exc:
        raise MalformedIdentifier(f"cannot parse {text!r}: {exc}") from None
    if parts.scheme.lower() not in ("http", "https") or not host:
        raise MalformedIdentifier(f"{text!r} is not an http(s) URL")
    if parts.query or parts.fragment:
        raise MalformedIdentifier(f"{text!r} carries a query or fragment")

    registry = routes.get(host)
    if registry is None:
        raise UnknownRegistry(f"no registry is routed for host {host!r}")

    path = parts.path
    if path.endswith("/"):
        path = path[:-1]
    segments = path.lstrip("/").split("/", 1)

    if registry is Registry.EPIC:
        if len(segments) != 2 or not segments[0] or not segments[1]:
            raise MalformedIdentifier(f"{text!r} has no <prefix>/<suffix> handle path")
        prefix, suffix = segments
        if "" in suffix.split("/"):
            raise MalformedIdentifier(f"{text!r} has empty path segments")
        if not _PREFIX_RE.match(prefix):
            raise MalformedIdentifier(f"{prefix!r} is not a handle prefix")
        return SchemaId(registry, prefix, suffix)

    if len(segments) != 2 or segments[0] not in (ORKG_TEMPLATE_SEGMENT, "templates") or not segments[1]:
        raise MalformedIdentifier(f"{text!r} is not an ORKG template URL")
    if "/" in segments[1]:
        raise MalformedIdentifier(f"{text!r} has extra path segments after the template id")
    return SchemaId(registry, "", segments[1])
