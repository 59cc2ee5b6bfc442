"""Consumer-side checks on emitted JSON-LD documents."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from typing import Any

CONTEXT_CLOSURE = "context-closure"
UNKNOWN_TYPE = "unknown-type"
MISSING_TYPE = "missing-type"
TABLE_ARITY = "table-arity"
STRUCTURE = "structure"


@dataclass(frozen=True)
class Finding:
    code: str
    pointer: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.pointer or '/'}: {self.message}"


def _escape(token: str) -> str:
    return token.replace("~", "~0").replace("/", "~1")


class _Walker:
    def __init__(self, context: dict[str, Any], known_types: set[str]) -> None:
        self.context = context
        self.known_types = known_types
        self.used: set[str] = set()
        self.findings: list[Finding] = []

    def add(self, code: str, pointer: str, message: str) -> None:
        self.findings.append(Finding(code, pointer, message))

    def node(self, node: dict[str, Any], pointer: str) -> None:
        if set(node) == {"@id"}:
            return
        node_type = node.get("@type")
        if node_type is None:
            self.add(MISSING_TYPE, pointer, "node has no @type")
        elif node_type not in self.known_types:
            self.add(UNKNOWN_TYPE, pointer, f"{node_type!r} is not a known schema")
        for key, value in node.items():
            if key.startswith("@"):
                continue
            where = f"{pointer}/{_escape(key)}"
            self.used.add(key)
            if key not in self.context:
                self.add(CONTEXT_CLOSURE, where, f"term {key!r} is missing from @context")
            self.value(value, where)
        if isinstance(node.get("columns"), list) and isinstance(node.get("rows"), list):
            self.table(node, pointer)

    def value(self, value: Any, pointer: str) -> None:
        if isinstance(value, dict):
            self.node(value, pointer)
        elif isinstance(value, list):
            for i, item in enumerate(value):
                self.value(item, f"{pointer}/{i}")

    def table(self, node: dict[str, Any], pointer: str) -> None:
        names = [c.get("name") if isinstance(c, dict) else None for c in node["columns"]]
        for i, row in enumerate(node["rows"]):
            where = f"{pointer}/rows/{i}"
            if not isinstance(row, list) or len(row) != len(names):
                got = len(row) if isinstance(row, list) else type(row).__name__
                self.add(TABLE_ARITY, where, f"row has {got} cells, expected {len(names)}")
                continue
            for j, (cell, name) in enumerate(zip(row, names)):
                if not isinstance(cell, dict) or cell.get("column") != name:
                    self.add(TABLE_ARITY, f"{where}/{j}", f"cell does not belong to column {name!r}")


def validate_document(data: Any, known_types: Iterable[str]) -> list[Finding]:
    """Check context closure, schema types and table arity; return all findings."""
    if not isinstance(data, dict):
        return [Finding(STRUCTURE, "", "document root must be a JSON object")]
    context = data.get("@context")
    if not isinstance(context, dict):
        return [Finding(STRUCTURE, "/@context", "@context must be an object")]
    walker = _Walker(context, set(known_types))
    for term, uri in context.items():
        if not isinstance(uri, str) or not uri:
            walker.add(STRUCTURE, f"/@context/{_escape(term)}", "context values must be URI text")
    body = {k: v for k, v in data.items() if k != "@context"}
    walker.node(body, "")
    for term in sorted(set(context) - walker.used):
        walker.add(CONTEXT_CLOSURE, f"/@context/{_escape(term)}", f"term {term!r} is never used")
    return walker.findings
