"""Deterministic JSON-LD output for instance trees.

Every instance becomes an embedded node carrying ``@type`` (the canonical
PID URL of its schema). A single ``@context`` on the root maps each field
name used anywhere in the tree to its property URI. Keys are ordered
``@context``, ``@type``, then field names in code-point order, and the text
form is UTF-8 JSON with two-space indentation and a trailing newline.
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from os import PathLike
from pathlib import Path
from typing import Any

from dtforge.errors import ContextCollision, CyclicInstance, IoError, SerializationError
from dtforge.instance import Instance, ResultTable, Uri
from dtforge.schema_model import FieldDescriptor, SchemaBundle, SchemaDef, TargetKind

logger = logging.getLogger(__name__)

TABLE_COLUMNS = "columns"
TABLE_ROWS = "rows"
COLUMN_NAME = "name"
COLUMN_INDEX = "index"
CELL_COLUMN = "column"
CELL_VALUE = "value"


@dataclass
class JsonLdDocument:
    context: dict[str, str] = field(default_factory=dict)
    body: dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"@context": {k: self.context[k] for k in sorted(self.context)}}
        out.update(self.body)
        return out

    def text(self) -> str:
        return canonical_text(self.as_dict())

    def __str__(self) -> str:
        return self.text()

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> JsonLdDocument:
        if not isinstance(data, Mapping):
            raise SerializationError("a JSON-LD document must be a JSON object")
        context = data.get("@context", {})
        if not isinstance(context, Mapping):
            raise SerializationError("@context must be an object of term -> URI")
        body = {k: v for k, v in data.items() if k != "@context"}
        return cls(dict(context), body)


def canonical_text(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _json_number(value: float) -> float | str:
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Inf" if value > 0 else "-Inf"
    return value


def _literal(value: Any) -> Any:
    if isinstance(value, float):
        return _json_number(value)
    return value


class _Context:
    def __init__(self) -> None:
        self.terms: dict[str, str] = {}
        self._warned: set[tuple[str, str]] = set()

    def add(self, schema: SchemaDef, fd: FieldDescriptor) -> None:
        uri = fd.property_uri
        if uri is None:
            uri = f"{schema.id.canonical_url}#{fd.name}"
            key = (schema.constructor_name, fd.name)
            if key not in self._warned:
                self._warned.add(key)
                logger.warning("%s.%s has no property_uri; using %s", schema.constructor_name, fd.name, uri)
        known = self.terms.get(fd.name)
        if known is not None and known != uri:
            raise ContextCollision(fd.name, known, uri)
        self.terms[fd.name] = uri


def _member_descriptor(schema: SchemaDef, name: str) -> FieldDescriptor:
    fd = schema.descriptor(name)
    if fd is None:
        raise SerializationError(f"table-support schema {schema.constructor_name} lacks field {name!r}")
    return fd


def _nested_schema(bundle: SchemaBundle, fd: FieldDescriptor) -> SchemaDef:
    if fd.target.kind is not TargetKind.NESTED:
        raise SerializationError(f"field {fd.name!r} must reference a nested schema")
    try:
        return bundle.by_id(fd.target.refs[0])
    except LookupError as exc:
        raise SerializationError(str(exc)) from None


def serialize_table(
    table: ResultTable,
    table_schema: SchemaDef,
    bundle: SchemaBundle,
    context: _Context | None = None,
) -> dict[str, Any]:
    """Render a result table as a typed node with column and cell nodes.

    Rows become arrays of cell nodes ``{"column": name, "value": cell}`` in
    column order; null cells keep their node.
    """
    ctx = context if context is not None else _Context()
    columns_fd = _member_descriptor(table_schema, TABLE_COLUMNS)
    rows_fd = _member_descriptor(table_schema, TABLE_ROWS)
    column_schema = _nested_schema(bundle, columns_fd)
    cell_schema = _nested_schema(bundle, rows_fd)
    name_fd = _member_descriptor(column_schema, COLUMN_NAME)
    index_fd = _member_descriptor(column_schema, COLUMN_INDEX)
    col_fd = _member_descriptor(cell_schema, CELL_COLUMN)
    value_fd = _member_descriptor(cell_schema, CELL_VALUE)
    # register only terms that appear, so the context stays closed for empty tables
    ctx.add(table_schema, columns_fd)
    ctx.add(table_schema, rows_fd)
    if table.columns:
        ctx.add(column_schema, index_fd)
        ctx.add(column_schema, name_fd)
    if table.columns and table.rows:
        ctx.add(cell_schema, col_fd)
        ctx.add(cell_schema, value_fd)

    column_type = column_schema.id.canonical_url
    cell_type = cell_schema.id.canonical_url
    return {
        "@type": table_schema.id.canonical_url,
        TABLE_COLUMNS: [
            {"@type": column_type, COLUMN_INDEX: i, COLUMN_NAME: name} for i, name in enumerate(table.columns)
        ],
        TABLE_ROWS: [
            [
                {"@type": cell_type, CELL_COLUMN: name, CELL_VALUE: _literal(cell)}
                for name, cell in zip(table.columns, row)
            ]
            for row in table.rows
        ],
    }


class _Builder:
    def __init__(self) -> None:
        self.context = _Context()
        self._path: list[int] = []

    def node(self, inst: Instance) -> dict[str, Any]:
        marker = id(inst)
        if marker in self._path:
            raise CyclicInstance(f"{inst.schema.constructor_name} instance contains itself")
        self._path.append(marker)
        try:
            schema = inst.schema
            out: dict[str, Any] = {"@type": schema.id.canonical_url}
            values = inst.values
            for name in sorted(values):
                fd = schema.descriptor(name)
                assert fd is not None
                self.context.add(schema, fd)
                value = values[name]
                if fd.repeatable:
                    items = value if isinstance(value, list) else [value]
                    out[name] = [self.value(inst, fd, v) for v in items]
                else:
                    out[name] = self.value(inst, fd, value)
            return out
        finally:
            self._path.pop()

    def value(self, owner: Instance, fd: FieldDescriptor, value: Any) -> Any:
        if isinstance(value, Instance):
            return self.node(value)
        if isinstance(value, Uri):
            return {"@id": value.value}
        if isinstance(value, ResultTable):
            try:
                table_schema = owner.bundle.by_id(fd.target.refs[0])
            except (LookupError, IndexError):
                raise SerializationError(f"no table schema available for {fd.name!r}") from None
            return serialize_table(value, table_schema, owner.bundle, self.context)
        return _literal(value)


def build_document(inst: Instance) -> JsonLdDocument:
    builder = _Builder()
    body = builder.node(inst)
    return JsonLdDocument(builder.context.terms, body)


def to_jsonld(inst: Instance) -> str:
    """Serialize an instance tree to its canonical JSON-LD text."""
    return build_document(inst).text()


def write_document(doc: JsonLdDocument | Mapping[str, Any] | str, path: str | PathLike[str]) -> None:
    if isinstance(doc, JsonLdDocument):
        text = doc.text()
    elif isinstance(doc, str):
        text = doc
    else:
        text = canonical_text(doc)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(exc.errno, f"cannot write {path}: {exc.strerror or exc}") from exc


def read_document(path: str | PathLike[str]) -> JsonLdDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(exc.errno, f"cannot read {path}: {exc.strerror or exc}") from exc
    return JsonLdDocument.from_dict(json.loads(text))
