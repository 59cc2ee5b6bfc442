"""Mutable, schema-bound instances and result tables."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Any, Union

from dtforge.errors import DuplicateColumn, RaggedRows, TypeMismatch, UnknownField
from dtforge.schema_model import FieldDescriptor, SchemaBundle, SchemaDef, TargetKind

Scalar = Union[str, int, float, bool]
Cell = Union[str, int, float, bool, None]


@dataclass(frozen=True)
class Uri:
    """A value that names a web resource rather than carrying literal text."""

    value: str

    def __post_init__(self) -> None:
        if not isinstance(self.value, str) or not self.value:
            raise TypeMismatch(f"Uri needs non-empty text, got {self.value!r}")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ResultTable:
    columns: tuple[str, ...]
    rows: tuple[tuple[Cell, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        seen: set[str] = set()
        for name in self.columns:
            if not isinstance(name, str) or not name:
                raise DuplicateColumn(f"column names must be non-empty text, got {name!r}")
            if name in seen:
                raise DuplicateColumn(f"duplicate column {name!r}")
            seen.add(name)
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise RaggedRows(f"row {i} has {len(row)} cells, expected {width}")
            for cell in row:
                if cell is not None and not isinstance(cell, (str, int, float, bool)):
                    raise TypeMismatch(f"row {i}: unsupported cell type {type(cell).__name__}")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.columns)

    @classmethod
    def from_frame(cls, frame: Any) -> ResultTable:
        """Convert a pandas-style data frame (``columns`` + ``itertuples``)."""
        columns = [str(c) for c in frame.columns]
        rows = []
        for row in frame.itertuples(index=False, name=None):
            rows.append(tuple(_plain_cell(v) for v in row))
        return cls(tuple(columns), tuple(rows))


def _plain_cell(value: Any) -> Cell:
    if value is None or isinstance(value, (str, bool, int, float)):
        return value
    item = getattr(value, "item", None)
    if callable(item):
        return item()
    return value


def table_from_rows(columns: Sequence[str], rows: Sequence[Sequence[Cell]]) -> ResultTable:
    return ResultTable(tuple(columns), tuple(tuple(r) for r in rows))


def _is_scalar(value: Any) -> bool:
    return isinstance(value, (str, int, float, bool))


def _check_single(owner: SchemaDef, fd: FieldDescriptor, value: Any) -> None:
    kind = fd.target.kind
    where = f"{owner.constructor_name}.{fd.name}"
    if kind is TargetKind.NESTED:
        if isinstance(value, Uri):
            return
        if not isinstance(value, Instance):
            raise TypeMismatch(f"{where} expects a nested instance, got {type(value).__name__}")
        if value.schema.id not in fd.target.refs:
            raise TypeMismatch(
                f"{where} expects {' or '.join(r.canonical_url for r in fd.target.refs)}, "
                f"got {value.schema.constructor_name} ({value.schema.id.canonical_url})"
            )
        return
    if kind is TargetKind.TABLE:
        if not isinstance(value, ResultTable):
            raise TypeMismatch(f"{where} expects a ResultTable, got {type(value).__name__}")
        return
    if isinstance(value, ResultTable):
        raise TypeMismatch(f"{where} is a {kind.value} field and cannot hold a table")
    if isinstance(value, Instance):
        raise TypeMismatch(f"{where} is a {kind.value} field and cannot hold a nested instance")
    if isinstance(value, Uri) or _is_scalar(value):
        return
    raise TypeMismatch(f"{where}: unsupported value type {type(value).__name__}")


def check_value(owner: SchemaDef, fd: FieldDescriptor, value: Any) -> None:
    """Raise TypeMismatch unless ``value`` may be stored in field ``fd``."""
    if isinstance(value, (list, tuple)):
        if not fd.repeatable:
            raise TypeMismatch(f"{owner.constructor_name}.{fd.name} is not repeatable; got a list")
        for item in value:
            _check_single(owner, fd, item)
        return
    _check_single(owner, fd, value)


class Instance:
    """A mutable record bound to one schema.

    Fields read and write as attributes; unset fields read as None, and
    assigning None clears a field.
    """

    __slots__ = ("_bundle", "_schema", "_values")

    def __init__(self, bundle: SchemaBundle, schema: SchemaDef, assignments: Mapping[str, Any] | None = None) -> None:
        object.__setattr__(self, "_bundle", bundle)
        object.__setattr__(self, "_schema", schema)
        object.__setattr__(self, "_values", {})
        for name, value in (assignments or {}).items():
            self.set_field(name, value)

    @property
    def schema(self) -> SchemaDef:
        return self._schema

    @property
    def bundle(self) -> SchemaBundle:
        return self._bundle

    @property
    def prop_list(self) -> list[str]:
        return self._schema.field_names

    @property
    def values(self) -> dict[str, Any]:
        """Snapshot of the set fields (shallow copy)."""
        return dict(self._values)

    def _descriptor(self, name: str) -> FieldDescriptor:
        fd = self._schema.descriptor(name)
        if fd is None:
            raise UnknownField(name, self._schema.constructor_name, self._schema.field_names)
        return fd

    def get_field(self, name: str) -> Any:
        self._descriptor(name)
        return self._values.get(name)

    def set_field(self, name: str, value: Any) -> None:
        fd = self._descriptor(name)
        if value is None:
            self._values.pop(name, None)
            return
        check_value(self._schema, fd, value)
        if isinstance(value, tuple):
            value = list(value)
        self._values[name] = value

    def __getattr__(self, name: str) -> Any:
        if name.startswith("__"):
            raise AttributeError(name)
        return self.get_field(name)

    def __setattr__(self, name: str, value: Any) -> None:
        self.set_field(name, value)

    def __delattr__(self, name: str) -> None:
        self.set_field(name, None)

    def __dir__(self) -> list[str]:
        return sorted(set(super().__dir__()) | set(self.prop_list))

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={_short(v)}" for k, v in self._values.items())
        return f"{self._schema.constructor_name}({inner})"


def _short(value: Any) -> str:
    if isinstance(value, Instance):
        return f"<{value.schema.constructor_name}>"
    if isinstance(value, ResultTable):
        return f"<table {value.shape[0]}x{value.shape[1]}>"
    if isinstance(value, list):
        return "[" + ", ".join(_short(v) for v in value) + "]"
    return repr(value)


def new_instance(bundle: SchemaBundle, ctor: str, assignments: Mapping[str, Any] | None = None) -> Instance:
    return Instance(bundle, bundle[ctor], assignments)


def set_field(inst: Instance, name: str, value: Any) -> None:
    inst.set_field(name, value)


def get_field(inst: Instance, name: str) -> Any:
    return inst.get_field(name)
