"""Registered data types, their nested-schema closure, and schema suggestion."""

from __future__ import annotations

import enum
from collections import deque
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any

from dtforge.errors import (
    ConstructorConflict,
    DanglingReference,
    IdentifierError,
    InvalidSchemaDocument,
    ResolutionError,
    UnknownConstructor,
)
from dtforge.identifier import SchemaId, parse_schema_identifier


class TargetKind(enum.Enum):
    SCALAR = "scalar"
    URI = "uri"
    NESTED = "nested"
    TABLE = "table"


@dataclass(frozen=True)
class Target:
    """What a field holds.

    ``refs`` lists the admissible schemata for NESTED fields (one or more) and
    the single table schema for TABLE fields; it is empty otherwise.
    """

    kind: TargetKind
    refs: tuple[SchemaId, ...] = ()

    def __post_init__(self) -> None:
        if self.kind is TargetKind.NESTED and not self.refs:
            raise ValueError("nested targets need at least one schema reference")
        if self.kind is TargetKind.TABLE and len(self.refs) != 1:
            raise ValueError("table targets need exactly one table schema reference")
        if self.kind in (TargetKind.SCALAR, TargetKind.URI) and self.refs:
            raise ValueError(f"{self.kind.value} targets carry no schema reference")

    @classmethod
    def scalar(cls) -> Target:
        return cls(TargetKind.SCALAR)

    @classmethod
    def uri(cls) -> Target:
        return cls(TargetKind.URI)

    @classmethod
    def nested(cls, *refs: SchemaId) -> Target:
        return cls(TargetKind.NESTED, tuple(refs))

    @classmethod
    def table(cls, ref: SchemaId) -> Target:
        return cls(TargetKind.TABLE, (ref,))


@dataclass(frozen=True)
class FieldDescriptor:
    name: str
    target: Target
    property_uri: str | None = None
    repeatable: bool = False


@dataclass(frozen=True)
class SchemaDef:
    id: SchemaId
    constructor_name: str
    label: str
    fields: tuple[FieldDescriptor, ...] = ()

    def __post_init__(self) -> None:
        if not self.constructor_name:
            raise InvalidSchemaDocument(f"{self.id}: constructor_name must be non-empty")
        seen: set[str] = set()
        for fd in self.fields:
            if fd.name in seen:
                raise InvalidSchemaDocument(f"{self.id}: duplicate field name {fd.name!r}")
            seen.add(fd.name)

    @property
    def field_names(self) -> list[str]:
        return [fd.name for fd in self.fields]

    def descriptor(self, name: str) -> FieldDescriptor | None:
        for fd in self.fields:
            if fd.name == name:
                return fd
        return None

    def references(self) -> list[SchemaId]:
        """Schema ids referenced by nested and table fields, in field order."""
        return [ref for fd in self.fields for ref in fd.target.refs]


def list_fields(schema: SchemaDef) -> list[FieldDescriptor]:
    return list(schema.fields)


# schema documents

_KEYWORD_TARGETS = {"scalar": TargetKind.SCALAR, "uri": TargetKind.URI}


def _parse_ref(text: Any, where: str) -> SchemaId:
    if not isinstance(text, str):
        raise InvalidSchemaDocument(f"{where}: expected a schema PID, got {text!r}")
    try:
        return parse_schema_identifier(text)
    except IdentifierError as exc:
        raise InvalidSchemaDocument(f"{where}: {exc}") from None


def _parse_field(raw: Any, where: str) -> FieldDescriptor:
    if not isinstance(raw, Mapping):
        raise InvalidSchemaDocument(f"{where}: field entry must be an object")
    name = raw.get("name")
    if not isinstance(name, str) or not name or name.startswith("@"):
        raise InvalidSchemaDocument(f"{where}: invalid field name {name!r}")
    where = f"{where} ({name})"
    target = raw.get("target")
    if isinstance(target, str) and target in _KEYWORD_TARGETS:
        tgt = Target(_KEYWORD_TARGETS[target])
    elif target == "table":
        tgt = Target.table(_parse_ref(raw.get("schema"), f"{where} table schema"))
    elif isinstance(target, str):
        tgt = Target.nested(_parse_ref(target, where))
    elif isinstance(target, list) and target:
        tgt = Target.nested(*(_parse_ref(t, where) for t in target))
    else:
        raise InvalidSchemaDocument(f"{where}: invalid target {target!r}")
    uri = raw.get("property_uri")
    if uri is not None and (not isinstance(uri, str) or not uri):
        raise InvalidSchemaDocument(f"{where}: property_uri must be non-empty text")
    repeatable = raw.get("repeatable", False)
    if not isinstance(repeatable, bool):
        raise InvalidSchemaDocument(f"{where}: repeatable must be a boolean")
    return FieldDescriptor(name, tgt, uri, repeatable)


def schema_from_document(doc: Any) -> SchemaDef:
    """Build a SchemaDef from the JSON schema-document format.

    The document carries ``pid``, ``constructor_name``, ``label`` and an
    ordered ``fields`` list. A field ``target`` is ``"scalar"``, ``"uri"``,
    ``"table"`` (with the table schema PID under ``schema``), a nested schema
    PID, or a list of admissible nested PIDs.
    """
    if not isinstance(doc, Mapping):
        raise InvalidSchemaDocument("schema document must be a JSON object")
    sid = _parse_ref(doc.get("pid"), "pid")
    ctor = doc.get("constructor_name")
    if not isinstance(ctor, str) or not ctor.isidentifier():
        raise InvalidSchemaDocument(f"{sid}: invalid constructor_name {ctor!r}")
    label = doc.get("label", ctor)
    if not isinstance(label, str):
        raise InvalidSchemaDocument(f"{sid}: label must be text")
    raw_fields = doc.get("fields", [])
    if not isinstance(raw_fields, list):
        raise InvalidSchemaDocument(f"{sid}: fields must be a list")
    fields = tuple(_parse_field(raw, f"{sid} fields[{i}]") for i, raw in enumerate(raw_fields))
    return SchemaDef(sid, ctor, label, fields)


def _target_to_document(fd: FieldDescriptor) -> dict[str, Any]:
    kind = fd.target.kind
    out: dict[str, Any] = {"name": fd.name}
    if kind is TargetKind.NESTED:
        refs = [r.canonical_url for r in fd.target.refs]
        out["target"] = refs[0] if len(refs) == 1 else refs
    else:
        out["target"] = kind.value
        if kind is TargetKind.TABLE:
            out["schema"] = fd.target.refs[0].canonical_url
    if fd.property_uri is not None:
        out["property_uri"] = fd.property_uri
    out["repeatable"] = fd.repeatable
    return out


def schema_to_document(schema: SchemaDef) -> dict[str, Any]:
    return {
        "pid": schema.id.canonical_url,
        "constructor_name": schema.constructor_name,
        "label": schema.label,
        "fields": [_target_to_document(fd) for fd in schema.fields],
    }


# bundles


@dataclass(frozen=True)
class SchemaBundle:
    """A root schema and every schema reachable from it, keyed by constructor name.

    Constructors are exposed as attributes, so ``bundle.group_comparison(label=...)``
    builds an instance.
    """

    root: SchemaId
    members: Mapping[str, SchemaDef] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", MappingProxyType(dict(self.members)))
        if self.root not in {m.id for m in self.members.values()}:
            raise ValueError(f"root {self.root} is not a bundle member")

    @property
    def root_def(self) -> SchemaDef:
        return self.by_id(self.root)

    def keys(self) -> list[str]:
        return list(self.members)

    def __contains__(self, name: object) -> bool:
        return name in self.members

    def __getitem__(self, name: str) -> SchemaDef:
        try:
            return self.members[name]
        except KeyError:
            raise UnknownConstructor(name, self.keys()) from None

    def by_id(self, sid: SchemaId) -> SchemaDef:
        for member in self.members.values():
            if member.id == sid:
                return member
        raise LookupError(f"{sid} is not a member of this bundle")

    def constructor(self, name: str) -> Constructor:
        return Constructor(self, self[name])

    def __getattr__(self, name: str) -> Constructor:
        if name.startswith("_"):
            raise AttributeError(name)
        members = self.__dict__.get("members", {})
        if name in members:
            return Constructor(self, members[name])
        raise AttributeError(f"bundle has no constructor {name!r}; available: {', '.join(members)}")

    def __dir__(self) -> list[str]:
        return sorted(set(super().__dir__()) | set(self.members))

    def __repr__(self) -> str:
        return f"SchemaBundle(root={self.root.canonical_url!r}, members={list(self.members)})"


class Constructor:
    """Callable that builds instances of one bundle member."""

    def __init__(self, bundle: SchemaBundle, schema: SchemaDef) -> None:
        self.bundle = bundle
        self.schema = schema

    @property
    def prop_list(self) -> list[str]:
        return self.schema.field_names

    def __call__(self, **assignments: Any):
        from dtforge.instance import Instance

        return Instance(self.bundle, self.schema, assignments)

    def __repr__(self) -> str:
        return f"<constructor {self.schema.constructor_name} {self.schema.id.canonical_url}>"


Resolver = Callable[[SchemaId], SchemaDef]


def close_over(root: SchemaDef, resolver: Resolver) -> SchemaBundle:
    """Resolve every schema reachable from ``root`` breadth-first.

    Each id is resolved at most once; reference cycles are fine.

    Raises:
        DanglingReference: the resolver failed for a referenced id.
        ConstructorConflict: two distinct schemata share a constructor name.
    """
    members: dict[str, SchemaDef] = {}
    seen: set[SchemaId] = {root.id}
    queue: deque[SchemaDef] = deque([root])
    while queue:
        current = queue.popleft()
        existing = members.get(current.constructor_name)
        if existing is not None and existing.id != current.id:
            raise ConstructorConflict(
                f"constructor {current.constructor_name!r} is claimed by {existing.id} and {current.id}"
            )
        members[current.constructor_name] = current
        for ref in current.references():
            if ref in seen:
                continue
            seen.add(ref)
            try:
                resolved = resolver(ref)
            except (ResolutionError, InvalidSchemaDocument) as exc:
                raise DanglingReference(f"{current.id} references {ref}, which cannot be resolved: {exc}") from exc
            if resolved.id != ref:
                raise DanglingReference(f"resolver returned {resolved.id} for {ref}")
            queue.append(resolved)
    return SchemaBundle(root.id, members)


def bundle_resolver(bundle: SchemaBundle) -> Resolver:
    def resolve(sid: SchemaId) -> SchemaDef:
        try:
            return bundle.by_id(sid)
        except LookupError as exc:
            raise DanglingReference(str(exc)) from None

    return resolve


# schema suggestion

SUGGESTION_QUESTIONS: tuple[tuple[str, str], ...] = (
    ("Is it a benchmark-based model evaluation?", "algorithm_evaluation"),
    ("Is it a hierarchical, mixed, or nested model?", "multilevel_analysis"),
    ("Does it compare means of two or more groups?", "group_comparison"),
    ("Is it clustering?", "class_discovery"),
    ("Is it classification, or logistic/ordinal regression?", "class_prediction"),
)

FALLBACK_SCHEMA = "data_analysis"


def suggest_schema(answers: Iterable[bool]) -> str | None:
    """Return the analytic schema for the first yes answer, or None (no suggestion).

    Answers beyond the fifth question are ignored; a short sequence with no
    yes is treated as no suggestion.
    """
    for (_, name), answer in zip(SUGGESTION_QUESTIONS, answers):
        if answer:
            return name
    return None


def parse_answers(text: str) -> list[bool]:
    """Parse a ``nnynn``-style answer string (exactly five y/n characters)."""
    if len(text) != len(SUGGESTION_QUESTIONS) or any(c not in "yYnN" for c in text):
        raise ValueError(f"answers must be {len(SUGGESTION_QUESTIONS)} characters of y/n, got {text!r}")
    return [c in "yY" for c in text]

