"""Build instance trees from declarative manifests.

A manifest names the root schema and mirrors instance fields::

    schema_url: https://doi.org/21.T11969/feeb33ad3e4440682a4d
    body:
      is_implemented_by: code_url
      has_part:
        $type: group_comparison
        label: t-test
        has_output:
          $type: data_item
          source_table:
            $table: {columns: [t, df, p], rows: [[-49.9, 58.6, 9.3e-50]]}

Nested objects carry ``$type`` (a constructor in the loaded bundle), URIs
are written ``{$uri: ...}`` and tables ``{$table: {columns, rows}}``.
Files ending in ``.json`` are read as JSON, anything else as YAML.
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from pathlib import Path
from typing import Any

import yaml

from dtforge.errors import DtforgeError, InstanceError, IoError
from dtforge.instance import Instance, Uri, table_from_rows
from dtforge.schema_model import SchemaBundle
from dtforge.schema_store import SchemaStore

TYPE_KEY = "$type"
URI_KEY = "$uri"
TABLE_KEY = "$table"


class ManifestSyntaxError(DtforgeError, ValueError):
    """The manifest file does not parse or lacks required top-level keys."""


class ManifestError(InstanceError):
    """A manifest value cannot be turned into an instance field.

    ``pointer`` is a JSON pointer into the manifest, e.g. ``/body/has_part/labl``.
    """

    def __init__(self, pointer: str, message: str) -> None:
        self.pointer = pointer
        super().__init__(f"{pointer}: {message}")


def _escape(token: str) -> str:
    return token.replace("~", "~0").replace("/", "~1")


def read_manifest(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(exc.errno, f"cannot read manifest {path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (ValueError, yaml.YAMLError) as exc:
        raise ManifestSyntaxError(f"{path}: {exc}") from exc
    if not isinstance(data, Mapping):
        raise ManifestSyntaxError(f"{path}: top level must be a mapping")
    if not isinstance(data.get("schema_url"), str):
        raise ManifestSyntaxError(f"{path}: schema_url is required")
    body = data.get("body")
    if body is None:
        body = {}
    if not isinstance(body, Mapping):
        raise ManifestSyntaxError(f"{path}: body must be a mapping")
    return {"schema_url": data["schema_url"], "body": dict(body)}


def _value(bundle: SchemaBundle, raw: Any, pointer: str) -> Any:
    if isinstance(raw, Mapping):
        if TYPE_KEY in raw:
            return _build(bundle, raw[TYPE_KEY], raw, pointer)
        if URI_KEY in raw:
            if set(raw) != {URI_KEY}:
                raise ManifestError(pointer, f"{URI_KEY} objects take no other keys")
            try:
                return Uri(raw[URI_KEY])
            except InstanceError as exc:
                raise ManifestError(f"{pointer}/{_escape(URI_KEY)}", str(exc)) from exc
        if TABLE_KEY in raw:
            spec = raw[TABLE_KEY]
            where = f"{pointer}/{_escape(TABLE_KEY)}"
            if set(raw) != {TABLE_KEY} or not isinstance(spec, Mapping):
                raise ManifestError(where, "expected {columns: [...], rows: [[...], ...]}")
            columns, rows = spec.get("columns", []), spec.get("rows", [])
            if not isinstance(columns, list) or not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
                raise ManifestError(where, "columns must be a list and rows a list of lists")
            try:
                return table_from_rows(columns, rows)
            except InstanceError as exc:
                raise ManifestError(where, str(exc)) from exc
        raise ManifestError(pointer, f"nested objects need {TYPE_KEY}, {URI_KEY} or {TABLE_KEY}")
    if isinstance(raw, list):
        return [_value(bundle, item, f"{pointer}/{i}") for i, item in enumerate(raw)]
    return raw


def _build(bundle: SchemaBundle, ctor: Any, body: Mapping[str, Any], pointer: str) -> Instance:
    if not isinstance(ctor, str) or ctor not in bundle:
        raise ManifestError(
            f"{pointer}/{_escape(TYPE_KEY)}",
            f"unknown constructor {ctor!r}; valid constructors: {', '.join(bundle.keys())}",
        )
    inst = Instance(bundle, bundle[ctor])
    for key, raw in body.items():
        if key == TYPE_KEY:
            continue
        where = f"{pointer}/{_escape(str(key))}"
        if not isinstance(key, str) or key.startswith("$"):
            raise ManifestError(where, f"unexpected directive {key!r}")
        if key not in inst.prop_list:
            raise ManifestError(
                where, f"{ctor} has no field {key!r}; valid fields: {', '.join(inst.prop_list)}"
            )
        value = _value(bundle, raw, where)
        try:
            inst.set_field(key, value)
        except InstanceError as exc:
            raise ManifestError(where, str(exc)) from exc
    return inst


def build_instance(manifest: Mapping[str, Any], bundle: SchemaBundle) -> Instance:
    body = manifest.get("body") or {}
    ctor = body.get(TYPE_KEY, bundle.root_def.constructor_name)
    return _build(bundle, ctor, body, "/body")


def build_from_manifest(manifest: Mapping[str, Any], store: SchemaStore) -> Instance:
    bundle = store.load_datatype(manifest["schema_url"])
    return build_instance(manifest, bundle)
