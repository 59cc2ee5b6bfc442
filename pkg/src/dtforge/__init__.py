"""Load registered data-analysis schemata, populate instances, write JSON-LD."""

from dtforge.identifier import Registry, SchemaId, canonicalize, parse_schema_identifier
from dtforge.instance import Instance, ResultTable, Uri, get_field, new_instance, set_field, table_from_rows
from dtforge.jsonld import JsonLdDocument, build_document, to_jsonld, write_document
from dtforge.schema_model import SchemaBundle, SchemaDef, close_over, list_fields, suggest_schema
from dtforge.schema_store import FetchStats, SchemaStore, StoreConfig, get_schema, load_datatype

__version__ = "0.1.0"

__all__ = [
    "FetchStats",
    "Instance",
    "JsonLdDocument",
    "Registry",
    "ResultTable",
    "SchemaBundle",
    "SchemaDef",
    "SchemaId",
    "SchemaStore",
    "StoreConfig",
    "Uri",
    "build_document",
    "canonicalize",
    "close_over",
    "get_field",
    "get_schema",
    "list_fields",
    "load_datatype",
    "new_instance",
    "parse_schema_identifier",
    "set_field",
    "suggest_schema",
    "table_from_rows",
    "to_jsonld",
    "write_document",
]
