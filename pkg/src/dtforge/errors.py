"""Exception hierarchy shared by all dtforge modules."""

from __future__ import annotations


class DtforgeError(Exception):
    """Base class for every error raised by dtforge."""


# identifiers


class IdentifierError(DtforgeError, ValueError):
    pass


class MalformedIdentifier(IdentifierError):
    """The text has no recognizable host or handle structure."""


class UnknownRegistry(IdentifierError):
    """The URL is well formed but its host is not routed to any registry."""


# schema resolution


class ResolutionError(DtforgeError):
    pass


class SchemaNotFound(ResolutionError, LookupError):
    pass


class NetworkDisabled(ResolutionError):
    """A remote fetch was needed while the store is offline."""


class RemoteError(ResolutionError):
    """A remote fetch failed, either in transport or by returning a malformed document."""


class DanglingReference(ResolutionError):
    """A nested field points at a schema the resolver cannot supply."""


class InvalidSchemaDocument(DtforgeError, ValueError):
    pass


class ConstructorConflict(DtforgeError, ValueError):
    """Two distinct schemata in one bundle claim the same constructor name."""


# instances


class InstanceError(DtforgeError):
    pass


class UnknownConstructor(InstanceError, LookupError):
    def __init__(self, name: str, valid: list[str]) -> None:
        self.name = name
        self.valid = list(valid)
        super().__init__(f"unknown constructor {name!r}; valid constructors: {', '.join(self.valid)}")


class UnknownField(InstanceError, AttributeError):
    def __init__(self, name: str, schema: str, valid: list[str]) -> None:
        super().__init__(f"{schema} has no field {name!r}; valid fields: {', '.join(valid)}")
        self.name = name
        self.schema = schema
        self.valid = list(valid)


class TypeMismatch(InstanceError, TypeError):
    pass


class TableError(InstanceError, ValueError):
    pass


class RaggedRows(TableError):
    pass


class DuplicateColumn(TableError):
    pass


# serialization


class SerializationError(DtforgeError):
    pass


class ContextCollision(SerializationError):
    def __init__(self, term: str, first: str, second: str) -> None:
        self.term = term
        self.uris = (first, second)
        super().__init__(f"term {term!r} maps to both {first} and {second}")


class CyclicInstance(SerializationError, ValueError):
    pass


class IoError(DtforgeError, OSError):
    pass
