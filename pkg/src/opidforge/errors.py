"""Exception hierarchy. Every error carries a stable ``code`` string."""


class OpidForgeError(Exception):
    code = "error"


class MalformedDocument(OpidForgeError):
    code = "malformed-document"


class SchemaViolation(OpidForgeError):
    code = "schema-violation"

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class DanglingObjectReference(OpidForgeError):
    code = "dangling-object-reference"


class TypeConflict(OpidForgeError):
    code = "type-conflict"


class UnknownObject(OpidForgeError):
    code = "unknown-object"


class UnknownType(OpidForgeError):
    code = "unknown-type"


class InvalidBinding(OpidForgeError):
    code = "invalid-binding"


class NotEnabled(OpidForgeError):
    code = "not-enabled"


class UnboundVariable(OpidForgeError):
    code = "unbound-variable"


class TypeMismatch(OpidForgeError):
    code = "type-mismatch"


class TransformError(OpidForgeError):
    """Precondition failure of a net transformation."""

    code = "transform-error"

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class InvalidOcpn(TransformError):
    code = "invalid-ocpn"


class NotT1Net(TransformError):
    code = "not-t1-net"


class NotTRNet(TransformError):
    code = "not-tr-net"


class SelfRelationship(TransformError):
    code = "self-relationship"


class UnknownTypeInRelations(TransformError):
    code = "unknown-type-in-r"


class UnsoundFlow(TransformError):
    code = "unsound-flow"
