"""Exception hierarchy. Each class carries a stable ``code`` used by the CLI."""


class DefkError(Exception):
    code = "DefkError"


class Singular(DefkError):
    code = "Singular"


class PluginMismatch(DefkError):
    code = "PluginMismatch"


class DescriptorMismatch(DefkError):
    code = "DescriptorMismatch"


class ShapeError(DefkError):
    code = "ShapeError"


class EmptySet(DefkError):
    code = "EmptySet"


class UnsupportedRing(DefkError):
    code = "UnsupportedRing"


class UnsupportedDecomposition(DefkError):
    code = "UnsupportedDecomposition"


class PreconditionFailed(DefkError):
    code = "PreconditionFailed"


class InvalidMap(DefkError):
    code = "InvalidMap"


class SizeBoundExceeded(DefkError):
    code = "SizeBoundExceeded"
