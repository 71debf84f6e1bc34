"""Exception hierarchy shared by all csrpoly modules."""


class CsrPolyError(Exception):
    """Base class for data/validation errors raised by csrpoly."""


class StructureError(CsrPolyError, ValueError):
    """Row pointer or array lengths are inconsistent."""


class NonCanonicalError(CsrPolyError, ValueError):
    """Column indices within a row are unsorted or duplicated."""


class OutOfRangeError(CsrPolyError, IndexError):
    """A row or column index lies outside the declared shape."""


class ParseError(CsrPolyError, ValueError):
    """A Matrix Market file could not be parsed."""


class UnsupportedError(CsrPolyError, ValueError):
    """A Matrix Market kind this library does not read."""


class DomainError(CsrPolyError, ValueError):
    """Arguments fall outside a mapping's domain."""


class ArgumentError(CsrPolyError, ValueError):
    """An argument is outside its allowed range."""
