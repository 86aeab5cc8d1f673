"""Exception hierarchy.

``InputError`` subclasses describe bad user input (files, flags, configs);
the CLI maps them to exit code 2. Everything else is an internal failure.
"""
from __future__ import annotations


class PPKError(Exception):
    """Base class for all toolkit errors."""


class InputError(PPKError):
    """Raised for malformed or inconsistent user-supplied data."""


class SchemaError(InputError):
    """Structural problem in a document. ``locus`` names the offending field."""

    def __init__(self, message: str, locus: str = "", line: int | None = None):
        self.locus = locus
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if locus:
            where.append(locus)
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class TaxonomyError(SchemaError):
    """A name does not resolve against the active taxonomy."""


class IntegrityError(SchemaError):
    """A value is well-formed but violates a data invariant."""


class ConfigError(SchemaError):
    """Invalid configuration value."""


class EmptyCropError(InputError):
    pass


class ClassMismatchError(InputError):
    pass


class MissingModelError(InputError):
    pass


class MissingGroupError(InputError):
    pass


class IdMismatchError(InputError):
    pass


class MissingVideoError(InputError):
    pass
