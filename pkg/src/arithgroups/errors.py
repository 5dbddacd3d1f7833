"""Exception hierarchy shared by all modules.

Every error carries a module-qualified ``code`` (``"mulrel.PrecisionExhausted"``)
so the command line runner can report failures uniformly.
"""

from __future__ import annotations


class ArithGroupsError(Exception):
    module = "core"

    @property
    def code(self) -> str:
        return f"{self.module}.{type(self).__name__}"


class SizeLimit(ArithGroupsError):
    module = "rootsys"


class PreconditionError(ArithGroupsError, ValueError):
    """Raised when an operation's documented precondition is violated."""
