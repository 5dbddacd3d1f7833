"""Exact and certified computations around weak commensurability of
arithmetic groups: root systems and Weyl groups, number fields,
multiplicative relations, local invariants of central simple algebras,
isogenies of tori, Tits index aggregation, geodesic lengths and families
of forms distinguished only globally.
"""

from .errors import ArithGroupsError, PreconditionError

__version__ = "0.1.0"

__all__ = ["ArithGroupsError", "PreconditionError", "__version__"]
