"""Truncated two-mode Fock space, NC coordinates and superoperators."""

from .identities import *  # noqa: F401,F403
from .identities import __all__ as _ident_all
from .operators import *  # noqa: F401,F403
from .operators import __all__ as _ops_all
from .superoperators import *  # noqa: F401,F403
from .superoperators import __all__ as _super_all

__all__ = [*_ops_all, *_super_all, *_ident_all]
