"""Hypergeometric factorization of zeta functions of monomially deformed hypersurfaces."""
from __future__ import annotations

__version__ = "0.1.0"

from .family import FamilySpec, dwork, yu_yui  # noqa: E402

__all__ = ["FamilySpec", "dwork", "yu_yui", "__version__"]
