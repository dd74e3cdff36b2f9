"""Conical 2-designs, entanglement checks and Jordan-algebraic composites."""

from qjw.config import VERSION as __version__

__all__ = ["__version__"]
