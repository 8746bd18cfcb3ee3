"""Exact algebraic Kirby calculus: forms, handle moves, rational blowdown, corks."""

__version__ = "0.1.0"

from . import cork, handles, lattice, rbd, report  # noqa: E402
from .errors import KirbyError  # noqa: E402

__all__ = ["KirbyError", "cork", "handles", "lattice", "rbd", "report", "__version__"]
