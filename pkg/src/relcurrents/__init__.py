"""Relative currents of free group automorphisms via substitution dynamics."""

from .errors import ConvergenceError, PreconditionError
from .words import Alphabet, CyclicWord, FreeFactorSystem

__version__ = "0.1.0"

__all__ = ["Alphabet", "CyclicWord", "FreeFactorSystem", "PreconditionError", "ConvergenceError"]
