"""Multi-agent common knowledge logic: syntax, Kripke models, finite algebras,
well-founded heights, ultrafilter representation, a decision procedure and
a checker for omega-derivation certificates."""

from .syntax import BOT, TOP, Box, C, Imp, Var, parse, render
from .decide import ResourceCapExceeded, decide_valid, derives_g, derives_l, derives_mixed

__version__ = "0.1.0"

__all__ = ["BOT", "TOP", "Box", "C", "Imp", "Var", "parse", "render", "ResourceCapExceeded",
           "decide_valid", "derives_g", "derives_l", "derives_mixed"]
