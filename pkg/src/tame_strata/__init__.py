"""tame-strata: canonical invariant Whitney stratifications of semialgebraic
Lie groupoids, built on an exact semialgebraic engine (real root isolation,
cylindrical algebraic decomposition, quantifier elimination)."""

from .polynomials import Polynomial, parse_polynomial
from .formulas import Formula, parse_formula

__all__ = ["Polynomial", "parse_polynomial", "Formula", "parse_formula"]
__version__ = "0.1.0"
