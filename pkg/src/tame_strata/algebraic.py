"""Real algebraic numbers and exact sign determination at algebraic points.

An AlgebraicNumber is a squarefree rational defining polynomial plus an
isolating interval. Signs of polynomials at points with several algebraic
coordinates are decided by rational interval refinement, with an iterated
resultant certificate to recognize exact zeros (the value is a root of a
nonzero univariate witness polynomial, whose nonzero roots are bounded away
from zero).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence, Union

from . import realroots as rr
from .polynomials import Polynomial, merge_vars
from .resultants import exact_div, poly_gcd, resultant_prs, squarefree_part

Rat = Fraction
Coord = Union[Fraction, "AlgebraicNumber"]


class AlgebraicNumber:
    """A real algebraic number: squarefree defining polynomial (dense
    Fraction coefficients, low degree first) with exactly one root in the
    isolating interval; endpoints are never roots. Rational numbers use the
    degenerate interval lo == hi."""

    __slots__ = ("poly", "lo", "hi")

    def __init__(self, poly: Sequence, lo: Fraction, hi: Fraction):
        self.poly = rr.unormalize(poly)
        self.lo = Fraction(lo)
        self.hi = Fraction(hi)
        if not self.poly:
            raise rr.ZeroPolynomial("zero defining polynomial")

    @staticmethod
    def from_rational(r) -> "AlgebraicNumber":
        r = Fraction(r)
        return AlgebraicNumber([-r, Fraction(1)], r, r)

    @staticmethod
    def isolate(poly: Sequence) -> list["AlgebraicNumber"]:
        """All real roots of poly, sorted ascending."""
        sf = rr.usquarefree(rr.unormalize(poly))
        out = []
        for lo, hi in rr.isolate_roots(sf):
            if lo == hi:
                out.append(AlgebraicNumber.from_rational(lo))
            else:
                out.append(AlgebraicNumber(sf, lo, hi))
        return out

    # -- queries -------------------------------------------------------------

    def is_rational(self) -> bool:
        return self.lo == self.hi

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not known rational")
        return self.lo

    def interval(self) -> tuple[Fraction, Fraction]:
        return (self.lo, self.hi)

    def refine(self) -> None:
        if self.lo == self.hi:
            return
        lo, hi = rr._bisect_once(self.poly, (self.lo, self.hi))
        if lo == hi:
            # landed exactly on the root: switch to rational form
            r = lo
            self.poly = [-r, Fraction(1)]
        self.lo, self.hi = lo, hi

    def refine_to(self, width: Fraction) -> None:
        while self.hi - self.lo > width:
            self.refine()
            if self.lo == self.hi:
                return

    def __float__(self) -> float:
        self.refine_to(Fraction(1, 2 ** 64))
        return float((self.lo + self.hi) / 2)

    def compare(self, other: "AlgebraicNumber | Fraction | int") -> int:
        """-1, 0, +1 ordering decision; exact and terminating."""
        if not isinstance(other, AlgebraicNumber):
            other = AlgebraicNumber.from_rational(other)
        a, b = self, other
        if a.is_rational() and b.is_rational():
            x, y = a.lo, b.lo
            return -1 if x < y else (1 if x > y else 0)
        if a.is_rational() or b.is_rational():
            rat, alg = (a, b) if a.is_rational() else (b, a)
            r = rat.lo
            if alg.lo < r < alg.hi and rr.ueval(alg.poly, r) == 0:
                return 0
            while not (alg.hi < r or r < alg.lo):
                alg.refine()
                if alg.is_rational():
                    return self.compare(other)
            alg_vs_rat = -1 if alg.hi < r else 1
            return -alg_vs_rat if a.is_rational() else alg_vs_rat
        # refinement separates distinct values; the gcd recognizes equality
        # (a shared root inside the interval overlap must be both numbers)
        g = rr.ugcd(a.poly, b.poly)
        while True:
            if a.hi < b.lo:
                return -1
            if b.hi < a.lo:
                return 1
            if rr.udegree(g) >= 1:
                lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
                if lo < hi and rr.ueval(g, lo) * rr.ueval(g, hi) < 0:
                    return 0
            a.refine()
            b.refine()
            if a.is_rational() and b.is_rational():
                return a.compare(b)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, AlgebraicNumber)):
            return self.compare(other) == 0
        return NotImplemented

    # numeric equality crosses representations, so no consistent hash exists
    __hash__ = None

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __repr__(self):
        if self.is_rational():
            return f"AlgebraicNumber({self.lo})"
        return f"AlgebraicNumber(deg {rr.udegree(self.poly)} in ({self.lo},{self.hi}))"


def as_coord(x) -> Coord:
    if isinstance(x, AlgebraicNumber):
        return x.rational_value() if x.is_rational() else x
    return Fraction(x)


# -- interval arithmetic -------------------------------------------------------

Interval = tuple[Fraction, Fraction]


def _imul(a: Interval, b: Interval) -> Interval:
    prods = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (min(prods), max(prods))


def _ipow(a: Interval, n: int) -> Interval:
    if n == 0:
        return (Fraction(1), Fraction(1))
    if n % 2 == 1 or a[0] >= 0:
        return (a[0] ** n, a[1] ** n)
    if a[1] <= 0:
        return (a[1] ** n, a[0] ** n)
    return (Fraction(0), max(a[0] ** n, a[1] ** n))


def eval_on_box(poly: Polynomial, box: Mapping[str, Interval]) -> Interval:
    lo = hi = Fraction(0)
    for exps, c in poly.terms.items():
        t = (Fraction(1), Fraction(1))
        for v, e in zip(poly.variables, exps):
            if e:
                t = _imul(t, _ipow(box[v], e))
        tl, th = (c * t[0], c * t[1]) if c >= 0 else (c * t[1], c * t[0])
        lo += tl
        hi += th
    return (lo, hi)


# -- sign determination at algebraic points ------------------------------------


def _witness_poly(poly: Polynomial, defs: dict[str, rr.Coeffs]) -> rr.Coeffs:
    """Nonzero W in Q[z] with W(poly(point)) = 0, by iterated resultants of
    z - poly against each coordinate's defining polynomial."""
    z = "_z"
    while z in poly.variables:
        z = z + "_"
    ctx = merge_vars(poly.variables, (z,))
    cur = Polynomial.var(z, ctx) - poly.in_context(ctx)
    for v, cs in defs.items():
        if v not in cur.used_variables():
            continue
        m = Polynomial((v,), {(k,): c for k, c in enumerate(cs)})
        cur = resultant_prs(m.in_context(cur.variables), cur, v)
        if cur.is_zero():
            raise ArithmeticError("degenerate witness resultant")
    w = [Fraction(0)] * (cur.degree_in(z) + 1)
    for c, k in zip(cur.coefficients_in(z), range(len(w))):
        if not c.is_constant():
            raise ArithmeticError("witness polynomial not univariate")
        w[k] = c.constant_value()
    return rr.unormalize(w)


def sign_at(poly: Polynomial, point: Mapping[str, Coord]) -> int:
    """Exact sign of poly at a point with rational/algebraic coordinates."""
    subs = {}
    algs: dict[str, AlgebraicNumber] = {}
    for v in poly.used_variables():
        val = point[v]
        if isinstance(val, AlgebraicNumber) and not val.is_rational():
            algs[v] = val
        else:
            subs[v] = val.rational_value() if isinstance(val, AlgebraicNumber) else Fraction(val)
    p = poly.substitute(subs) if subs else poly
    if not algs:
        c = p.constant_value() if p.is_constant() else p.evaluate({})
        return (c > 0) - (c < 0)

    def box() -> dict[str, Interval]:
        return {v: a.interval() for v, a in algs.items()}

    for _ in range(6):
        lo, hi = eval_on_box(p, box())
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        for a in algs.values():
            a.refine()
    # certificate phase
    w = _witness_poly(p, {v: a.poly for v, a in algs.items()})
    t = 0
    while t < len(w) and w[t] == 0:
        t += 1
    if t == 0:
        sigma = None  # value cannot be zero
    else:
        v0 = abs(w[t])
        mx = max((abs(c) for c in w[t:]), default=Fraction(0))
        sigma = v0 / (mx + v0)
    while True:
        lo, hi = eval_on_box(p, box())
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        if sigma is not None and -sigma < lo and hi < sigma:
            return 0
        for a in algs.values():
            a.refine()


def roots_over_point(
    poly: Polynomial, var: str, point: Mapping[str, Coord]
) -> list[AlgebraicNumber] | None:
    """Isolate the real roots in `var` of poly evaluated at `point` (which
    pins every other variable of poly). Returns None if the evaluated
    polynomial vanishes identically."""
    coeffs = poly.coefficients_in(var)
    # true degree at the point
    d = len(coeffs) - 1
    while d >= 0 and sign_at(coeffs[d], point) == 0:
        d -= 1
    if d < 0:
        return None
    if d == 0:
        return []
    trunc = Polynomial.from_coefficients(coeffs[: d + 1], var)

    subs = {}
    algs: dict[str, AlgebraicNumber] = {}
    for v in trunc.used_variables():
        if v == var:
            continue
        val = point[v]
        if isinstance(val, AlgebraicNumber) and not val.is_rational():
            algs[v] = val
        else:
            subs[v] = val.rational_value() if isinstance(val, AlgebraicNumber) else Fraction(val)
    p = trunc.substitute(subs) if subs else trunc

    if not algs:
        dense = [c.constant_value() if c.terms else Fraction(0) for c in p.coefficients_in(var)]
        return AlgebraicNumber.isolate(dense)

    # eliminate algebraic coordinates into a rational witness for the roots
    cur = p
    for v, a in algs.items():
        if v not in cur.used_variables():
            continue
        mpoly = Polynomial((v,), {(k,): c for k, c in enumerate(a.poly)})
        res = resultant_prs(mpoly.in_context(cur.variables), cur, v)
        if res.is_zero():
            # a factor of the defining polynomial kills all coefficients;
            # strip it (our coordinate is not a root of that factor)
            cont = _content_wrt(cur, v)
            g = rr.ugcd(a.poly, cont)
            keep, _ = rr.udivmod(a.poly, g)
            a = AlgebraicNumber(keep, a.lo, a.hi)
            algs[v] = a
            mpoly = Polynomial((v,), {(k,): c for k, c in enumerate(a.poly)})
            res = resultant_prs(mpoly.in_context(cur.variables), cur, v)
            if res.is_zero():
                raise ArithmeticError("resultant degenerate after content strip")
        cur = res
    dense = [c.constant_value() if c.is_constant() else None for c in cur.coefficients_in(var)]
    if any(c is None for c in dense):
        raise ArithmeticError("root witness not univariate")
    candidates = AlgebraicNumber.isolate([Fraction(c) for c in dense])
    roots = []
    for cand in candidates:
        ext = dict(point)
        ext[var] = cand
        if sign_at(trunc, ext) == 0:
            roots.append(cand)
    return roots


def _content_wrt(p: Polynomial, v: str) -> rr.Coeffs:
    """gcd in Q[v] of the coefficients of p grouped by all other monomials."""
    i = p.variables.index(v)
    groups: dict[tuple, dict[int, Fraction]] = {}
    for e, c in p.terms.items():
        key = tuple(x for j, x in enumerate(e) if j != i)
        groups.setdefault(key, {})[e[i]] = c
    g: rr.Coeffs = []
    for grp in groups.values():
        dense = [Fraction(0)] * (max(grp) + 1)
        for k, c in grp.items():
            dense[k] = c
        g = rr.ugcd(g, dense) if g else rr.unormalize(dense)
        if rr.udegree(g) == 0:
            break
    return g


# -- points ---------------------------------------------------------------------


class AlgebraicPoint:
    """A point with rational or real-algebraic coordinates."""

    __slots__ = ("variables", "coords")

    def __init__(self, variables: Sequence[str], coords: Sequence[Coord]):
        if len(variables) != len(coords):
            raise ValueError("coordinate count mismatch")
        self.variables = tuple(variables)
        self.coords = [as_coord(c) for c in coords]

    def as_mapping(self) -> dict[str, Coord]:
        return dict(zip(self.variables, self.coords))

    def is_rational(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coords)

    def rational_coords(self) -> list[Fraction]:
        return [Fraction(c) if isinstance(c, Fraction) else c.rational_value() for c in self.coords]

    def to_floats(self) -> list[float]:
        return [float(c) for c in self.coords]

    def sign_of(self, poly: Polynomial) -> int:
        return sign_at(poly, self.as_mapping())

    def pin_formulas(self) -> list[tuple[rr.Coeffs, Fraction, Fraction]]:
        """Per-coordinate (defining polynomial, lo, hi) exactly pinning the
        point inside the product box."""
        out = []
        for c in self.coords:
            if isinstance(c, Fraction):
                out.append(([-c, Fraction(1)], c, c))
            else:
                out.append((list(c.poly), c.lo, c.hi))
        return out

    def __repr__(self):
        return "AlgebraicPoint(" + ", ".join(f"{v}={c!r}" for v, c in zip(self.variables, self.coords)) + ")"


class ExactValue:
    """Quotient of two polynomial values at a fixed algebraic point; supports
    exact field arithmetic and sign queries without leaving the point's field."""

    __slots__ = ("num", "den", "point")

    def __init__(self, num: Polynomial, den: Polynomial, point: AlgebraicPoint):
        if sign_at(den, point.as_mapping()) == 0:
            raise ZeroDivisionError("denominator vanishes at point")
        self.num = num
        self.den = den
        self.point = point

    @staticmethod
    def of(num: Polynomial, point: AlgebraicPoint) -> "ExactValue":
        return ExactValue(num, Polynomial.constant(1), point)

    def sign(self) -> int:
        m = self.point.as_mapping()
        return sign_at(self.num, m) * sign_at(self.den, m)

    def is_zero(self) -> bool:
        return sign_at(self.num, self.point.as_mapping()) == 0

    def __add__(self, other: "ExactValue") -> "ExactValue":
        return ExactValue(self.num * other.den + other.num * self.den, self.den * other.den, self.point)

    def __sub__(self, other: "ExactValue") -> "ExactValue":
        return ExactValue(self.num * other.den - other.num * self.den, self.den * other.den, self.point)

    def __mul__(self, other: "ExactValue") -> "ExactValue":
        return ExactValue(self.num * other.num, self.den * other.den, self.point)

    def __truediv__(self, other: "ExactValue") -> "ExactValue":
        if other.is_zero():
            raise ZeroDivisionError("division by zero value")
        return ExactValue(self.num * other.den, self.den * other.num, self.point)

    def __neg__(self) -> "ExactValue":
        return ExactValue(-self.num, self.den, self.point)

    def simplify(self) -> "ExactValue":
        g = poly_gcd(self.num, self.den)
        if not g.is_constant():
            return ExactValue(exact_div(self.num, g), exact_div(self.den, g), self.point)
        return self

    def to_fraction(self) -> Fraction:
        m = {v: c for v, c in zip(self.point.variables, self.point.coords)}
        if not self.point.is_rational():
            raise ValueError("value not rational")
        rat = {v: (c if isinstance(c, Fraction) else c.rational_value()) for v, c in m.items()}
        return self.num.evaluate(rat) / self.den.evaluate(rat)

    def to_float(self) -> float:
        m = self.point.as_mapping()
        box = {}
        for v, c in m.items():
            if isinstance(c, Fraction):
                box[v] = (c, c)
            else:
                c.refine_to(Fraction(1, 2 ** 48))
                box[v] = c.interval()
        nlo, nhi = eval_on_box(self.num.in_context(tuple(box)), box) if self.num.used_variables() else (self.num.evaluate({}),) * 2
        dlo, dhi = eval_on_box(self.den.in_context(tuple(box)), box) if self.den.used_variables() else (self.den.evaluate({}),) * 2
        nmid = float((nlo + nhi) / 2)
        dmid = float((dlo + dhi) / 2)
        return nmid / dmid
