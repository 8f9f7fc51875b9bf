"""Exact sparse multivariate polynomials over the rationals.

Every set description in this package bottoms out in these polynomials, so
the representation is deliberately rigid: a fixed variable context, exponent
vectors as dict keys, Fraction coefficients, no zero terms ever stored, and a
graded lexicographic term order so equal polynomials print identically.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

Exponents = tuple[int, ...]
Scalar = Union[int, Fraction]


class PolynomialError(ValueError):
    pass


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise PolynomialError(f"coefficient must be rational, got {type(c).__name__}")


def merge_vars(a: Sequence[str], b: Sequence[str]) -> tuple[str, ...]:
    """Stable union of two variable contexts (left order first)."""
    out = list(a)
    seen = set(a)
    for v in b:
        if v not in seen:
            out.append(v)
            seen.add(v)
    return tuple(out)


def grlex_key(e: Exponents) -> tuple:
    # graded lex: total degree first, then lexicographic on the exponent vector
    return (sum(e), e)


class Polynomial:
    """Immutable multivariate polynomial with Fraction coefficients.

    `variables` is the ordered variable context; `terms` maps exponent tuples
    (one entry per context variable) to nonzero Fractions.
    """

    __slots__ = ("variables", "terms", "_hash", "_prim")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exponents, Scalar]):
        vs = tuple(variables)
        n = len(vs)
        clean: dict[Exponents, Fraction] = {}
        for exps, coeff in terms.items():
            c = _as_fraction(coeff)
            if c == 0:
                continue
            e = tuple(int(x) for x in exps)
            if len(e) != n or any(x < 0 for x in e):
                raise PolynomialError(f"bad exponent vector {e!r} for variables {vs!r}")
            clean[e] = clean.get(e, Fraction(0)) + c
            if clean[e] == 0:
                del clean[e]
        object.__setattr__(self, "variables", vs)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)
        object.__setattr__(self, "_prim", None)

    @classmethod
    def _raw(cls, variables: tuple[str, ...], terms: dict[Exponents, Fraction]) -> "Polynomial":
        """Internal constructor: terms must already be clean (correct arity,
        Fraction values, no zeros)."""
        self = object.__new__(cls)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "_hash", None)
        object.__setattr__(self, "_prim", None)
        return self

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(variables: Sequence[str] = ()) -> "Polynomial":
        return Polynomial(variables, {})

    @staticmethod
    def constant(c: Scalar, variables: Sequence[str] = ()) -> "Polynomial":
        vs = tuple(variables)
        return Polynomial(vs, {(0,) * len(vs): _as_fraction(c)})

    @staticmethod
    def var(name: str, variables: Sequence[str] | None = None) -> "Polynomial":
        vs = tuple(variables) if variables is not None else (name,)
        if name not in vs:
            raise PolynomialError(f"variable {name!r} not in context {vs!r}")
        e = tuple(1 if v == name else 0 for v in vs)
        return Polynomial(vs, {e: Fraction(1)})

    # -- context handling --------------------------------------------------

    def in_context(self, variables: Sequence[str]) -> "Polynomial":
        """Re-express in another context (must contain every used variable)."""
        vs = tuple(variables)
        if vs == self.variables:
            return self
        pos: list[int | None] = []
        for v in self.variables:
            pos.append(vs.index(v) if v in vs else None)
        n = len(vs)
        terms: dict[Exponents, Fraction] = {}
        for e, c in self.terms.items():
            new = [0] * n
            for i, x in enumerate(e):
                if x == 0:
                    continue
                p = pos[i]
                if p is None:
                    raise PolynomialError(
                        f"context {vs!r} does not contain used variable {self.variables[i]!r}"
                    )
                new[p] = x
            key = tuple(new)
            terms[key] = terms.get(key, Fraction(0)) + c
        return Polynomial(vs, terms)

    def drop_unused(self) -> "Polynomial":
        used = self.used_variables()
        vs = tuple(v for v in self.variables if v in used)
        return self.in_context(vs) if vs != self.variables else self

    def used_variables(self) -> set[str]:
        used = set()
        for e in self.terms:
            for i, x in enumerate(e):
                if x:
                    used.add(self.variables[i])
        return used

    @staticmethod
    def unify(p: "Polynomial", q: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if p.variables == q.variables:
            return p, q
        vs = merge_vars(p.variables, q.variables)
        return p.in_context(vs), q.in_context(vs)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other, self.variables)
        p, q = Polynomial.unify(self, other)
        terms = dict(p.terms)
        for e, c in q.terms.items():
            s = terms.get(e)
            if s is None:
                terms[e] = c
            else:
                s = s + c
                if s:
                    terms[e] = s
                else:
                    del terms[e]
        return Polynomial._raw(p.variables, terms)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-other if isinstance(other, Polynomial) else -Fraction(other))

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                return Polynomial._raw(self.variables, {})
            return Polynomial._raw(self.variables, {e: co * c for e, co in self.terms.items()})
        p, q = Polynomial.unify(self, other)
        terms: dict[Exponents, Fraction] = {}
        get = terms.get
        for e1, c1 in p.terms.items():
            for e2, c2 in q.terms.items():
                e = tuple(map(int.__add__, e1, e2))
                s = get(e)
                s = c1 * c2 if s is None else s + c1 * c2
                if s:
                    terms[e] = s
                else:
                    del terms[e]
        return Polynomial._raw(p.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise PolynomialError("negative power")
        result = Polynomial.constant(1, self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- calculus / evaluation ---------------------------------------------

    def derivative(self, var: str) -> "Polynomial":
        if var not in self.variables:
            return Polynomial.zero(self.variables)
        i = self.variables.index(var)
        terms: dict[Exponents, Fraction] = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            new = list(e)
            new[i] -= 1
            terms[tuple(new)] = c * e[i]
        return Polynomial._raw(self.variables, terms)

    def evaluate(self, point: Mapping[str, Scalar]) -> Fraction:
        """Full evaluation at a rational point."""
        vals = []
        for v in self.variables:
            if v not in point:
                raise PolynomialError(f"missing value for {v!r}")
            vals.append(_as_fraction(point[v]))
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for x, val in zip(e, vals):
                if x:
                    t *= val ** x
            total += t
        return total

    def substitute(self, assignment: Mapping[str, "Polynomial | Scalar"]) -> "Polynomial":
        """Substitute polynomials (or rationals) for variables."""
        ctx = self.variables
        out_ctx: tuple[str, ...] = tuple(v for v in ctx if v not in assignment)
        reps: dict[str, Polynomial] = {}
        for v, rep in assignment.items():
            rp = rep if isinstance(rep, Polynomial) else Polynomial.constant(rep)
            out_ctx = merge_vars(out_ctx, rp.variables)
            reps[v] = rp
        result = Polynomial.zero(out_ctx)
        for e, c in self.terms.items():
            term = Polynomial.constant(c, out_ctx)
            for i, x in enumerate(e):
                if not x:
                    continue
                v = ctx[i]
                if v in reps:
                    term = term * reps[v].in_context(merge_vars(out_ctx, reps[v].variables)) ** x
                else:
                    term = term * Polynomial.var(v, out_ctx) ** x
            result = result + term
        return result

    # -- structure queries ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise PolynomialError("not a constant")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, var: str) -> int:
        if var not in self.variables:
            return 0 if self.terms else -1
        i = self.variables.index(var)
        return max((e[i] for e in self.terms), default=-1)

    def coefficients_in(self, var: str) -> list["Polynomial"]:
        """Coefficients c_0..c_d of self viewed as a polynomial in `var`.

        The coefficients live in the context without `var`.
        """
        if var not in self.variables:
            return [self]
        i = self.variables.index(var)
        rest = tuple(v for v in self.variables if v != var)
        d = self.degree_in(var)
        coeffs: list[dict[Exponents, Fraction]] = [dict() for _ in range(d + 1)]
        for e, c in self.terms.items():
            re = tuple(x for j, x in enumerate(e) if j != i)
            coeffs[e[i]][re] = c
        return [Polynomial._raw(rest, t) for t in coeffs]

    def leading_coefficient_in(self, var: str) -> "Polynomial":
        cs = self.coefficients_in(var)
        return cs[-1] if cs else Polynomial.zero(())

    @staticmethod
    def from_coefficients(coeffs: Sequence["Polynomial"], var: str) -> "Polynomial":
        ctx: tuple[str, ...] = (var,)
        for c in coeffs:
            ctx = merge_vars(ctx, c.variables)
        result = Polynomial.zero(ctx)
        xv = Polynomial.var(var, ctx)
        for k, c in enumerate(coeffs):
            result = result + c.in_context(ctx) * xv ** k
        return result

    def primitive(self) -> "Polynomial":
        """Scale by a positive rational so integer coefficients have gcd 1,
        with positive leading (graded-lex) coefficient. Cached."""
        cached = object.__getattribute__(self, "_prim")
        if cached is not None:
            return cached
        if not self.terms:
            object.__setattr__(self, "_prim", self)
            return self
        from math import gcd
        den = 1
        for c in self.terms.values():
            den = den * c.denominator // gcd(den, c.denominator)
        num = 0
        for c in self.terms.values():
            num = gcd(num, abs(c.numerator * (den // c.denominator)))
        scale = Fraction(den, num)
        lead = self.terms[max(self.terms, key=grlex_key)]
        if lead < 0:
            scale = -scale
        result = self * scale if scale != 1 else self
        object.__setattr__(result, "_prim", result)
        object.__setattr__(self, "_prim", result)
        return result

    def monic_sign(self) -> int:
        """Sign flip applied by primitive(): +1 or -1."""
        if not self.terms:
            return 1
        return -1 if self.terms[max(self.terms, key=grlex_key)] < 0 else 1

    # -- ordering / printing -------------------------------------------------

    def sorted_terms(self) -> list[tuple[Exponents, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        if self.variables == other.variables:
            return self.terms == other.terms
        p, q = Polynomial.unify(self, other)
        return p.terms == q.terms

    def __hash__(self) -> int:
        h = object.__getattribute__(self, "_hash")
        if h is None:
            p = self.drop_unused()
            h = hash((p.variables, frozenset(p.terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"Polynomial({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts: list[str] = []
        for e, c in self.sorted_terms():
            factors = []
            for v, x in zip(self.variables, e):
                if x == 1:
                    factors.append(v)
                elif x > 1:
                    factors.append(f"{v}^{x}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = str(mag) + "*" + "*".join(factors)
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)


# -- parsing ------------------------------------------------------------------


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class UnknownVariable(ParseError):
    pass


class _Tokens:
    SYMBOLS = ("+", "-", "*", "^", "(", ")")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens: list[tuple[str, str, int]] = []
        self._scan()
        self.idx = 0

    def _scan(self):
        t, n = self.text, len(self.text)
        i = 0
        while i < n:
            ch = t[i]
            if ch.isspace():
                i += 1
                continue
            if ch in self.SYMBOLS:
                self.tokens.append(("sym", ch, i))
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < n and t[j].isdigit():
                    j += 1
                if j < n and t[j] == "/":
                    k = j + 1
                    while k < n and t[k].isdigit():
                        k += 1
                    if k == j + 1:
                        raise ParseError("malformed rational literal", j)
                    self.tokens.append(("num", t[i:k], i))
                    i = k
                else:
                    self.tokens.append(("num", t[i:j], i))
                    i = j
                continue
            if ch.isalpha() or ch == "_":
                j = i
                while j < n and (t[j].isalnum() or t[j] == "_"):
                    j += 1
                self.tokens.append(("name", t[i:j], i))
                i = j
                continue
            raise ParseError(f"unexpected character {ch!r}", i)
        self.tokens.append(("end", "", n))

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.idx]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok


def _parse_sum(toks: _Tokens, ctx: tuple[str, ...]) -> Polynomial:
    kind, val, pos = toks.peek()
    negate = False
    if kind == "sym" and val in "+-":
        toks.next()
        negate = val == "-"
    p = _parse_product(toks, ctx)
    if negate:
        p = -p
    while True:
        kind, val, pos = toks.peek()
        if kind == "sym" and val in "+-":
            toks.next()
            q = _parse_product(toks, ctx)
            p = p - q if val == "-" else p + q
        else:
            return p


def _parse_product(toks: _Tokens, ctx: tuple[str, ...]) -> Polynomial:
    p = _parse_power(toks, ctx)
    while True:
        kind, val, pos = toks.peek()
        if kind == "sym" and val == "*":
            toks.next()
            p = p * _parse_power(toks, ctx)
        else:
            return p


def _parse_power(toks: _Tokens, ctx: tuple[str, ...]) -> Polynomial:
    p = _parse_atom(toks, ctx)
    kind, val, pos = toks.peek()
    if kind == "sym" and val == "^":
        toks.next()
        kind, val, pos = toks.next()
        if kind != "num" or "/" in val:
            raise ParseError("exponent must be a nonnegative integer", pos)
        return p ** int(val)
    return p


def _parse_atom(toks: _Tokens, ctx: tuple[str, ...]) -> Polynomial:
    kind, val, pos = toks.next()
    if kind == "num":
        if "/" in val:
            a, b = val.split("/")
            return Polynomial.constant(Fraction(int(a), int(b)), ctx)
        return Polynomial.constant(int(val), ctx)
    if kind == "name":
        if val not in ctx:
            raise UnknownVariable(f"unknown variable {val!r}", pos)
        return Polynomial.var(val, ctx)
    if kind == "sym" and val == "(":
        p = _parse_sum(toks, ctx)
        kind, val, pos = toks.next()
        if kind != "sym" or val != ")":
            raise ParseError("expected ')'", pos)
        return p
    if kind == "sym" and val == "-":
        return -_parse_atom(toks, ctx)
    raise ParseError(f"unexpected token {val!r}" if val else "unexpected end of input", pos)


def parse_polynomial(text: str, variables: Sequence[str]) -> Polynomial:
    """Parse the polynomial grammar: names, integer/rational literals `p/q`,
    `+ - * ^`, parentheses. Whitespace is insignificant."""
    ctx = tuple(variables)
    toks = _Tokens(text)
    p = _parse_sum(toks, ctx)
    kind, val, pos = toks.peek()
    if kind != "end":
        raise ParseError(f"unexpected trailing token {val!r}", pos)
    return p
