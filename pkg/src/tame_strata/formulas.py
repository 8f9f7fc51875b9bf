"""First-order formulas over the ordered real field.

Quantifier-free formulas denote semialgebraic sets. Atoms are normalized to
`p rel 0` with p primitive (integer coefficients, positive graded-lex leading
coefficient); bound variables are kept distinct from free ones by renaming.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .polynomials import ParseError, Polynomial, UnknownVariable, merge_vars

RELATIONS = ("=", "!=", "<", "<=", ">", ">=")

_NEG = {"=": "!=", "!=": "=", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}
_FLIP = {"=": "=", "!=": "!=", "<": ">", "<=": ">=", ">": "<", ">=": "<="}


def _sign_definite(poly: Polynomial) -> str | None:
    """Detect simple sign-definite shapes: every monomial has all-even
    exponents, and all coefficients share a sign. Returns "pos"/"neg" for
    strict definiteness (nonzero constant term), "psd"/"nsd" otherwise."""
    has_const = False
    sign = 0
    for exps, c in poly.terms.items():
        if any(e % 2 for e in exps):
            return None
        s = 1 if c > 0 else -1
        if sign == 0:
            sign = s
        elif s != sign:
            return None
        if sum(exps) == 0:
            has_const = True
    if sign > 0:
        return "pos" if has_const else "psd"
    if sign < 0:
        return "neg" if has_const else "nsd"
    return None


def rel_holds(rel: str, sign: int) -> bool:
    if rel == "=":
        return sign == 0
    if rel == "!=":
        return sign != 0
    if rel == "<":
        return sign < 0
    if rel == "<=":
        return sign <= 0
    if rel == ">":
        return sign > 0
    if rel == ">=":
        return sign >= 0
    raise ValueError(f"bad relation {rel!r}")


class Formula:
    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And.of([self, other])

    def __or__(self, other: "Formula") -> "Formula":
        return Or.of([self, other])

    def __invert__(self) -> "Formula":
        return Not.of(self)

    def free_variables(self) -> tuple[str, ...]:
        out: list[str] = []
        _free_vars(self, frozenset(), out)
        return tuple(dict.fromkeys(out))

    def is_quantifier_free(self) -> bool:
        return _qf(self)

    def __str__(self) -> str:
        return format_formula(self)

    def __repr__(self) -> str:
        return f"Formula({self})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Formula):
            return NotImplemented
        return _syntactic_key(self) == _syntactic_key(other)

    def __hash__(self) -> int:
        return hash(_syntactic_key(self))


class TrueF(Formula):
    __slots__ = ()


class FalseF(Formula):
    __slots__ = ()


TRUE = TrueF()
FALSE = FalseF()


class Atom(Formula):
    __slots__ = ("poly", "rel")

    def __init__(self, poly: Polynomial, rel: str):
        if rel not in RELATIONS:
            raise ValueError(f"bad relation {rel!r}")
        object.__setattr__(self, "poly", poly)
        object.__setattr__(self, "rel", rel)

    @staticmethod
    def make(poly: Polynomial, rel: str) -> Formula:
        """Normalized atom: constant folding, sign-definite folding,
        primitive positive-lead polynomial."""
        if poly.is_constant():
            c = poly.constant_value()
            return TRUE if rel_holds(rel, (c > 0) - (c < 0)) else FALSE
        definite = _sign_definite(poly)
        if definite == "pos":
            return TRUE if rel in (">", ">=", "!=") else FALSE
        if definite == "neg":
            return TRUE if rel in ("<", "<=", "!=") else FALSE
        if definite == "psd":
            if rel == ">=":
                return TRUE
            if rel == "<":
                return FALSE
        elif definite == "nsd":
            if rel == "<=":
                return TRUE
            if rel == ">":
                return FALSE
        prim = poly.primitive()
        if poly.monic_sign() < 0:
            rel = _FLIP[rel]
        return Atom(prim.drop_unused(), rel)


class And(Formula):
    __slots__ = ("parts",)

    def __init__(self, parts: tuple[Formula, ...]):
        object.__setattr__(self, "parts", parts)

    @staticmethod
    def of(parts: Iterable[Formula]) -> Formula:
        flat: list[Formula] = []
        for p in parts:
            if isinstance(p, TrueF):
                continue
            if isinstance(p, FalseF):
                return FALSE
            if isinstance(p, And):
                flat.extend(p.parts)
            else:
                flat.append(p)
        uniq = list(dict.fromkeys(flat))
        if not uniq:
            return TRUE
        if len(uniq) == 1:
            return uniq[0]
        return And(tuple(uniq))


class Or(Formula):
    __slots__ = ("parts",)

    def __init__(self, parts: tuple[Formula, ...]):
        object.__setattr__(self, "parts", parts)

    @staticmethod
    def of(parts: Iterable[Formula]) -> Formula:
        flat: list[Formula] = []
        for p in parts:
            if isinstance(p, FalseF):
                continue
            if isinstance(p, TrueF):
                return TRUE
            if isinstance(p, Or):
                flat.extend(p.parts)
            else:
                flat.append(p)
        uniq = list(dict.fromkeys(flat))
        if not uniq:
            return FALSE
        if len(uniq) == 1:
            return uniq[0]
        return Or(tuple(uniq))


class Not(Formula):
    __slots__ = ("part",)

    def __init__(self, part: Formula):
        object.__setattr__(self, "part", part)

    @staticmethod
    def of(part: Formula) -> Formula:
        if isinstance(part, TrueF):
            return FALSE
        if isinstance(part, FalseF):
            return TRUE
        if isinstance(part, Not):
            return part.part
        if isinstance(part, Atom):
            return Atom(part.poly, _NEG[part.rel])
        return Not(part)


class Exists(Formula):
    __slots__ = ("var", "body")

    def __init__(self, var: str, body: Formula):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "body", body)


class Forall(Formula):
    __slots__ = ("var", "body")

    def __init__(self, var: str, body: Formula):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "body", body)


# -- structural helpers ---------------------------------------------------------


def _syntactic_key(f: Formula):
    if isinstance(f, TrueF):
        return ("T",)
    if isinstance(f, FalseF):
        return ("F",)
    if isinstance(f, Atom):
        p = f.poly.drop_unused()
        return ("A", f.rel, p.variables, tuple(sorted(p.terms.items())))
    if isinstance(f, And):
        return ("&",) + tuple(_syntactic_key(p) for p in f.parts)
    if isinstance(f, Or):
        return ("|",) + tuple(_syntactic_key(p) for p in f.parts)
    if isinstance(f, Not):
        return ("!", _syntactic_key(f.part))
    if isinstance(f, Exists):
        return ("E", f.var, _syntactic_key(f.body))
    if isinstance(f, Forall):
        return ("U", f.var, _syntactic_key(f.body))
    raise TypeError(type(f))


def _free_vars(f: Formula, bound: frozenset, out: list[str]) -> None:
    if isinstance(f, Atom):
        for v in sorted(f.poly.used_variables()):
            if v not in bound:
                out.append(v)
    elif isinstance(f, (And, Or)):
        for p in f.parts:
            _free_vars(p, bound, out)
    elif isinstance(f, Not):
        _free_vars(f.part, bound, out)
    elif isinstance(f, (Exists, Forall)):
        _free_vars(f.body, bound | {f.var}, out)


def _qf(f: Formula) -> bool:
    if isinstance(f, (TrueF, FalseF, Atom)):
        return True
    if isinstance(f, (And, Or)):
        return all(_qf(p) for p in f.parts)
    if isinstance(f, Not):
        return _qf(f.part)
    return False


def atoms_of(f: Formula) -> list[Atom]:
    out: list[Atom] = []

    def walk(g: Formula):
        if isinstance(g, Atom):
            out.append(g)
        elif isinstance(g, (And, Or)):
            for p in g.parts:
                walk(p)
        elif isinstance(g, Not):
            walk(g.part)
        elif isinstance(g, (Exists, Forall)):
            walk(g.body)

    walk(f)
    return out


def map_atoms(f: Formula, fn: Callable[[Atom], Formula]) -> Formula:
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, And):
        return And.of([map_atoms(p, fn) for p in f.parts])
    if isinstance(f, Or):
        return Or.of([map_atoms(p, fn) for p in f.parts])
    if isinstance(f, Not):
        return Not.of(map_atoms(f.part, fn))
    if isinstance(f, Exists):
        return Exists(f.var, map_atoms(f.body, fn))
    if isinstance(f, Forall):
        return Forall(f.var, map_atoms(f.body, fn))
    return f


def substitute(f: Formula, assignment: Mapping[str, Polynomial | Fraction | int]) -> Formula:
    """Substitute polynomials/rationals for free variables (capture unchecked
    for bound vars; callers rename first)."""

    def fn(a: Atom) -> Formula:
        return Atom.make(a.poly.substitute(assignment), a.rel)

    def walk(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return fn(g)
        if isinstance(g, And):
            return And.of([walk(p) for p in g.parts])
        if isinstance(g, Or):
            return Or.of([walk(p) for p in g.parts])
        if isinstance(g, Not):
            return Not.of(walk(g.part))
        if isinstance(g, Exists):
            inner = {k: v for k, v in assignment.items() if k != g.var}
            return Exists(g.var, substitute(g.body, inner))
        if isinstance(g, Forall):
            inner = {k: v for k, v in assignment.items() if k != g.var}
            return Forall(g.var, substitute(g.body, inner))
        return g

    return walk(f)


def rename_variables(f: Formula, mapping: Mapping[str, str]) -> Formula:
    def walk(g: Formula) -> Formula:
        if isinstance(g, Atom):
            sub = {old: Polynomial.var(new) for old, new in mapping.items()}
            return Atom.make(g.poly.substitute(sub), g.rel)
        if isinstance(g, And):
            return And.of([walk(p) for p in g.parts])
        if isinstance(g, Or):
            return Or.of([walk(p) for p in g.parts])
        if isinstance(g, Not):
            return Not.of(walk(g.part))
        if isinstance(g, Exists):
            return Exists(mapping.get(g.var, g.var), walk(g.body))
        if isinstance(g, Forall):
            return Forall(mapping.get(g.var, g.var), walk(g.body))
        return g

    return walk(f)


def nnf(f: Formula, negate: bool = False) -> Formula:
    """Negation normal form (negations folded into atoms/quantifiers)."""
    if isinstance(f, TrueF):
        return FALSE if negate else TRUE
    if isinstance(f, FalseF):
        return TRUE if negate else FALSE
    if isinstance(f, Atom):
        return Atom(f.poly, _NEG[f.rel]) if negate else f
    if isinstance(f, Not):
        return nnf(f.part, not negate)
    if isinstance(f, And):
        parts = [nnf(p, negate) for p in f.parts]
        return Or.of(parts) if negate else And.of(parts)
    if isinstance(f, Or):
        parts = [nnf(p, negate) for p in f.parts]
        return And.of(parts) if negate else Or.of(parts)
    if isinstance(f, Exists):
        body = nnf(f.body, negate)
        return Forall(f.var, body) if negate else Exists(f.var, body)
    if isinstance(f, Forall):
        body = nnf(f.body, negate)
        return Exists(f.var, body) if negate else Forall(f.var, body)
    raise TypeError(type(f))


def fresh_name(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    i = 1
    while f"{base}_{i}" in taken:
        i += 1
    return f"{base}_{i}"


def prenex(f: Formula) -> tuple[list[tuple[str, str]], Formula]:
    """Prenex form of an NNF formula: ([(kind, var), ...] outermost first,
    quantifier-free matrix). Bound variables are renamed apart."""
    taken = set(f.free_variables())

    def walk(g: Formula) -> tuple[list[tuple[str, str]], Formula]:
        if isinstance(g, (TrueF, FalseF, Atom)):
            return [], g
        if isinstance(g, (Exists, Forall)):
            kind = "E" if isinstance(g, Exists) else "A"
            v = g.var
            nv = fresh_name(v, taken)
            taken.add(nv)
            body = rename_variables(g.body, {v: nv}) if nv != v else g.body
            prefix, matrix = walk(body)
            return [(kind, nv)] + prefix, matrix
        if isinstance(g, (And, Or)):
            prefixes: list[tuple[str, str]] = []
            matrices = []
            for p in g.parts:
                pre, mat = walk(p)
                prefixes.extend(pre)
                matrices.append(mat)
            combined = And.of(matrices) if isinstance(g, And) else Or.of(matrices)
            return prefixes, combined
        if isinstance(g, Not):
            raise ValueError("prenex requires NNF input")
        raise TypeError(type(g))

    return walk(nnf(f))


def dnf(f: Formula) -> list[list[Atom]]:
    """Disjunctive normal form of a QF formula as a list of conjunctions.

    TRUE is [[]]; FALSE is [].
    """
    g = nnf(f)

    def walk(h: Formula) -> list[list[Atom]]:
        if isinstance(h, TrueF):
            return [[]]
        if isinstance(h, FalseF):
            return []
        if isinstance(h, Atom):
            return [[h]]
        if isinstance(h, Or):
            out = []
            for p in h.parts:
                out.extend(walk(p))
            return out
        if isinstance(h, And):
            out = [[]]
            for p in h.parts:
                branch = walk(p)
                out = [c + d for c in out for d in branch]
                if not out:
                    return []
            return out
        raise ValueError("dnf requires quantifier-free input")

    return walk(g)


def from_dnf(clauses: Iterable[Iterable[Atom]]) -> Formula:
    return Or.of([And.of(list(c)) for c in clauses])


def evaluate(f: Formula, point: Mapping[str, object]) -> bool:
    """Evaluate a QF formula at a rational/algebraic point (exact)."""
    from .algebraic import sign_at

    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Atom):
        return rel_holds(f.rel, sign_at(f.poly, point))
    if isinstance(f, And):
        return all(evaluate(p, point) for p in f.parts)
    if isinstance(f, Or):
        return any(evaluate(p, point) for p in f.parts)
    if isinstance(f, Not):
        return not evaluate(f.part, point)
    raise ValueError("evaluate requires quantifier-free input")


def has_strict_atoms(f: Formula) -> bool:
    return any(a.rel in ("<", ">", "!=") for a in atoms_of(f))


# -- printing --------------------------------------------------------------------


def format_formula(f: Formula) -> str:
    def prec(g: Formula) -> int:
        if isinstance(g, Or):
            return 1
        if isinstance(g, And):
            return 2
        return 3

    def walk(g: Formula) -> str:
        if isinstance(g, TrueF):
            return "true"
        if isinstance(g, FalseF):
            return "false"
        if isinstance(g, Atom):
            return f"{g.poly} {g.rel} 0"
        if isinstance(g, Not):
            inner = walk(g.part)
            return f"not ({inner})" if prec(g.part) < 3 else f"not {inner}"
        if isinstance(g, And):
            return " and ".join(walk(p) if prec(p) >= 2 else f"({walk(p)})" for p in g.parts)
        if isinstance(g, Or):
            return " or ".join(walk(p) for p in g.parts)
        if isinstance(g, Exists):
            return f"exists {g.var} ({walk(g.body)})"
        if isinstance(g, Forall):
            return f"forall {g.var} ({walk(g.body)})"
        raise TypeError(type(g))

    return walk(f)


# -- parsing ---------------------------------------------------------------------


class _FTokens:
    TWO = ("<=", ">=", "!=")
    ONE = ("+", "-", "*", "^", "(", ")", "=", "<", ">")
    KEYWORDS = ("and", "or", "not", "exists", "forall", "true", "false")

    def __init__(self, text: str):
        self.text = text
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
            if t[i : i + 2] in self.TWO:
                self.tokens.append(("sym", t[i : i + 2], i))
                i += 2
                continue
            if ch in self.ONE:
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
                word = t[i:j]
                kind = "kw" if word in self.KEYWORDS else "name"
                self.tokens.append((kind, word, i))
                i = j
                continue
            raise ParseError(f"unexpected character {ch!r}", i)
        self.tokens.append(("end", "", n))

    def peek(self):
        return self.tokens[self.idx]

    def next(self):
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def expect(self, kind: str, val: str):
        k, v, pos = self.next()
        if k != kind or v != val:
            raise ParseError(f"expected {val!r}", pos)


class _FormulaParser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.toks = _FTokens(text)
        self.scope: list[str] = list(variables)

    def parse(self) -> Formula:
        f = self.parse_or()
        k, v, pos = self.toks.peek()
        if k != "end":
            raise ParseError(f"unexpected trailing token {v!r}", pos)
        return f

    def parse_or(self) -> Formula:
        parts = [self.parse_and()]
        while True:
            k, v, _ = self.toks.peek()
            if k == "kw" and v == "or":
                self.toks.next()
                parts.append(self.parse_and())
            else:
                return Or.of(parts)

    def parse_and(self) -> Formula:
        parts = [self.parse_unary()]
        while True:
            k, v, _ = self.toks.peek()
            if k == "kw" and v == "and":
                self.toks.next()
                parts.append(self.parse_unary())
            else:
                return And.of(parts)

    def parse_unary(self) -> Formula:
        k, v, pos = self.toks.peek()
        if k == "kw" and v == "not":
            self.toks.next()
            return Not.of(self.parse_unary())
        if k == "kw" and v in ("exists", "forall"):
            self.toks.next()
            nk, name, npos = self.toks.next()
            if nk != "name":
                raise ParseError("expected variable name after quantifier", npos)
            self.toks.expect("sym", "(")
            self.scope.append(name)
            body = self.parse_or()
            self.scope.pop()
            self.toks.expect("sym", ")")
            return Exists(name, body) if v == "exists" else Forall(name, body)
        if k == "kw" and v == "true":
            self.toks.next()
            return TRUE
        if k == "kw" and v == "false":
            self.toks.next()
            return FALSE
        if k == "sym" and v == "(":
            # either a parenthesized formula or a parenthesized polynomial;
            # try formula first, fall back to atom parsing
            save = self.toks.idx
            try:
                self.toks.next()
                f = self.parse_or()
                self.toks.expect("sym", ")")
                k2, v2, _ = self.toks.peek()
                if k2 == "sym" and v2 in RELATIONS + ("+", "-", "*", "^"):
                    raise ParseError("polynomial context", 0)
                return f
            except ParseError:
                self.toks.idx = save
                return self.parse_atom()
        return self.parse_atom()

    def parse_atom(self) -> Formula:
        left = self.parse_poly_sum()
        k, v, pos = self.toks.next()
        if k != "sym" or v not in RELATIONS:
            raise ParseError("expected relation", pos)
        right = self.parse_poly_sum()
        return Atom.make(left - right, v)

    # polynomial sub-grammar over the current scope
    def parse_poly_sum(self) -> Polynomial:
        k, v, _ = self.toks.peek()
        negate = False
        if k == "sym" and v in "+-":
            self.toks.next()
            negate = v == "-"
        p = self.parse_poly_prod()
        if negate:
            p = -p
        while True:
            k, v, _ = self.toks.peek()
            if k == "sym" and v in "+-":
                self.toks.next()
                q = self.parse_poly_prod()
                p = p - q if v == "-" else p + q
            else:
                return p

    def parse_poly_prod(self) -> Polynomial:
        p = self.parse_poly_pow()
        while True:
            k, v, _ = self.toks.peek()
            if k == "sym" and v == "*":
                self.toks.next()
                p = p * self.parse_poly_pow()
            else:
                return p

    def parse_poly_pow(self) -> Polynomial:
        p = self.parse_poly_atom()
        k, v, _ = self.toks.peek()
        if k == "sym" and v == "^":
            self.toks.next()
            nk, nv, pos = self.toks.next()
            if nk != "num" or "/" in nv:
                raise ParseError("exponent must be a nonnegative integer", pos)
            return p ** int(nv)
        return p

    def parse_poly_atom(self) -> Polynomial:
        k, v, pos = self.toks.next()
        if k == "num":
            if "/" in v:
                a, b = v.split("/")
                return Polynomial.constant(Fraction(int(a), int(b)))
            return Polynomial.constant(int(v))
        if k == "name":
            if v not in self.scope:
                raise UnknownVariable(f"unknown variable {v!r}", pos)
            return Polynomial.var(v)
        if k == "sym" and v == "(":
            p = self.parse_poly_sum()
            self.toks.expect("sym", ")")
            return p
        if k == "sym" and v == "-":
            return -self.parse_poly_atom()
        raise ParseError(f"unexpected token {v!r}" if v else "unexpected end of input", pos)


def parse_formula(text: str, variables: Sequence[str]) -> Formula:
    """Parse the formula grammar (polynomial grammar plus relations,
    and/or/not, exists/forall, true/false)."""
    return _FormulaParser(text, variables).parse()
